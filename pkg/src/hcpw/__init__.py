"""Workbench for human-computable challenge-response password schemes.

The scheme: a user memorizes a secret mapping from n objects to digits and
answers public challenges by evaluating a small modular-arithmetic function
over the mapped values in their head.  This package implements the scheme
itself, the Fourier-analytic security parameters of the response function,
a collection of attacks against planted challenge/response instances, a
rehearsal-effort model, a public challenge publisher, and a local training
service with an HTTP API.
"""

from hcpw.params import SchemeParams
from hcpw.scheme import (
    Clause,
    PasswordChallenge,
    SecretMapping,
    eval_f,
    gen_clause,
    gen_mapping,
    gen_password_challenge,
    hamming,
    is_delta_balanced,
    is_eps_correlated,
    recalled_indices,
    respond,
    streaming_eval,
)

__all__ = [
    "SchemeParams",
    "SecretMapping",
    "Clause",
    "PasswordChallenge",
    "gen_mapping",
    "eval_f",
    "streaming_eval",
    "recalled_indices",
    "gen_clause",
    "gen_password_challenge",
    "respond",
    "hamming",
    "is_eps_correlated",
    "is_delta_balanced",
]

__version__ = "0.1.0"
