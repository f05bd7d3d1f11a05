"""Attacks against planted challenge/response instances."""

from hcpw.attacks.gauss import AttackReport, gaussian_attack, partial_guess_attack, try_extract
from hcpw.attacks.csp import csp_attack
from hcpw.attacks.labels import forgery_to_labels, recover_from_labels
from hcpw.attacks.spectral import projected_sum_bias, spectral_attack

__all__ = [
    "AttackReport",
    "try_extract",
    "gaussian_attack",
    "partial_guess_attack",
    "csp_attack",
    "recover_from_labels",
    "forgery_to_labels",
    "spectral_attack",
    "projected_sum_bias",
]
