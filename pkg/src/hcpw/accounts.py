"""Account records: slow-hash verifiers over challenge/response transcripts.

The verifier digest is computed over a canonical byte serialization:
4-byte little-endian format version, then d, k1, k2, n, t each as 4-byte
little-endian unsigned integers, then every clause's indices as 4-byte
little-endian unsigned integers in order, then the response digits as
single bytes.  The hash algorithm is pluggable; the default is a
memory-hard KDF (scrypt, N=2**14, r=8, p=1).
"""

from __future__ import annotations

import hashlib
import hmac
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hcpw.params import SchemeParams
from hcpw.rng import make_rng
from hcpw.scheme import Clause, PasswordChallenge, SecretMapping, respond, response_digits

DIGEST_FORMAT_VERSION = 1

SCRYPT_PARAMS = {"n": 2**14, "r": 8, "p": 1, "dklen": 32}


def canonical_transcript(challenge: PasswordChallenge, digits: list[int]) -> bytes:
    """Canonical byte serialization of (challenge, response digits)."""
    p = challenge.params
    out = [struct.pack("<I", DIGEST_FORMAT_VERSION)]
    out.append(struct.pack("<5I", p.d, p.k1, p.k2, p.n, p.t))
    for clause in challenge.clauses:
        out.append(struct.pack(f"<{len(clause.indices)}I", *clause.indices))
    out.append(bytes(digits))
    return b"".join(out)


def _scrypt_digest(data: bytes, salt: bytes) -> bytes:
    return hashlib.scrypt(data, salt=salt, **SCRYPT_PARAMS)


def _sha256_digest(data: bytes, salt: bytes) -> bytes:
    return hashlib.sha256(salt + data).digest()


HASH_ALGORITHMS = {
    "scrypt": _scrypt_digest,
    "sha256": _sha256_digest,
}

DEFAULT_HASH = "scrypt"


def transcript_digest(challenge: PasswordChallenge, digits: list[int],
                      algorithm: str, salt: bytes) -> bytes:
    try:
        fn = HASH_ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown hash algorithm {algorithm!r}") from None
    return fn(canonical_transcript(challenge, digits), salt)


@dataclass(frozen=True)
class AccountRecord:
    """Stored per account: public challenge plus the verifier digest."""

    account_id: str
    challenge: PasswordChallenge
    digest: bytes
    algorithm: str
    salt: bytes

    def to_dict(self) -> dict:
        return {
            "account_id": self.account_id,
            "params": self.challenge.params.to_dict(),
            "clauses": [list(c.indices) for c in self.challenge.clauses],
            "digest": self.digest.hex(),
            "algorithm": self.algorithm,
            "salt": self.salt.hex(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "AccountRecord":
        params = SchemeParams.from_dict(obj["params"])
        clauses = tuple(Clause(params=params, indices=tuple(c)) for c in obj["clauses"])
        challenge = PasswordChallenge(params=params, clauses=clauses,
                                      label=obj["account_id"])
        return cls(
            account_id=obj["account_id"],
            challenge=challenge,
            digest=bytes.fromhex(obj["digest"]),
            algorithm=obj["algorithm"],
            salt=bytes.fromhex(obj["salt"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "AccountRecord":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def create_account(
    mapping: SecretMapping,
    account_id: str,
    seed_or_rng: int | np.random.Generator,
    algorithm: str = DEFAULT_HASH,
    salt: bytes | None = None,
) -> AccountRecord:
    """Generate a fresh password challenge and store its verifier digest."""
    from hcpw.scheme import gen_password_challenge

    rng = make_rng(seed_or_rng)
    if salt is None:
        salt = rng.bytes(16)
    challenge = gen_password_challenge(mapping.params, rng, label=account_id)
    digits = response_digits(respond(mapping, challenge))
    digest = transcript_digest(challenge, digits, algorithm, salt)
    return AccountRecord(account_id=account_id, challenge=challenge,
                         digest=digest, algorithm=algorithm, salt=salt)


def verify(record: AccountRecord, response: str | list[int]) -> bool:
    """Check a typed response against the stored verifier digest."""
    digits = response_digits(response) if isinstance(response, str) else list(response)
    if len(digits) != record.challenge.params.t:
        raise ValueError("response length does not match the challenge")
    if any(v < 0 or v >= record.challenge.params.d for v in digits):
        raise ValueError("response digit out of range")
    candidate = transcript_digest(record.challenge, digits, record.algorithm, record.salt)
    return hmac.compare_digest(candidate, record.digest)
