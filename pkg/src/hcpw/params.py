"""Scheme parameters.

A response function instance is determined by the alphabet size d, the
number of index variables k1, the number of tail variables k2, the secret
mapping length n, and the password length t (digits per password).  A
single-digit challenge lists d table slots, then k1 index variables, then
k2 tail variables, so its width is d + k1 + k2.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SchemeParams:
    d: int
    k1: int
    k2: int
    n: int
    t: int = 10

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"alphabet size d must be >= 2, got {self.d}")
        if not 1 <= self.k1 <= self.d:
            raise ValueError(f"k1 must satisfy 1 <= k1 <= d, got k1={self.k1}, d={self.d}")
        if self.k2 < 1:
            raise ValueError(f"k2 must be >= 1, got {self.k2}")
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")
        if self.clause_width() > self.n:
            raise ValueError(
                f"n={self.n} too small: clause width d+k1+k2 = {self.clause_width()}"
            )

    def clause_width(self) -> int:
        return self.d + self.k1 + self.k2

    @property
    def slot_positions(self) -> range:
        """Positions of the d table slots within a clause."""
        return range(0, self.d)

    @property
    def index_positions(self) -> range:
        """Positions of the k1 index variables within a clause."""
        return range(self.d, self.d + self.k1)

    @property
    def tail_positions(self) -> range:
        """Positions of the k2 tail variables within a clause."""
        return range(self.d + self.k1, self.clause_width())

    def to_dict(self) -> dict:
        return {"d": self.d, "k1": self.k1, "k2": self.k2, "n": self.n, "t": self.t}

    @classmethod
    def from_dict(cls, obj: dict) -> "SchemeParams":
        return cls(d=int(obj["d"]), k1=int(obj["k1"]), k2=int(obj["k2"]),
                   n=int(obj["n"]), t=int(obj["t"]))
