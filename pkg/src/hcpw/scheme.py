"""The challenge-response scheme: secret mappings, clauses, and evaluation.

A challenge (clause) is an ordered tuple of d+k1+k2 distinct indices into
[n].  Writing x for the mapped digit values at those indices, the response
is

    f(x) = x[j] + sum(tail values) mod d,   j = sum(index values) mod d,

i.e. the index variables select one of the d table slots, whose value is
added to the tail values.  A length-t password challenge is t clauses; its
response is the t-digit string of clause responses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hcpw.params import SchemeParams
from hcpw.rng import make_rng

MAPPING_FILE_VERSION = 1

# digit characters for mapping files; limits file storage to d <= 36
_DIGIT_CHARS = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class SecretMapping:
    """The memorized secret: one digit of Z_d per index in [n]."""

    params: SchemeParams
    digits: np.ndarray  # shape (n,), values in [0, d)

    def __post_init__(self) -> None:
        digits = np.asarray(self.digits, dtype=np.int64)
        if digits.shape != (self.params.n,):
            raise ValueError(f"mapping must have exactly n={self.params.n} digits")
        if digits.min(initial=0) < 0 or digits.max(initial=0) >= self.params.d:
            raise ValueError("mapping digits out of range")
        object.__setattr__(self, "digits", digits)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SecretMapping)
            and self.params == other.params
            and np.array_equal(self.digits, other.digits)
        )

    def save(self, path: str | Path) -> None:
        if self.params.d > len(_DIGIT_CHARS):
            raise ValueError(f"mapping files support d <= {len(_DIGIT_CHARS)}")
        obj = {
            "version": MAPPING_FILE_VERSION,
            "n": self.params.n,
            "d": self.params.d,
            "digits": "".join(_DIGIT_CHARS[v] for v in self.digits),
        }
        Path(path).write_text(json.dumps(obj, separators=(",", ":")) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, params: SchemeParams | None = None) -> "SecretMapping":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        if obj.get("version") != MAPPING_FILE_VERSION:
            raise ValueError(f"unsupported mapping file version {obj.get('version')!r}")
        n, d = int(obj["n"]), int(obj["d"])
        digits = np.array([_DIGIT_CHARS.index(c) for c in obj["digits"]], dtype=np.int64)
        if len(digits) != n:
            raise ValueError("mapping file digit count does not match n")
        if params is None:
            # minimal parameter set consistent with the stored alphabet/length
            k1 = 1
            k2 = max(1, min(2, n - d - 1))
            params = SchemeParams(d=d, k1=k1, k2=k2, n=n)
        if params.n != n or params.d != d:
            raise ValueError("mapping file does not match the supplied parameters")
        return cls(params=params, digits=digits)


@dataclass(frozen=True)
class Clause:
    """Ordered tuple of clause_width() distinct indices into [n]."""

    params: SchemeParams
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        w = self.params.clause_width()
        idx = tuple(int(i) for i in self.indices)
        if len(idx) != w:
            raise ValueError(f"clause must list {w} indices, got {len(idx)}")
        if len(set(idx)) != w:
            raise ValueError("clause indices must be distinct")
        if min(idx) < 0 or max(idx) >= self.params.n:
            raise ValueError("clause index out of range")
        object.__setattr__(self, "indices", idx)


@dataclass(frozen=True)
class PasswordChallenge:
    """A sequence of t clauses; the response is one digit per clause."""

    params: SchemeParams
    clauses: tuple[Clause, ...]
    label: str = ""

    def __post_init__(self) -> None:
        if len(self.clauses) != self.params.t:
            raise ValueError(f"password challenge must hold t={self.params.t} clauses")


def gen_mapping(params: SchemeParams, seed_or_rng: int | np.random.Generator) -> SecretMapping:
    """Draw a uniform secret mapping; identical seeds give identical mappings."""
    rng = make_rng(seed_or_rng)
    return SecretMapping(params=params, digits=rng.integers(0, params.d, size=params.n))


def _check_values(params: SchemeParams, values: np.ndarray) -> np.ndarray:
    vals = np.asarray(values, dtype=np.int64)
    if vals.shape[-1] != params.clause_width():
        raise ValueError(
            f"expected {params.clause_width()} values, got {vals.shape[-1]}"
        )
    if vals.min(initial=0) < 0 or vals.max(initial=0) >= params.d:
        raise ValueError("values out of range for Z_d")
    return vals


def eval_f(params: SchemeParams, values) -> int:
    """Evaluate the response function on one vector of clause_width() digits."""
    vals = _check_values(params, values)
    j = int(vals[params.d:params.d + params.k1].sum() % params.d)
    return int((vals[j] + vals[params.d + params.k1:].sum()) % params.d)


def eval_values_batch(params: SchemeParams, values: np.ndarray) -> np.ndarray:
    """Vectorized eval_f over an (N, clause_width()) array of digit values."""
    vals = np.asarray(values, dtype=np.int64)
    d, k1 = params.d, params.k1
    j = vals[:, d:d + k1].sum(axis=1) % d
    slot = np.take_along_axis(vals, j[:, None], axis=1)[:, 0]
    return (slot + vals[:, d + k1:].sum(axis=1)) % d


def batch_evaluator(params: SchemeParams):
    """Return the response function as a batch callable (N, k) -> (N,)."""
    return lambda values: eval_values_batch(params, values)


def eval_on_mapping(mapping: SecretMapping, clause_indices: np.ndarray) -> np.ndarray:
    """Responses for an (N, clause_width()) array of clause index rows."""
    return eval_values_batch(mapping.params, mapping.digits[np.asarray(clause_indices)])


@dataclass
class StreamingTrace:
    """Primitive operations executed by the 3-slot streaming evaluation."""

    ops: list[tuple] = field(default_factory=list)
    max_slots_used: int = 0

    def __len__(self) -> int:
        return len(self.ops)


class _SlotMachine:
    """Fixed-slot working memory; raises if more than `capacity` slots are live."""

    def __init__(self, capacity: int, trace: StreamingTrace):
        self.capacity = capacity
        self.slots: dict[str, int] = {}
        self.trace = trace

    def _account(self, live_after: int) -> None:
        # executing a primitive needs one scratch slot on top of its operands
        needed = live_after + 1
        self.trace.max_slots_used = max(self.trace.max_slots_used, needed)
        assert needed <= self.capacity, (
            f"streaming evaluation would need {needed} slots, budget {self.capacity}"
        )

    def put(self, name: str, value: int, op: tuple) -> None:
        self.slots[name] = value
        self._account(len(self.slots))
        self.trace.ops.append(op)

    def drop(self, name: str) -> None:
        del self.slots[name]


def streaming_eval(params: SchemeParams, values) -> tuple[int, StreamingTrace]:
    """Evaluate via the canonical 3-slot streaming program.

    Primitives: Recall (read one mapped digit from the stream), Add (two
    digits mod d), TableLookup (select the slot position named by a digit).
    The primitive count is always 2*k1 + 2*k2 + 1 and at most 3 working
    slots are ever live.  The result equals eval_f.
    """
    vals = _check_values(params, values)
    d, k1, k2 = params.d, params.k1, params.k2
    trace = StreamingTrace()
    mem = _SlotMachine(3, trace)

    mem.put("acc", int(vals[d]), ("recall", d))
    for pos in range(d + 1, d + k1):
        mem.put("inc", int(vals[pos]), ("recall", pos))
        mem.put("acc", (mem.slots["acc"] + mem.slots["inc"]) % d, ("add",))
        mem.drop("inc")

    j = mem.slots["acc"]
    mem.put("acc", j, ("table_lookup", j))  # acc now names the slot position
    mem.put("acc", int(vals[j]), ("recall", j))

    for pos in range(d + k1, d + k1 + k2):
        mem.put("inc", int(vals[pos]), ("recall", pos))
        mem.put("acc", (mem.slots["acc"] + mem.slots["inc"]) % d, ("add",))
        mem.drop("inc")

    result = mem.slots["acc"]
    assert result == eval_f(params, vals)
    return result, trace


def recalled_indices(params: SchemeParams, mapping: SecretMapping, clause: Clause) -> set[int]:
    """Mapping indices whose digits the user recalls while answering `clause`.

    These are the k1 index variables, the k2 tail variables, and the one
    table slot selected by the index-variable sum; the other d-1 slots are
    displayed but never dereferenced.
    """
    idx = clause.indices
    d, k1 = params.d, params.k1
    j = int(sum(mapping.digits[i] for i in idx[d:d + k1]) % d)
    return set(idx[d:]) | {idx[j]}


def gen_clause(params: SchemeParams, seed_or_rng: int | np.random.Generator) -> Clause:
    """Draw a clause uniformly over ordered distinct index tuples."""
    rng = make_rng(seed_or_rng)
    idx = rng.permutation(params.n)[: params.clause_width()]
    return Clause(params=params, indices=tuple(int(i) for i in idx))


def draw_clause_array(
    params: SchemeParams, count: int, seed_or_rng: int | np.random.Generator
) -> np.ndarray:
    """Draw `count` uniform clauses as an (count, clause_width()) index array.

    Small n sorts random keys per row; large n draws with replacement and
    resamples the few rows containing duplicates.
    """
    rng = make_rng(seed_or_rng)
    w = params.clause_width()
    n = params.n
    if count == 0:
        return np.zeros((0, w), dtype=np.int64)
    if n <= max(128, 4 * w):
        keys = rng.random((count, n))
        return np.argsort(keys, axis=1)[:, :w].astype(np.int64)
    out = rng.integers(0, n, size=(count, w), dtype=np.int64)
    while True:
        srt = np.sort(out, axis=1)
        bad = np.flatnonzero(np.any(srt[:, 1:] == srt[:, :-1], axis=1))
        if len(bad) == 0:
            return out
        out[bad] = rng.integers(0, n, size=(len(bad), w), dtype=np.int64)


def gen_password_challenge(
    params: SchemeParams, seed_or_rng: int | np.random.Generator, label: str = ""
) -> PasswordChallenge:
    """Draw t independent clauses; repeated clauses are permitted."""
    rng = make_rng(seed_or_rng)
    clauses = tuple(gen_clause(params, rng) for _ in range(params.t))
    return PasswordChallenge(params=params, clauses=clauses, label=label)


def respond(mapping: SecretMapping, challenge: PasswordChallenge) -> str:
    """The user's password: one response digit per clause."""
    if challenge.params.n != mapping.params.n or challenge.params.d != mapping.params.d:
        raise ValueError("challenge does not match the mapping's parameters")
    digits = [eval_f(mapping.params, mapping.digits[list(c.indices)]) for c in challenge.clauses]
    return "".join(_DIGIT_CHARS[v] for v in digits)


def response_digits(response: str) -> list[int]:
    return [_DIGIT_CHARS.index(c) for c in response]


def hamming(m1: SecretMapping | np.ndarray, m2: SecretMapping | np.ndarray) -> int:
    """Number of positions where the two mappings disagree."""
    a = m1.digits if isinstance(m1, SecretMapping) else np.asarray(m1)
    b = m2.digits if isinstance(m2, SecretMapping) else np.asarray(m2)
    if a.shape != b.shape:
        raise ValueError("mappings must have equal length")
    return int(np.count_nonzero(a != b))


def is_eps_correlated(m1: SecretMapping, m2: SecretMapping, eps: float) -> bool:
    """True when the mappings agree noticeably more than chance.

    Two mappings over Z_d agree on a fraction 1/d of positions in
    expectation when independent; eps-correlation asks the disagreement
    rate to be at most (d-1)/d - eps.
    """
    if m1.params.d != m2.params.d:
        raise ValueError("alphabet mismatch")
    n, d = m1.params.n, m1.params.d
    return hamming(m1, m2) / n <= (d - 1) / d - eps


def is_delta_balanced(mapping: SecretMapping, delta: float) -> bool:
    """True when every constant mapping is near the chance disagreement rate."""
    n, d = mapping.params.n, mapping.params.d
    base = (d - 1) / d
    for v in range(d):
        frac = np.count_nonzero(mapping.digits != v) / n
        if abs(frac - base) > delta:
            return False
    return True
