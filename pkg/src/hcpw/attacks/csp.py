"""Backtracking search over mapping digits with forward checking.

Each pair is a table constraint that activates once the clause's index
variables are all assigned (the lookup slot is then known): slot value +
tail values = response (mod d).  An active constraint with one unassigned
term forces that term; with none, it verifies.  Assignments propagate
through a work queue; contradictions backtrack.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field

import numpy as np

from hcpw.instances import PlantedInstance


@dataclass
class CspReport:
    success: bool
    sigma: np.ndarray | None
    nodes: int
    elapsed: float
    timed_out: bool = False
    stats: dict = field(default_factory=dict)


def csp_attack(instance: PlantedInstance, time_budget: float = 300.0) -> CspReport:
    """Depth-first search for any mapping consistent with all pairs."""
    t0 = time.time()
    params = instance.params
    d, k1, n = params.d, params.k1, params.n
    m = instance.m
    if m == 0:
        return CspReport(success=True, sigma=np.zeros(n, dtype=np.int64),
                         nodes=0, elapsed=time.time() - t0)

    clauses = [list(map(int, row)) for row in instance.clauses]
    responses = [int(r) for r in instance.responses]
    index_vars = [row[d:d + k1] for row in clauses]
    tails = [row[d + k1:] for row in clauses]

    watch: list[list[int]] = [[] for _ in range(n)]
    for p_i, row in enumerate(clauses):
        for v in set(row):
            watch[v].append(p_i)

    # assign frequently-constraining variables first: index-variable roles
    # activate constraints, so they dominate the ordering
    freq = [0] * n
    for p_i in range(m):
        for v in index_vars[p_i]:
            freq[v] += 3
        for v in tails[p_i]:
            freq[v] += 1
    order = sorted(range(n), key=lambda v: -freq[v])

    assign = [-1] * n
    nodes = 0
    deadline = t0 + time_budget

    def check_pair(p_i: int):
        """-1 contradiction, 0 no information, or (var, forced_value)."""
        s = 0
        for v in index_vars[p_i]:
            av = assign[v]
            if av < 0:
                return 0
            s += av
        slot_var = clauses[p_i][s % d]
        total = 0
        unknown = -1
        for v in tails[p_i]:
            av = assign[v]
            if av < 0:
                if unknown >= 0:
                    return 0
                unknown = v
            else:
                total += av
        av = assign[slot_var]
        if av < 0:
            if unknown >= 0:
                return 0
            unknown = slot_var
        else:
            total += av
        if unknown < 0:
            return -1 if total % d != responses[p_i] else 0
        return (unknown, (responses[p_i] - total) % d)

    def dfs(depth: int) -> bool:
        nonlocal nodes
        if time.time() > deadline:
            raise TimeoutError
        while depth < n and assign[order[depth]] >= 0:
            depth += 1
        if depth == n:
            return True
        var = order[depth]
        for val in range(d):
            nodes += 1
            trail = [(var, -1)]
            assign[var] = val
            ok = True
            queue = [var]
            while queue and ok:
                v0 = queue.pop()
                for p_i in watch[v0]:
                    res = check_pair(p_i)
                    if res == 0:
                        continue
                    if res == -1:
                        ok = False
                        break
                    fv, fval = res
                    cur = assign[fv]
                    if cur < 0:
                        trail.append((fv, -1))
                        assign[fv] = fval
                        queue.append(fv)
                    elif cur != fval:
                        ok = False
                        break
            if ok and dfs(depth + 1):
                return True
            for v, old in reversed(trail):
                assign[v] = old
        return False

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, n + 100))
    try:
        found = dfs(0)
    except TimeoutError:
        return CspReport(success=False, sigma=None, nodes=nodes,
                         elapsed=time.time() - t0, timed_out=True,
                         stats={"reason": "time budget exhausted"})
    finally:
        sys.setrecursionlimit(old_limit)

    if not found:
        return CspReport(success=False, sigma=None, nodes=nodes,
                         elapsed=time.time() - t0,
                         stats={"reason": "search space exhausted"})
    sigma = np.array([a if a >= 0 else 0 for a in assign], dtype=np.int64)
    assert instance.consistent(sigma)
    return CspReport(success=True, sigma=sigma, nodes=nodes, elapsed=time.time() - t0)
