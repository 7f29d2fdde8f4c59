"""Free-diagonal search: combinatorial lower bounds on monomial subrank.

A free diagonal is a subset D of a support whose points are pairwise distinct
in every coordinate and whose projected box meets the support only in D.
Zeroing all rows/columns/slices outside the projections then leaves exactly a
diagonal of size |D|, so a free diagonal of size n certifies that the unit
tensor of size n is a monomial restriction of any tensor with that support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .errors import ResourceLimitError
from .tensor import Index, Support, Tensor

DEFAULT_NODE_BUDGET = 10**8
DEFAULT_POWER_POINT_LIMIT = 200_000


@dataclass(frozen=True)
class DiagonalResult:
    """Best free diagonal found; exact means the search tree was exhausted."""

    size: int
    witness: tuple[Index, ...]
    exact: bool


@dataclass(frozen=True)
class PowerDiagonalResult:
    """Free-diagonal search on the k-th Kronecker power of a support."""

    size: int
    per_copy_rate: float
    exact: bool
    witness: tuple[Index, ...]


def is_free_diagonal(support: Support, points) -> bool:
    """Check the free-diagonal property of an ordered point list inside a support."""
    pts = list(points)
    if not set(pts) <= support.points:
        raise ValueError("diagonal points must lie inside the support")
    for axis in range(3):
        coords = [p[axis] for p in pts]
        if len(set(coords)) != len(coords):
            return False
    proj = [set(p[axis] for p in pts) for axis in range(3)]
    chosen = set(pts)
    for s in support.points:
        if s not in chosen and all(s[a] in proj[a] for a in range(3)):
            return False
    return True


class _Budget(Exception):
    pass


def max_free_diagonal(support: Support, node_budget: int = DEFAULT_NODE_BUDGET) -> DiagonalResult:
    """Exact branch-and-bound search for a maximum free diagonal.

    Points are scanned in lexicographic order; a branch is pruned when the
    current size plus the per-axis count of distinct coordinates still
    available among the remaining candidates cannot beat the incumbent.
    Adjoining a point that traps a foreign support point inside the projected
    box is refused outright: box violations can never be repaired later,
    because any trapped point shares a coordinate with the diagonal.
    """
    if node_budget < 1:
        raise ValueError("node_budget must be positive")
    pts = sorted(support.points)
    pos = {p: i for i, p in enumerate(pts)}
    support_set = support.points
    best: list[Index] = []
    nodes = 0
    chosen: list[Index] = []
    used: list[set[int]] = [set(), set(), set()]

    def box_ok(p: Index) -> bool:
        u = [used[a] | {p[a]} for a in range(3)]
        c = set(chosen)
        for s in support_set:
            if s != p and s not in c and s[0] in u[0] and s[1] in u[1] and s[2] in u[2]:
                return False
        return True

    def walk(start: int) -> None:
        nonlocal nodes, best
        nodes += 1
        if nodes > node_budget:
            raise _Budget
        if len(chosen) > len(best):
            best = list(chosen)
        candidates = [
            p for p in pts[start:] if all(p[a] not in used[a] for a in range(3))
        ]
        if not candidates:
            return
        bound = len(chosen) + min(
            len({p[a] for p in candidates}) for a in range(3)
        )
        if bound <= len(best):
            return
        for p in candidates:
            if not box_ok(p):
                continue
            chosen.append(p)
            for a in range(3):
                used[a].add(p[a])
            walk(pos[p] + 1)
            for a in range(3):
                used[a].remove(p[a])
            chosen.pop()

    exact = True
    try:
        walk(0)
    except _Budget:
        exact = False
    return DiagonalResult(size=len(best), witness=tuple(best), exact=exact)


def power_support(t: Tensor, k: int, max_points: int = DEFAULT_POWER_POINT_LIMIT) -> Support:
    """Support of the k-th Kronecker power of t, with row-major composite indices."""
    if k < 1:
        raise ValueError("power must be >= 1")
    base = sorted(t.entries)
    if len(base) ** k > max_points:
        raise ResourceLimitError(
            f"|supp|^k = {len(base) ** k} exceeds the {max_points} point limit"
        )
    dims = tuple(d**k for d in t.dims)
    points = set()
    for combo in product(base, repeat=k):
        idx = [0, 0, 0]
        for a in range(3):
            for p in combo:
                idx[a] = idx[a] * t.dims[a] + p[a]
        points.add(tuple(idx))
    return Support(dims, frozenset(points))


def monomial_subrank_power(
    t: Tensor,
    k: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    max_points: int = DEFAULT_POWER_POINT_LIMIT,
) -> PowerDiagonalResult:
    """Free-diagonal search on supp(t^(x)k); the rate log2(size)/k lower-bounds
    log2 of the asymptotic monomial subrank (Fekete supremum over k)."""
    sup = power_support(t, k, max_points=max_points)
    found = max_free_diagonal(sup, node_budget=node_budget)
    rate = math.log2(found.size) / k if found.size > 0 else -math.inf
    return PowerDiagonalResult(
        size=found.size, per_copy_rate=rate, exact=found.exact, witness=found.witness
    )
