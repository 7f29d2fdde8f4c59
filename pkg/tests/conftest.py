"""Shared test oracles and factories.

The oracles here are deliberately naive and independent of the library's
algorithms: exhaustive subset search for free diagonals, prime-field
elimination for rank, dict-based objective evaluation for entropy.
"""

import random
from fractions import Fraction
from itertools import product

import pytest

from irrev import Support, Tensor, is_free_diagonal

MERSENNE_P = (1 << 31) - 1


def brute_force_max_free_diagonal(points) -> int:
    """Largest free diagonal by exhaustive DFS over all diagonals.

    Subsets with pairwise-distinct coordinates are subset-closed, so the DFS
    visits every diagonal; each is tested with the full predicate.
    """
    pts = sorted(points)
    dims = tuple(max(p[a] for p in pts) + 1 for a in range(3))
    sup = Support(dims, frozenset(pts))
    best = 0

    def dfs(start, chosen):
        nonlocal best
        if len(chosen) > best and is_free_diagonal(sup, chosen):
            best = len(chosen)
        for i in range(start, len(pts)):
            p = pts[i]
            if all(p[a] != q[a] for q in chosen for a in (0, 1, 2)):
                dfs(i + 1, chosen + [p])

    dfs(0, [])
    return best


def rank_mod_p(matrix, p: int = MERSENNE_P) -> int:
    """Rank by plain Gaussian elimination over a large prime field."""
    rows_map = {}
    for (r, c), v in matrix.entries.items():
        num = v.numerator % p
        den = pow(v.denominator % p, p - 2, p)
        rows_map.setdefault(r, {})[c] = num * den % p
    rows = [row for row in rows_map.values() if row]
    rank = 0
    while rows:
        prow = rows.pop()
        pc = min(prow)
        inv = pow(prow[pc], p - 2, p)
        rank += 1
        nxt = []
        for row in rows:
            a = row.pop(pc, 0)
            if a:
                factor = a * inv % p
                merged = dict(row)
                for c, y in prow.items():
                    if c != pc:
                        merged[c] = (merged.get(c, 0) - factor * y) % p
                row = {c: v for c, v in merged.items() if v}
            if row:
                nxt.append(row)
        rows = nxt
    return rank


def random_unit_tensor(rng: random.Random, max_dim=4, max_size=6) -> Tensor:
    """Random 0/1 tensor, resampled until it is not simple."""
    while True:
        dims = tuple(rng.randint(2, max_dim) for _ in range(3))
        size = rng.randint(2, max_size)
        cells = list(product(*(range(d) for d in dims)))
        pts = rng.sample(cells, min(size, len(cells)))
        try:
            return Tensor(dims, {p: 1 for p in pts})
        except ValueError:
            continue


def random_rational_tensor(rng: random.Random, max_dim=3, max_size=6) -> Tensor:
    """Random sparse tensor with small rational coefficients, never simple."""
    while True:
        dims = tuple(rng.randint(2, max_dim) for _ in range(3))
        size = rng.randint(2, max_size)
        cells = list(product(*(range(d) for d in dims)))
        pts = rng.sample(cells, min(size, len(cells)))
        entries = {}
        for p in pts:
            num = rng.choice([n for n in range(-5, 6) if n])
            entries[p] = Fraction(num, rng.randint(1, 4))
        try:
            return Tensor(dims, entries)
        except ValueError:
            continue


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
