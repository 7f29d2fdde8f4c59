"""Entropy maximization over tensor-support distributions.

The central quantity is the maximum, over probability distributions P on the
support of a tensor, of the weighted average of the Shannon entropies of the
three marginals of P.  The objective is concave (marginals are linear in P,
entropy is concave), so a first-order certificate bounds the distance to the
global optimum.  Evaluated in the tensor's given basis, the maximum
upper-bounds the base-2 logarithm of the asymptotic subrank.

All entropies are in bits, with 0 * log 0 = 0 by continuity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import BudgetExceededError
from .tensor import Index, Support, Tensor

DEFAULT_TOL = 1e-10
DEFAULT_ITER_BUDGET = 10**6


@dataclass(frozen=True)
class Theta:
    """Axis weights: nonnegative, summing to one."""

    t1: float
    t2: float
    t3: float

    def __post_init__(self):
        if min(self.t1, self.t2, self.t3) < 0:
            raise ValueError("theta components must be nonnegative")
        if abs(self.t1 + self.t2 + self.t3 - 1.0) > 1e-12:
            raise ValueError("theta components must sum to 1")

    @classmethod
    def uniform(cls) -> "Theta":
        return cls(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.t1, self.t2, self.t3)

    def is_uniform(self, tol: float = 1e-12) -> bool:
        return all(abs(v - 1.0 / 3.0) <= tol for v in self.as_tuple())


@dataclass(frozen=True)
class SupportDistribution:
    """Probability distribution on a finite set of support points."""

    points: tuple[Index, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.points) != len(self.probs):
            raise ValueError("points and probs must have equal length")
        if any(p < 0 for p in self.probs):
            raise ValueError("probabilities must be nonnegative")
        if abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    def as_dict(self) -> dict[Index, float]:
        return dict(zip(self.points, self.probs))


def marginal(dist: SupportDistribution, axis: int) -> dict[int, float]:
    """Pushforward of the distribution along one coordinate (axis in {1,2,3})."""
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis!r}")
    out: dict[int, float] = {}
    for point, p in zip(dist.points, dist.probs):
        coord = point[axis - 1]
        out[coord] = out.get(coord, 0.0) + p
    return out


def entropy_bits(probs) -> float:
    """Shannon entropy in bits of a probability vector (dict values or iterable)."""
    values = list(probs.values()) if isinstance(probs, Mapping) else list(probs)
    if any(p < 0 for p in values):
        raise ValueError("probabilities must be nonnegative")
    if abs(sum(values) - 1.0) > 1e-12:
        raise ValueError("probabilities must sum to 1")
    return -sum(p * math.log2(p) for p in values if p > 0)


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary entropy needs 0 <= p <= 1, got {p!r}")
    out = 0.0
    if p > 0:
        out -= p * math.log2(p)
    if p < 1:
        out -= (1 - p) * math.log2(1 - p)
    return out


@dataclass(frozen=True)
class RhoResult:
    """Certificate of an entropy-maximization run.

    value is the achieved objective (bits); residual is the first-order
    optimality gap at termination, so the true maximum lies within residual
    of value.
    """

    value: float
    argmax: SupportDistribution
    residual: float
    iterations: int


class _AxisEncoding:
    """Per-axis integer recoding of support points for vectorized marginals."""

    def __init__(self, points: Sequence[Index]):
        self.idx: list[np.ndarray] = []
        self.sizes: list[int] = []
        for axis in range(3):
            coords = np.array([p[axis] for p in points])
            _, inverse = np.unique(coords, return_inverse=True)
            self.idx.append(inverse)
            self.sizes.append(int(inverse.max()) + 1)


def _objective_and_scores(P: np.ndarray, enc: _AxisEncoding, th: tuple) -> tuple[float, np.ndarray]:
    """Objective value and per-point scores g_a = -sum_i th_i log2 marginal_i(a_i).

    The objective equals sum_a P_a g_a; scores minus their P-average give the
    concavity certificate max_a g_a - f >= f* - f.
    """
    f = 0.0
    scores = np.zeros(len(P))
    for i in range(3):
        if th[i] == 0.0:
            continue
        m = np.bincount(enc.idx[i], weights=P, minlength=enc.sizes[i])
        pos = m > 0
        logm = np.full(m.shape, -np.inf)
        logm[pos] = np.log2(m[pos])
        f += th[i] * float(-(m[pos] * logm[pos]).sum())
        scores -= th[i] * logm[enc.idx[i]]
    return f, scores


def _line_search(bases: list[np.ndarray], dirs: list[np.ndarray], th: tuple, gamma_max: float) -> float:
    """Exact maximization of the objective along marginal direction dirs.

    The restriction to the segment is concave in the step, so bisection on
    the derivative sign finds the maximizer; returns gamma_max when the
    derivative stays nonnegative on the whole segment.
    """

    def dphi(gamma: float) -> float:
        s = 0.0
        for i in range(3):
            if th[i] == 0.0:
                continue
            m = bases[i] + gamma * dirs[i]
            mask = m > 0
            s -= th[i] * float((dirs[i][mask] * np.log2(m[mask])).sum())
        return s

    hi = gamma_max * (1.0 - 1e-16)
    if dphi(hi) >= 0:
        return gamma_max
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if dphi(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _newton_polish(
    P: np.ndarray, f: float, g: np.ndarray, enc: _AxisEncoding, th: tuple
) -> np.ndarray | None:
    """One damped Newton step on the stationarity system g_a(P) = lambda.

    Ascent methods stall once the objective saturates at float resolution
    (the objective is quadratically flat near the optimum, the gap only
    linearly so); solving for equal scores directly converges quadratically
    in the gap.  Restricted to the active set; returns None on no progress.
    """
    active = np.where(P > 1e-14)[0]
    if len(active) > 512:
        return None
    mus = [np.bincount(enc.idx[i], weights=P, minlength=enc.sizes[i]) for i in range(3)]
    k = len(active)
    ln2 = math.log(2.0)
    J = np.zeros((k, k))
    for i in range(3):
        if th[i] == 0.0:
            continue
        ai = enc.idx[i][active]
        J -= (ai[:, None] == ai[None, :]) * (th[i] / (mus[i][ai][:, None] * ln2))
    A = np.zeros((k + 1, k + 1))
    A[:k, :k] = J
    A[:k, k] = -1.0
    A[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[:k] = f - g[active]
    try:
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    except np.linalg.LinAlgError:
        return None
    delta = sol[:k]
    gap = float(g.max() - f)
    for damp in (1.0, 0.5, 0.25, 0.125):
        P2 = P.copy()
        P2[active] = np.maximum(P2[active] + damp * delta, 0.0)
        total = P2.sum()
        if total <= 0:
            continue
        P2 /= total
        f2, g2 = _objective_and_scores(P2, enc, th)
        if float(g2.max() - f2) < gap:
            return P2
    return None


def rho_upper_on_support(
    support: Support,
    theta: Theta | None = None,
    tol: float = DEFAULT_TOL,
    iter_budget: int = DEFAULT_ITER_BUDGET,
) -> RhoResult:
    """Maximize the theta-weighted marginal entropy over distributions on a support.

    Frank-Wolfe iterations with exact line search, in the away-step variant:
    each step moves toward the best-scoring vertex or away from the worst
    active one, whichever linearizes better.  Away steps can zero out
    coordinates exactly, which is what makes boundary optima (points whose
    optimal mass is zero while their score touches the maximum) reachable at
    tight tolerances.  If float resolution stalls the line search, a
    multiplicative-weights ascent accepted on gap decrease takes over, then a
    Newton polish of the stationarity conditions.  Terminates when the
    first-order gap is at most tol, certifying |value - max| <= tol.
    """
    if theta is None:
        theta = Theta.uniform()
    if tol <= 0:
        raise ValueError("tol must be positive")
    if iter_budget < 1:
        raise ValueError("iter_budget must be positive")
    th = theta.as_tuple()
    points = sorted(support.points)
    m = len(points)
    enc = _AxisEncoding(points)

    def result(f: float, P: np.ndarray, gap: float, it: int) -> RhoResult:
        probs = np.maximum(P, 0.0)
        probs = probs / probs.sum()
        dist = SupportDistribution(points=tuple(points), probs=tuple(float(x) for x in probs))
        return RhoResult(value=f, argmax=dist, residual=max(gap, 0.0), iterations=it)

    def afw_step(P: np.ndarray, g: np.ndarray, f: float) -> np.ndarray:
        bases = [np.bincount(enc.idx[i], weights=P, minlength=enc.sizes[i]) for i in range(3)]
        b = int(g.argmax())
        ga = np.where(P > 0, g, np.inf)
        a = int(ga.argmin())
        toward = g[b] - f >= f - g[a] or P[a] >= 1.0 - 1e-12
        dirs = []
        for i in range(3):
            if toward:
                d = -bases[i].copy()
                d[enc.idx[i][b]] += 1.0
            else:
                d = bases[i].copy()
                d[enc.idx[i][a]] -= 1.0
            dirs.append(d)
        gamma_max = 1.0 if toward else P[a] / (1.0 - P[a])
        gamma = _line_search(bases, dirs, th, gamma_max)
        if toward:
            P2 = (1.0 - gamma) * P
            P2[b] += gamma
        elif gamma >= gamma_max * (1.0 - 1e-12):
            # Drop step: zero the away coordinate exactly, or rounding dust
            # keeps it active and wedges later iterations.
            P2 = P.copy()
            P2[a] = 0.0
        else:
            P2 = (1.0 + gamma) * P
            P2[a] -= gamma
            P2 = np.maximum(P2, 0.0)
        return P2 / P2.sum()

    def mw_candidate(P: np.ndarray, g: np.ndarray, eta: float) -> np.ndarray:
        finite = g[np.isfinite(g)]
        top = finite.max() if len(finite) else 0.0
        w = np.where(np.isfinite(g), g, top + 100.0)
        P2 = P * np.exp2(eta * (w - w.max()))
        return P2 / P2.sum()

    P = np.full(m, 1.0 / m)
    f, g = _objective_and_scores(P, enc, th)
    gap = float(g.max() - f)
    stalls = 0
    for it in range(1, iter_budget + 1):
        if gap <= tol:
            return result(f, P, gap, it)
        if it % 16 == 0:
            # Periodic second-order acceleration: line-search steps contract
            # the gap only linearly once the active set settles.
            P2 = _newton_polish(P, f, g, enc, th)
            if P2 is not None:
                f2, g2 = _objective_and_scores(P2, enc, th)
                P, f, g, gap = P2, f2, g2, float(g2.max() - f2)
                stalls = 0
                continue
        P2 = afw_step(P, g, f)
        f2, g2 = _objective_and_scores(P2, enc, th)
        gap2 = float(g2.max() - f2)
        if f2 > f or (f2 == f and gap2 < gap):
            P, f, g, gap = P2, f2, g2, gap2
            stalls = 0
            continue
        stalls += 1
        # Line search no longer moves the objective at float resolution;
        # try multiplicative-weights ascent, accepted on gap decrease.
        accepted = False
        eta = 1.0
        for _ in range(50):
            P3 = mw_candidate(P, g, eta)
            f3, g3 = _objective_and_scores(P3, enc, th)
            gap3 = float(g3.max() - f3)
            if gap3 < gap or (gap3 == gap and f3 > f):
                accepted = True
                break
            eta *= 0.5
        if accepted:
            P, f, g, gap = P3, f3, g3, gap3
            stalls = 0
            continue
        P3 = _newton_polish(P, f, g, enc, th)
        if P3 is not None:
            f3, g3 = _objective_and_scores(P3, enc, th)
            P, f, g, gap = P3, f3, g3, float(g3.max() - f3)
            stalls = 0
        elif stalls >= 3:
            break
    raise BudgetExceededError(
        f"no convergence to gap <= {tol} within {iter_budget} iterations",
        best=result(f, P, gap, min(it, iter_budget)),
    )


def rho_upper(
    t: Tensor,
    theta: Theta | None = None,
    tol: float = DEFAULT_TOL,
    iter_budget: int = DEFAULT_ITER_BUDGET,
) -> RhoResult:
    """Entropy-maximization upper bound on log2 asymptotic subrank of t (fixed basis)."""
    return rho_upper_on_support(t.support(), theta, tol, iter_budget)


# ---------------------------------------------------------------------------
# Independent grid oracle


def _objective_plain(points: Sequence[Index], probs: Sequence[float], th: tuple) -> float:
    # Deliberately simple dict-based evaluation, independent of the optimizer path.
    total = 0.0
    for axis in range(3):
        marg: dict[int, float] = {}
        for point, p in zip(points, probs):
            marg[point[axis]] = marg.get(point[axis], 0.0) + p
        h = -sum(p * math.log2(p) for p in marg.values() if p > 0)
        total += th[axis] * h
    return total


def _cw_big_param(t: Tensor) -> int | None:
    n1, n2, n3 = t.dims
    if not (n1 == n2 == n3) or n1 < 3:
        return None
    q = n1 - 2
    expected = {(0, 0, q + 1), (0, q + 1, 0), (q + 1, 0, 0)}
    for i in range(1, q + 1):
        expected.update({(0, i, i), (i, 0, i), (i, i, 0)})
    return q if set(t.entries) == expected else None


def _cw_small_param(t: Tensor) -> int | None:
    n1, n2, n3 = t.dims
    if not (n1 == n2 == n3) or n1 < 2:
        return None
    q = n1 - 1
    expected = set()
    for i in range(1, q + 1):
        expected.update({(0, i, i), (i, 0, i), (i, i, 0)})
    return q if set(t.entries) == expected else None


def _grid_batches(m: int, resolution: int):
    """Yield integer count matrices covering all compositions of resolution into m parts.

    The last two or three coordinates are vectorized; any remaining leading
    coordinates are enumerated recursively.
    """
    R = resolution
    if m == 1:
        yield np.array([[R]])
        return
    tail = 2 if m <= 3 else 3

    def tail_block(rem: int) -> np.ndarray:
        if tail == 2:
            a = np.arange(rem + 1)
            return np.stack([a, rem - a], axis=1)
        a = np.repeat(np.arange(rem + 1), rem + 1)
        b = np.tile(np.arange(rem + 1), rem + 1)
        keep = a + b <= rem
        a, b = a[keep], b[keep]
        return np.stack([a, b, rem - a - b], axis=1)

    prefix: list[int] = []

    def rec(depth: int, rem: int):
        if depth == m - tail:
            block = tail_block(rem)
            if prefix:
                lead = np.tile(np.array(prefix), (len(block), 1))
                yield np.hstack([lead, block])
            else:
                yield block
            return
        for c in range(rem + 1):
            prefix.append(c)
            yield from rec(depth + 1, rem - c)
            prefix.pop()

    yield from rec(0, R)


def _grid_max(points: Sequence[Index], th: tuple, resolution: int) -> float:
    m = len(points)
    enc = _AxisEncoding(points)
    best = -math.inf
    for counts in _grid_batches(m, resolution):
        P = counts.astype(float) / resolution
        f = np.zeros(len(P))
        for i in range(3):
            if th[i] == 0.0:
                continue
            marg = np.zeros((len(P), enc.sizes[i]))
            for a in range(m):
                marg[:, enc.idx[i][a]] += P[:, a]
            mask = marg > 0
            contrib = np.zeros_like(marg)
            contrib[mask] = marg[mask] * np.log2(marg[mask])
            f -= th[i] * contrib.sum(axis=1)
        best = max(best, float(f.max()))
    return best


def rho_grid_oracle(t: Tensor, theta: Theta | None = None, resolution: int = 1000) -> float:
    """Brute-force lower estimate of the entropy maximum, for cross-checking.

    Dense mode enumerates all distributions with denominator `resolution` on
    supports of at most 6 points.  For the Coppersmith-Winograd families
    (recognized structurally) and uniform theta, concavity plus support
    symmetry reduce the search to the symmetric family, handled at any size.
    """
    if theta is None:
        theta = Theta.uniform()
    if resolution < 1:
        raise ValueError("resolution must be positive")
    th = theta.as_tuple()
    points = sorted(t.support().points)

    if theta.is_uniform():
        q = _cw_big_param(t)
        if q is not None and q >= 1:
            middles = [p for p in points if p.count(0) == 1]
            corners = [p for p in points if p.count(0) == 2]
            best = -math.inf
            for step in range(resolution + 1):
                x = step / resolution / (3 * q)
                probs = [x] * (3 * q) + [1.0 / 3.0 - q * x] * 3
                best = max(best, _objective_plain(middles + corners, probs, th))
            return best
        q = _cw_small_param(t)
        if q is not None:
            # Support symmetry group is transitive: the uniform distribution
            # is the symmetrized family, a single point.
            return _objective_plain(points, [1.0 / len(points)] * len(points), th)

    if len(points) > 6:
        raise ValueError(
            "support too large for the dense grid oracle and no symmetry reduction applies"
        )
    return _grid_max(points, th, resolution)


# ---------------------------------------------------------------------------
# Closed forms for the Coppersmith-Winograd families


def _xlog2x(v: float) -> float:
    return v * math.log2(v) if v > 0 else 0.0


def cw_small_entropy_bound(q: int) -> float:
    """Weighted marginal entropy of the uniform distribution on supp(cw_q):
    log2(3) - 2/3 + (2/3) log2(q).  This is the entropy maximum for cw_q."""
    if q < 1:
        raise ValueError("needs q >= 1")
    return math.log2(3.0) - 2.0 / 3.0 + (2.0 / 3.0) * math.log2(q)


def cw_big_marginal_entropy(q: int, x: float) -> float:
    """Average marginal entropy of the symmetric distribution on supp(CW_q)
    putting x on each of the 3q middle points and 1/3 - qx on each corner."""
    if q < 1:
        raise ValueError("needs q >= 1")
    if not -1e-15 <= x <= 1.0 / (3.0 * q) + 1e-15:
        raise ValueError(f"x must lie in [0, 1/(3q)], got {x!r}")
    x = min(max(x, 0.0), 1.0 / (3.0 * q))
    return -(_xlog2x(2.0 / 3.0 - q * x) + q * _xlog2x(2.0 * x) + _xlog2x(1.0 / 3.0 - q * x))


def cw_big_entropy_argmax(q: int) -> float:
    """Maximizer of cw_big_marginal_entropy(q, .) on [0, 1/(3q)], in closed form."""
    if q < 1:
        raise ValueError("needs q >= 1")
    if q == 1:
        return (math.sqrt(33.0) - 3.0) / 18.0
    if q == 2:
        return 1.0 / 9.0
    return (3.0 * q - math.sqrt(32.0 + q * q)) / (6.0 * (q * q - 4.0))
