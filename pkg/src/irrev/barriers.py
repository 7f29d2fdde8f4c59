"""Irreversibility lower bounds and the barrier formulas they imply.

The irreversibility of a tensor is the ratio of the logs of its asymptotic
rank and asymptotic subrank.  Here the asymptotic rank is lower-bounded by
the largest flattening rank and the asymptotic subrank is upper-bounded by
the entropy maximum over support distributions, so

    irr_lb = log2(max flattening rank) / entropy maximum

is a certified lower bound on irreversibility.  Every barrier formula in this
module is a closed-form function of such lower bounds: any upper bound on the
matrix multiplication exponent proved through an intermediate tensor t is at
least 2 * irr(t), and imposing more structure (Schonhage-style outer sums,
rectangular targets, the laser method on cw_q) strengthens the barrier.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

from .entropy import (
    RhoResult,
    Theta,
    binary_entropy,
    cw_big_entropy_argmax,
    cw_big_marginal_entropy,
    cw_small_entropy_bound,
    rho_upper,
    _cw_small_param,
)
from .errors import DegenerateInputError
from .linalg import flattening_ranks
from .tensor import Tensor, cw_big, cyc, permute_legs, to_json, tn

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class BarrierReport:
    """Everything the irreversibility bound says about one tensor."""

    tensor_id: str
    flattening_ranks: tuple[int, int, int]
    rho: RhoResult
    theta_used: Theta
    irr_lb: float
    barrier_basic: float
    barrier_laser: float | None
    notes: str

    def to_json_dict(self) -> dict:
        return {
            "tensor_id": self.tensor_id,
            "flattening_ranks": list(self.flattening_ranks),
            "rho": {
                "value": self.rho.value,
                "argmax": {
                    "probabilities": [
                        {"point": list(p), "prob": x}
                        for p, x in zip(self.rho.argmax.points, self.rho.argmax.probs)
                    ]
                },
                "residual": self.rho.residual,
                "iterations": self.rho.iterations,
            },
            "theta_used": list(self.theta_used.as_tuple()),
            "irr_lb": self.irr_lb,
            "barrier_basic": self.barrier_basic,
            "barrier_laser": self.barrier_laser,
            "notes": self.notes,
        }


def tensor_content_id(t: Tensor) -> str:
    """Stable id for a tensor: short hash of its canonical serialization."""
    return hashlib.sha256(to_json(t).encode()).hexdigest()[:12]


def irr_lower(
    t: Tensor,
    theta: Theta | None = None,
    tol: float = DEFAULT_TOL,
    search_theta: bool = False,
    tensor_id: str = "",
    iter_budget: int = 10**6,
) -> BarrierReport:
    """Irreversibility lower bound for t, with the basic barrier 2 * irr_lb.

    Any single theta yields a valid bound; search_theta minimizes the entropy
    maximum over the theta simplex to tighten it.
    """
    if theta is None:
        theta = Theta.uniform()
    ranks = flattening_ranks(t)
    if search_theta:
        theta, rho = min_rho_over_theta(t, tol=tol, iter_budget=iter_budget)
    else:
        rho = rho_upper(t, theta, tol=tol, iter_budget=iter_budget)
    if rho.value <= 0.0:
        raise DegenerateInputError(
            "entropy maximum is zero; irreversibility bound undefined for this input"
        )
    irr_lb = math.log2(max(ranks)) / rho.value
    notes: list[str] = []
    if irr_lb < 1.0:
        notes.append("bound-vacuous: irr_lb < 1, the bound carries no information")
    laser = None
    q = _cw_small_param(t)
    if q is not None and q >= 2:
        laser = cw_laser_barrier(q, "flattening")
        notes.append(f"laser barrier attached for recognized cw_{q} support")
    return BarrierReport(
        tensor_id=tensor_id or tensor_content_id(t),
        flattening_ranks=ranks,
        rho=rho,
        theta_used=theta,
        irr_lb=irr_lb,
        barrier_basic=2.0 * irr_lb,
        barrier_laser=laser,
        notes="; ".join(notes),
    )


def monomial_irr_lower(
    t: Tensor,
    theta: Theta | None = None,
    tol: float = DEFAULT_TOL,
    search_theta: bool = False,
    tensor_id: str = "",
) -> BarrierReport:
    """Lower bound on monomial irreversibility.

    Monomial irreversibility is at least plain irreversibility, so the report
    reuses irr_lower verbatim; support-only upper bounds on monomial subrank
    that could strengthen it (e.g. for group tensors) are not computed here.
    """
    report = irr_lower(t, theta, tol=tol, search_theta=search_theta, tensor_id=tensor_id)
    tag = "monomial irreversibility lower bound (via monirr >= irr; weak for group tensors)"
    notes = f"{report.notes}; {tag}" if report.notes else tag
    return replace(report, notes=notes)


def min_rho_over_theta(
    t: Tensor,
    tol: float = DEFAULT_TOL,
    grid: int = 6,
    rounds: int = 3,
    iter_budget: int = 10**6,
) -> tuple[Theta, RhoResult]:
    """Minimize the entropy maximum over the theta simplex (coarse grid plus
    local refinement).  Any theta is valid, so this only tightens bounds."""
    best: tuple[Theta, RhoResult] | None = None

    def consider(a: float, b: float, c: float):
        nonlocal best
        if a < 0 or b < 0 or c < 0:
            return
        s = a + b + c
        theta = Theta(a / s, b / s, c / s)
        res = rho_upper(t, theta, tol=tol, iter_budget=iter_budget)
        if best is None or res.value < best[1].value:
            best = (theta, res)

    consider(1.0, 1.0, 1.0)  # uniform: the search must never lose to the default
    for i in range(grid + 1):
        for j in range(grid + 1 - i):
            consider(i / grid, j / grid, (grid - i - j) / grid)
    assert best is not None
    step = 1.0 / grid
    for _ in range(rounds):
        step /= 2.0
        t1, t2, t3 = best[0].as_tuple()
        for da, db in (
            (step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step),
            (step, -step), (-step, step), (step, step), (-step, -step),
        ):
            consider(t1 + da, t2 + db, t3 - da - db)
    return best


# ---------------------------------------------------------------------------
# Barrier formulas


def barrier_intermediate(irr_lb: float) -> float:
    """Barrier for any approach through a fixed intermediate tensor: 2 * irr."""
    if irr_lb < 1.0:
        raise ValueError("irreversibility is never below 1")
    return 2.0 * irr_lb


def barrier_schonhage(irr_lb: float, alpha: int, beta: int) -> float:
    """Barrier when the final step subtracts alpha unit-tensor factors and
    divides by beta: ((alpha + 2 beta) irr - alpha) / beta."""
    if irr_lb < 1.0:
        raise ValueError("irreversibility is never below 1")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if beta <= 0:
        raise ValueError("beta must be positive")
    return ((alpha + 2.0 * beta) * irr_lb - alpha) / beta


def _cyclically_symmetric(t: Tensor) -> bool:
    if not (t.dims[0] == t.dims[1] == t.dims[2]):
        return False
    return permute_legs(t, (1, 2, 0)) == t


def barrier_rect(
    t: Tensor,
    alpha: int,
    a: int,
    b: int,
    c: int,
    theta: Theta | None = None,
    tol: float = DEFAULT_TOL,
) -> float:
    """Barrier for approaches targeting the rectangular tensor <a,b,c> with
    alpha diagonal factors removed, in terms of the cyclic symmetrization."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if min(a, b, c) < 1 or a * b * c < 2:
        raise ValueError("need abc >= 2")
    base = t if _cyclically_symmetric(t) else cyc(t)
    report = irr_lower(base, theta, tol=tol)
    irr = report.irr_lb
    return 2.0 * irr + (alpha / (math.log2(a * b * c) / 3.0)) * (irr - 1.0)


def cw_laser_barrier(q: int, rank_mode: str = "flattening") -> float:
    """Barrier for the laser method on cw_q with its standard outer structure.

    rank_mode 'flattening' uses the certified rank bound log2(q+1);
    'conjectured' assumes the conversion cost from diagonals is log2(q+2).
    """
    if q < 2:
        raise ValueError("needs q >= 2")
    if rank_mode not in ("flattening", "conjectured"):
        raise ValueError(f"rank_mode must be 'flattening' or 'conjectured', got {rank_mode!r}")
    rho = cw_small_entropy_bound(q)
    log_rank = math.log2(q + 1) if rank_mode == "flattening" else math.log2(q + 2)
    irr = log_rank / rho
    return 2.0 * irr + (binary_entropy(1.0 / 3.0) / (math.log2(q) / 3.0)) * (irr - 1.0)


def cw_better_barrier(q: int) -> float:
    """Basic barrier for cw_q assuming the conjectured conversion cost log2(q+2)."""
    if q < 2:
        raise ValueError("needs q >= 2")
    return 2.0 * math.log2(q + 2) / cw_small_entropy_bound(q)


# ---------------------------------------------------------------------------
# Table generators


def cw_table(q_lo: int = 2, q_hi: int = 7) -> list[tuple[int, float]]:
    """Basic barrier for the small Coppersmith-Winograd family."""
    if q_lo < 2:
        raise ValueError("cw table starts at q = 2")
    return [(q, 2.0 * math.log2(q + 1) / cw_small_entropy_bound(q)) for q in range(q_lo, q_hi + 1)]


def cw_big_table(
    q_lo: int = 1,
    q_hi: int = 6,
    tol: float = 1e-9,
    cross_check_tol: float = 1e-6,
) -> list[tuple[int, float]]:
    """Basic barrier for the big Coppersmith-Winograd family.

    Each row is the closed form 2 log2(q+2) / f(argmax), cross-checked
    against the general entropy optimizer on the actual support.
    """
    if q_lo < 1:
        raise ValueError("cw_big table starts at q = 1")
    rows = []
    for q in range(q_lo, q_hi + 1):
        peak = cw_big_marginal_entropy(q, cw_big_entropy_argmax(q))
        opt = rho_upper(cw_big(q), tol=tol)
        if abs(peak - opt.value) > cross_check_tol:
            raise ArithmeticError(
                f"closed form {peak} and optimizer {opt.value} disagree at q={q}"
            )
        rows.append((q, 2.0 * math.log2(q + 2) / peak))
    return rows


def tn_table(m_lo: int = 2, m_hi: int = 7, tol: float = 1e-9) -> list[tuple[int, int, float]]:
    """Basic barrier for reduced polynomial multiplication tensors.

    Rows are (m, m - 1, barrier): m is the tensor size (indices 0..m-1), and
    m - 1 is the row index used by the conventional family table, which is
    shifted by one relative to the size.
    """
    if m_lo < 2:
        raise ValueError("tn table starts at m = 2")
    rows = []
    for m in range(m_lo, m_hi + 1):
        rho = rho_upper(tn(m), tol=tol)
        rows.append((m, m - 1, 2.0 * math.log2(m) / rho.value))
    return rows


def laser_table(q_lo: int = 2, q_hi: int = 7, rank_mode: str = "flattening") -> list[tuple[int, float]]:
    if q_lo < 2:
        raise ValueError("laser table starts at q = 2")
    return [(q, cw_laser_barrier(q, rank_mode)) for q in range(q_lo, q_hi + 1)]


def better_table(q_lo: int = 2, q_hi: int = 12) -> list[tuple[int, float]]:
    if q_lo < 2:
        raise ValueError("better table starts at q = 2")
    return [(q, cw_better_barrier(q)) for q in range(q_lo, q_hi + 1)]
