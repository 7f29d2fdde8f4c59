import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irrev import (
    DegenerateInputError,
    Tensor,
    Theta,
    barrier_intermediate,
    barrier_rect,
    barrier_schonhage,
    better_table,
    cw,
    cw_better_barrier,
    cw_big,
    cw_big_table,
    cw_laser_barrier,
    cw_table,
    irr_lower,
    laser_table,
    min_rho_over_theta,
    monomial_irr_lower,
    tn,
    tn_table,
    unit,
    w,
    z3,
)

H13 = math.log2(3.0) - 2.0 / 3.0
IRR_W = 1.0 / H13  # 1.0889736868180786


def test_irr_lower_w():
    rep = irr_lower(w())
    assert rep.flattening_ranks == (2, 2, 2)
    assert rep.rho.value == pytest.approx(H13, abs=1e-12)
    assert rep.irr_lb == pytest.approx(IRR_W, abs=1e-9)
    assert rep.barrier_basic == pytest.approx(2 * IRR_W, abs=1e-9)
    assert rep.barrier_laser is None
    assert rep.tensor_id


def test_irr_lower_cw2():
    rep = irr_lower(cw(2))
    assert rep.irr_lb == pytest.approx(1.0, abs=1e-9)
    assert rep.barrier_basic == pytest.approx(2.0, abs=1e-9)
    # laser barrier attached for a recognized small-CW support
    assert rep.barrier_laser == pytest.approx(2.0, abs=1e-9)


def test_irr_lower_unit_is_reversible():
    for n in (2, 3, 5):
        rep = irr_lower(unit(n))
        assert rep.irr_lb == pytest.approx(1.0, abs=1e-10)


def test_irr_lower_degenerate_theta():
    t = Tensor((2, 2, 2), {(0, 0, 0): 1, (0, 1, 1): 1})
    with pytest.raises(DegenerateInputError):
        irr_lower(t, Theta(1.0, 0.0, 0.0))


def test_irr_lower_vacuous_flag():
    # 3x3 rank-2 slice on a single third index: entropy maximum is
    # (2/3) log2 3 > 1 while the largest flattening rank is 2.
    m = [[1, 1, 1], [1, 2, 3], [2, 3, 4]]
    entries = {(i, j, 0): m[i][j] for i in range(3) for j in range(3)}
    t = Tensor((3, 3, 1), entries)
    rep = irr_lower(t)
    assert rep.flattening_ranks == (2, 2, 1)
    assert rep.irr_lb < 1.0
    assert "bound-vacuous" in rep.notes
    assert rep.barrier_basic == pytest.approx(2 * rep.irr_lb, abs=1e-12)


def test_monomial_irr_lower():
    rep = monomial_irr_lower(z3())
    assert rep.flattening_ranks == (3, 3, 3)
    assert rep.rho.value == pytest.approx(math.log2(3.0), abs=1e-9)
    assert rep.irr_lb == pytest.approx(1.0, abs=1e-9)
    assert "monomial" in rep.notes
    assert monomial_irr_lower(w()).irr_lb == pytest.approx(IRR_W, abs=1e-9)


def test_barrier_intermediate():
    assert barrier_intermediate(1.0) == 2.0
    assert barrier_intermediate(1.08897) == pytest.approx(2.17794, abs=1e-9)
    with pytest.raises(ValueError):
        barrier_intermediate(0.99)


def test_barrier_schonhage():
    assert barrier_schonhage(1.0, 3, 2) == pytest.approx(2.0, abs=1e-12)
    assert barrier_schonhage(1.1, 1, 1) == pytest.approx(2.3, abs=1e-12)
    for irr in (1.0, 1.05, 1.3):
        assert barrier_schonhage(irr, 0, 7) == pytest.approx(
            barrier_intermediate(irr), abs=1e-12
        )
    with pytest.raises(ValueError):
        barrier_schonhage(1.1, -1, 1)
    with pytest.raises(ValueError):
        barrier_schonhage(1.1, 1, 0)
    with pytest.raises(ValueError):
        barrier_schonhage(0.9, 1, 1)


@settings(max_examples=150, deadline=None)
@given(
    st.floats(min_value=1.0, max_value=10.0),
    st.integers(min_value=0, max_value=50),
    st.integers(min_value=1, max_value=50),
)
def test_schonhage_dominates_intermediate(irr, alpha, beta):
    assert barrier_schonhage(irr, alpha, beta) >= barrier_intermediate(irr) - 1e-12


def test_barrier_rect_symmetric_reuse():
    # W is cyclically symmetric, so the cyc detour changes nothing
    assert barrier_rect(w(), 0, 2, 2, 2) == pytest.approx(2 * IRR_W, abs=1e-9)
    # irreversibility 1 kills the alpha term entirely
    for alpha in (0, 3):
        assert barrier_rect(cw(2), alpha, 2, 2, 2) == pytest.approx(2.0, abs=1e-8)


def test_barrier_rect_asymmetric_goes_through_cyc():
    # tn(2) is not cyclically symmetric; cyc(tn(2)) has flattening ranks 8
    # and entropy maximum 3 h(1/3), matching W's irreversibility bound.
    got = barrier_rect(tn(2), 0, 2, 2, 2)
    assert got == pytest.approx(2 * IRR_W, abs=1e-6)
    with pytest.raises(ValueError):
        barrier_rect(w(), 0, 1, 1, 1)
    with pytest.raises(ValueError):
        barrier_rect(w(), -1, 2, 2, 2)


def test_laser_barrier_values():
    assert cw_laser_barrier(2, "flattening") == pytest.approx(2.0, abs=1e-12)
    assert cw_laser_barrier(7, "flattening") == pytest.approx(2.2245539, abs=1e-6)
    assert cw_laser_barrier(2, "conjectured") == pytest.approx(3.2451124, abs=1e-6)
    with pytest.raises(ValueError):
        cw_laser_barrier(1, "flattening")
    with pytest.raises(ValueError):
        cw_laser_barrier(3, "guessing")


def test_better_barrier():
    assert cw_better_barrier(6) == pytest.approx(18 / (5 * math.log2(3.0)), abs=1e-12)
    assert cw_better_barrier(2) == pytest.approx(4 / math.log2(3.0), abs=1e-12)
    rows = better_table(2, 50)
    q_best, v_best = min(rows, key=lambda r: r[1])
    assert q_best == 6
    assert v_best == pytest.approx(2.271347112857247, abs=1e-12)
    with pytest.raises(ValueError):
        cw_better_barrier(1)


def test_cw_table_frozen_values():
    rows = cw_table(2, 7)
    expect = [2.0, 2.0253805, 2.0624435, 2.0962707, 2.1254923, 2.1506409]
    assert [q for q, _ in rows] == list(range(2, 8))
    for (_, got), want in zip(rows, expect):
        assert got == pytest.approx(want, abs=1e-6)
    values = [v for _, v in rows]
    assert all(a < b for a, b in zip(values, values[1:]))  # strictly increasing


def test_cw_big_table_frozen_values():
    rows = cw_big_table(1, 6)
    expect = [2.1680525, 2.1779474, 2.1914630, 2.2055046, 2.2191282, 2.2320061]
    for (_, got), want in zip(rows, expect):
        assert got == pytest.approx(want, abs=1e-5)
    values = [v for _, v in rows]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_cw_big_table_cross_checks_optimizer():
    rows = cw_big_table(1, 3, tol=1e-9, cross_check_tol=1e-6)
    for q, v in rows:
        peak = 2 * math.log2(q + 2) / v
        # reproduce the cross-check by hand against the optimizer
        from irrev import rho_upper

        assert rho_upper(cw_big(q), tol=1e-9).value == pytest.approx(peak, abs=1e-6)


def test_tn_table_frozen_values():
    rows = tn_table(2, 7)
    expect = [
        (2, 1, 2.177947373636157),
        (3, 2, 2.1680525330530567),
        (4, 3, 2.159493735197743),
        (5, 4, 2.152370795345807),
        (6, 5, 2.146408788386804),
        (7, 6, 2.1413506983264314),
    ]
    for (m, n, got), (em, en, want) in zip(rows, expect):
        assert (m, n) == (em, en)
        assert got == pytest.approx(want, abs=1e-6)
    values = [v for _, _, v in rows]
    assert all(b < a for a, b in zip(values, values[1:]))  # strictly decreasing


def test_laser_tables():
    flat = laser_table(2, 7, "flattening")
    expect_flat = [2.0, 2.0474379, 2.1054476, 2.1533829, 2.1923634, 2.2245539]
    for (_, got), want in zip(flat, expect_flat):
        assert got == pytest.approx(want, abs=1e-6)
    conj = laser_table(2, 11, "conjectured")
    expect_conj = [3.2451124, 2.6567799, 2.5, 2.4407196, 2.4159389,
                   2.4061387, 2.4036319, 2.4049172, 2.4082398, 2.4126602]
    for (_, got), want in zip(conj, expect_conj):
        assert got == pytest.approx(want, abs=1e-6)


def test_table_range_validation():
    with pytest.raises(ValueError):
        cw_table(1, 7)
    with pytest.raises(ValueError):
        cw_big_table(0, 3)
    with pytest.raises(ValueError):
        tn_table(1, 4)
    with pytest.raises(ValueError):
        laser_table(1, 5)
    with pytest.raises(ValueError):
        better_table(1, 5)


def test_min_rho_over_theta():
    _, res = min_rho_over_theta(w(), tol=1e-9, grid=4, rounds=2)
    assert res.value <= H13 + 1e-9
    # the search can never lose to the uniform default
    t = Tensor((2, 2, 2), {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1, (1, 1, 0): 1})
    _, res2 = min_rho_over_theta(t, tol=1e-9, grid=4, rounds=2)
    uniform = irr_lower(t).rho.value
    assert res2.value <= uniform + 1e-9


def test_search_theta_tightens_report():
    rep_u = irr_lower(cw_big(1))
    rep_s = irr_lower(cw_big(1), search_theta=True)
    assert rep_s.irr_lb >= rep_u.irr_lb - 1e-9


def test_report_json_fields():
    rep = irr_lower(cw(2))
    doc = rep.to_json_dict()
    assert set(doc) == {
        "tensor_id",
        "flattening_ranks",
        "rho",
        "theta_used",
        "irr_lb",
        "barrier_basic",
        "barrier_laser",
        "notes",
    }
    assert set(doc["rho"]) == {"value", "argmax", "residual", "iterations"}
    assert doc["flattening_ranks"] == [3, 3, 3]
    probs = doc["rho"]["argmax"]["probabilities"]
    assert len(probs) == 6
    assert set(probs[0]) == {"point", "prob"}
