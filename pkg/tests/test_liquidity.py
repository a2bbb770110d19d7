import numpy as np
import pytest

from creditnet import CreditNetwork, Transaction, build_representation
from creditnet.liquidity import (
    LiquidityError,
    Method,
    duplicated_edge_equivalence,
    empirical_liquidity,
    exact_failure_probability,
    failure_curve,
    is_bound_tight,
    monotonicity_experiment,
    report,
    success_lower_bound,
)
from creditnet.samplers import ExactZonotopeSampler

from conftest import random_connected_network


def test_single_edge_closed_form():
    net = CreditNetwork(["a", "b"], [("e", "a", "b", 4.0)])
    # Single channel of capacity c: failure = k / c.
    assert exact_failure_probability(net, "a", "b", 1.0) == pytest.approx(0.25)
    assert exact_failure_probability(net, "a", "b", 4.0) == pytest.approx(1.0)
    assert exact_failure_probability(net, "a", "b", 0.0) == pytest.approx(0.0)


def test_triangle_closed_form(triangle):
    for k in (0.2, 0.5, 1.0):
        assert exact_failure_probability(triangle, "a", "b", k) == \
            pytest.approx(2.0 * k / 3.0, abs=1e-12)


def test_four_cycle_closed_form(four_cycle):
    for k in (0.25, 0.5, 0.75):
        assert exact_failure_probability(four_cycle, "a", "b", k) == \
            pytest.approx(3.0 * k / 4.0, abs=1e-12)


def test_requires_direct_edge(triangle):
    with pytest.raises(LiquidityError):
        exact_failure_probability(triangle, "a", "b", 1.5)  # cap only 1
    net = CreditNetwork(["a", "b", "c"],
                        [("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0)])
    with pytest.raises(LiquidityError):
        exact_failure_probability(net, "a", "c", 0.5)


def test_duplicated_edge_matches_closed_form():
    rng = np.random.default_rng(3)
    checked = 0
    for _ in range(60):
        net = random_connected_network(rng)
        e = net.edges[int(rng.integers(0, len(net.edges)))]
        k = float(rng.uniform(0, e.capacity))
        a = exact_failure_probability(net, e.tail, e.head, k)
        b = duplicated_edge_equivalence(net, e.tail, e.head, k)
        assert a == pytest.approx(b, abs=1e-9)
        checked += 1
    assert checked == 60


def test_lower_bound_and_tightness(four_cycle):
    # Opposite corners of the 4-cycle: no direct edge, bound only.
    lb = success_lower_bound(four_cycle, "a", "c", 0.5)
    assert lb == pytest.approx(0.5)  # 1 - k * R_eff with R_eff = 1
    assert not is_bound_tight(four_cycle, "a", "c", 0.5)
    assert is_bound_tight(four_cycle, "a", "b", 0.5)
    assert is_bound_tight(four_cycle, "a", "c", 0.0)
    rpt = report(four_cycle, "a", "c", 0.5)
    assert rpt.exact_failure is None and rpt.method is Method.BOUND
    rpt2 = report(four_cycle, "a", "b", 0.5)
    assert rpt2.exact_failure == pytest.approx(0.375)
    assert rpt2.method is Method.CLOSED_FORM


def test_bound_clamped_at_zero():
    net = CreditNetwork(["a", "b", "c"],
                        [("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0)])
    # R_eff(a, c) = 2, so 1 - k * R_eff < 0 for k > 0.5.
    assert success_lower_bound(net, "a", "c", 0.9) == 0.0


def test_empirical_matches_exact(triangle):
    rep = build_representation(triangle)
    rng = np.random.default_rng(19)
    pts = ExactZonotopeSampler(rep, triangle).sample_many(20000, rng)
    emp = empirical_liquidity(pts, rep, triangle, Transaction("a", "b", 0.5))
    assert emp == pytest.approx(1.0 - 1.0 / 3.0, abs=0.02)


def test_monotonicity_boost_helps(triangle):
    before, after = monotonicity_experiment(
        triangle, ("a", "b", 0.5), ("b", "c", 1.0))
    assert after >= before - 1e-12
    # h = 0 changes nothing.
    b0, a0 = monotonicity_experiment(triangle, ("a", "b", 0.5), ("b", "c", 0.0))
    assert a0 == pytest.approx(b0, abs=1e-12)


def test_monotonicity_no_shared_cycle_gap_zero():
    # Two triangles joined by a bridge: boosting in one triangle cannot
    # affect a transaction confined to the other.
    net = CreditNetwork(
        ["a", "b", "c", "d", "e", "f"],
        [("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0), ("e3", "a", "c", 1.0),
         ("br", "c", "d", 2.0),
         ("e4", "d", "e", 1.0), ("e5", "e", "f", 1.0), ("e6", "d", "f", 1.0)])
    before, after = monotonicity_experiment(net, ("a", "b", 0.5),
                                            ("e", "f", 3.0))
    assert after == pytest.approx(before, abs=1e-12)


def test_monotonicity_creates_missing_edge(four_cycle):
    before, after = monotonicity_experiment(four_cycle, ("a", "b", 0.5),
                                            ("a", "c", 1.0))
    assert after > before  # new chord strictly helps here


def test_failure_curve_monotone_and_bounded(triangle):
    rep = build_representation(triangle)
    rng = np.random.default_rng(37)
    pts = ExactZonotopeSampler(rep, triangle).sample_many(20000, rng)
    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    curve = failure_curve(triangle, "a", "b", grid, pts, rep)
    fs = [f for _k, f in curve]
    assert fs[0] == pytest.approx(0.0)
    assert all(f2 >= f1 - 0.02 for f1, f2 in zip(fs, fs[1:]))
    # Secant slope never exceeds R_eff = 2/3 by more than MC noise.
    for (k1, f1), (k2, f2) in zip(curve, curve[1:]):
        assert (f2 - f1) / (k2 - k1) <= 2.0 / 3.0 + 0.05
