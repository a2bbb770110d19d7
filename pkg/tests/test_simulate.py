import numpy as np
import pytest
from scipy.stats import kstest

from creditnet import CreditNetwork, build_representation, score
from creditnet import EscrowConfiguration
from creditnet.samplers import SamplerConfig
from creditnet.simulate import (
    ChainState,
    ModelError,
    SizeDist,
    TransactionModel,
    run,
    step,
    validate_model,
)


def symmetric_model(pairs, eps=1.0):
    return TransactionModel(
        pairs, [1.0] * len(pairs),
        [SizeDist("uniform", (eps,))] * len(pairs))


def test_size_dist_kinds():
    rng = np.random.default_rng(1)
    u = SizeDist("uniform", (2.0,))
    assert u.symmetric and u.symmetric_support
    g = SizeDist("gaussian", (0.0, 1.0))
    assert g.symmetric and g.symmetric_support
    g2 = SizeDist("gaussian", (0.1, 1.0))
    assert not g2.symmetric
    p = SizeDist("point_mass", (0.5,))
    assert not p.symmetric and not p.symmetric_support
    s = SizeDist("shifted_uniform", (0.5, 1.5))
    assert not s.symmetric
    for d in (u, g, g2, p, s):
        assert d.sample(rng, 10).shape == (10,)
    with pytest.raises(ModelError):
        SizeDist("nope", ())


def test_model_validation(triangle):
    with pytest.raises(ModelError):
        TransactionModel([("a", "a")], [1.0], [SizeDist("uniform", (1.0,))])
    with pytest.raises(ModelError):
        TransactionModel([("a", "b"), ("b", "a")], [1.0, 1.0],
                         [SizeDist("uniform", (1.0,))] * 2)
    with pytest.raises(ModelError):
        TransactionModel([("a", "b")], [0.0], [SizeDist("uniform", (1.0,))])
    m = symmetric_model([("a", "b"), ("b", "c")])
    checks = validate_model(triangle, m)
    assert checks["connected"] and checks["symmetric"]
    # Non-spanning pair set is not connected.
    m2 = symmetric_model([("a", "b")])
    assert not validate_model(triangle, m2)["connected"]
    # Point-mass sizes break both properties.
    m3 = TransactionModel([("a", "b"), ("b", "c")], [1.0, 1.0],
                          [SizeDist("point_mass", (0.5,))] * 2)
    checks3 = validate_model(triangle, m3)
    assert not checks3["connected"] and not checks3["symmetric"]
    # Shifted gaussian keeps full support but loses symmetry.
    m4 = TransactionModel([("a", "b"), ("b", "c")], [1.0, 1.0],
                          [SizeDist("gaussian", (0.1, 1.0))] * 2)
    checks4 = validate_model(triangle, m4)
    assert checks4["connected"] and not checks4["symmetric"]


def test_step_moves_or_stays(triangle):
    rep = build_representation(triangle)
    cfg = EscrowConfiguration(triangle, {"e1": 0.5, "e2": 0.5, "e3": 0.5})
    st = ChainState(score(rep, cfg))
    model = symmetric_model([("a", "b")], eps=0.1)
    rng = np.random.default_rng(2)
    st2 = step(rep, triangle, st, model, rng)
    assert st2.steps == 1
    if st2.accepted:
        assert not np.array_equal(st2.current.coords, st.current.coords)
    # An impossible size always stays put.
    big = TransactionModel([("a", "b")], [1.0], [SizeDist("point_mass", (50.0,))])
    st3 = step(rep, triangle, st, big, rng)
    assert st3.accepted == 0
    assert np.array_equal(st3.current.coords, st.current.coords)


def test_run_zero_steps(triangle):
    rep = build_representation(triangle)
    res = run(rep, triangle, symmetric_model([("a", "b"), ("b", "c")]),
              0, SamplerConfig(seed=3))
    assert res.steps == 0 and res.accepted == 0 and len(res.states) == 0


def test_run_deterministic_given_seed(triangle):
    rep = build_representation(triangle)
    model = symmetric_model([("a", "b"), ("b", "c"), ("a", "c")])
    r1 = run(rep, triangle, model, 5000, SamplerConfig(seed=4),
             monitor=[("a", "b", 0.5)])
    r2 = run(rep, triangle, model, 5000, SamplerConfig(seed=4),
             monitor=[("a", "b", 0.5)])
    assert r1.accepted == r2.accepted
    assert np.array_equal(r1.states, r2.states)
    assert r1.failure_rates == r2.failure_rates
    r3 = run(rep, triangle, model, 5000, SamplerConfig(seed=5))
    assert not np.array_equal(r1.final, r3.final)


def test_run_warns_when_not_connected(triangle):
    rep = build_representation(triangle)
    res = run(rep, triangle, symmetric_model([("a", "b")]), 100,
              SamplerConfig(seed=6))
    assert res.warnings


def test_single_edge_chain_uniform():
    # One channel: the chain is a random walk on [0, c] whose stationary
    # measure is uniform.
    net = CreditNetwork(["a", "b"], [("e", "a", "b", 1.0)])
    rep = build_representation(net)
    model = symmetric_model([("a", "b")], eps=0.5)
    res = run(rep, net, model, 60000, SamplerConfig(seed=7, thinning=20))
    xs = res.states[:, 0]
    stat = kstest(xs, "uniform", args=(0, 1))
    assert stat.pvalue > 1e-3


def test_monitored_failure_rate_matches_closed_form(triangle):
    rep = build_representation(triangle)
    model = symmetric_model([("a", "b"), ("b", "c"), ("a", "c")])
    res = run(rep, triangle, model, 100000, SamplerConfig(seed=8),
              monitor=[("a", "b", 0.5)])
    assert res.failure_rates[("a", "b", 0.5)] == pytest.approx(1.0 / 3.0,
                                                               abs=0.03)
