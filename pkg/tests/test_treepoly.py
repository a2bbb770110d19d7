import numpy as np
import pytest

from creditnet import CreditNetwork, build_representation
from creditnet.treepoly import (
    TreePolyError,
    effective_resistance,
    enumerate_trees,
    gamma,
    gamma_contracted,
    rayleigh_gap,
    volume_oracle,
)

from conftest import random_connected_network


def test_triangle_hand_values(triangle):
    assert gamma(triangle) == pytest.approx(3.0)
    assert gamma_contracted(triangle, [("a", "b")]) == pytest.approx(2.0)
    assert effective_resistance(triangle, "a", "b") == pytest.approx(2.0 / 3.0)


def test_four_cycle_hand_values(four_cycle):
    assert gamma(four_cycle) == pytest.approx(4.0)
    assert gamma_contracted(four_cycle, [("a", "b")]) == pytest.approx(3.0)
    assert gamma_contracted(four_cycle, [("a", "c")]) == pytest.approx(4.0)
    assert effective_resistance(four_cycle, "a", "c") == pytest.approx(1.0)
    assert effective_resistance(four_cycle, "a", "b") == pytest.approx(0.75)


def test_weighted_gamma():
    # K2 with one edge: gamma = c; two parallel edges: gamma = c1 + c2.
    net = CreditNetwork(["a", "b"], [("e", "a", "b", 7.0)])
    assert gamma(net) == pytest.approx(7.0)
    net2 = CreditNetwork(["a", "b"], [("e1", "a", "b", 7.0),
                                      ("e2", "a", "b", 2.0)])
    assert gamma(net2) == pytest.approx(9.0)
    # Path with capacities 2, 3 has a single tree of weight 6.
    path = CreditNetwork(["a", "b", "c"],
                         [("e1", "a", "b", 2.0), ("e2", "b", "c", 3.0)])
    assert gamma(path) == pytest.approx(6.0)


def test_contract_to_single_vertex():
    net = CreditNetwork(["a", "b"], [("e", "a", "b", 7.0)])
    assert gamma_contracted(net, [("a", "b")]) == pytest.approx(1.0)


def test_disconnected_raises():
    net = CreditNetwork(["a", "b", "c"], [("e", "a", "b", 1.0)])
    with pytest.raises(TreePolyError):
        gamma(net)


def test_gamma_matches_tree_enumeration():
    rng = np.random.default_rng(13)
    for _ in range(25):
        net = random_connected_network(rng)
        trees = enumerate_trees(net)
        total = 0.0
        for tree in trees:
            w = 1.0
            for eid in tree:
                w *= net.edge(eid).capacity
            total += w
        assert gamma(net) == pytest.approx(total, rel=1e-9)


def test_deletion_contraction():
    # Gamma(G) = c(e) * Gamma(G/e) + Gamma(G - e) for any edge e.
    rng = np.random.default_rng(29)
    for _ in range(25):
        net = random_connected_network(rng, max_vertices=5)
        e = net.edges[int(rng.integers(0, len(net.edges)))]
        contracted = gamma_contracted(net, [(e.tail, e.head)])
        rest = [(f.id, f.tail, f.head, f.capacity)
                for f in net.edges if f.id != e.id]
        deleted = CreditNetwork(net.vertices, rest)
        try:
            g_del = gamma(deleted)
        except TreePolyError:
            g_del = 0.0  # bridge: no trees avoid e
        assert gamma(net) == pytest.approx(
            e.capacity * contracted + g_del, rel=1e-9)


def test_effective_resistance_series_parallel():
    # Series: resistances add; parallel: conductances (capacities) add.
    series = CreditNetwork(["a", "b", "c"],
                           [("e1", "a", "b", 2.0), ("e2", "b", "c", 4.0)])
    assert effective_resistance(series, "a", "c") == pytest.approx(0.5 + 0.25)
    par = CreditNetwork(["a", "b"], [("e1", "a", "b", 2.0),
                                     ("e2", "a", "b", 4.0)])
    assert effective_resistance(par, "a", "b") == pytest.approx(1.0 / 6.0)


def test_effective_resistance_equals_gamma_ratio():
    rng = np.random.default_rng(41)
    for _ in range(20):
        net = random_connected_network(rng)
        x, y = rng.choice(len(net.vertices), size=2, replace=False)
        x, y = net.vertices[x], net.vertices[y]
        want = gamma_contracted(net, [(x, y)]) / gamma(net)
        assert effective_resistance(net, x, y) == pytest.approx(want, rel=1e-9)


def test_rayleigh_gap_nonnegative():
    rng = np.random.default_rng(53)
    for _ in range(50):
        net = random_connected_network(rng)
        if len(net.vertices) < 3:
            continue
        idx = rng.choice(len(net.vertices), size=3, replace=False)
        v = [net.vertices[i] for i in idx]
        gap = rayleigh_gap(net, (v[0], v[1]), (v[1], v[2]))
        assert gap >= -1e-9


def test_rayleigh_gap_rejects_identical_pairs(triangle):
    with pytest.raises(TreePolyError):
        rayleigh_gap(triangle, ("a", "b"), ("b", "a"))


def test_volume_oracle_equals_gamma():
    rng = np.random.default_rng(61)
    for _ in range(20):
        net = random_connected_network(rng)
        rep = build_representation(net)
        assert volume_oracle(rep, net) == pytest.approx(gamma(net), rel=1e-9)


def test_tree_counts(triangle, four_cycle):
    assert len(enumerate_trees(triangle)) == 3
    assert len(enumerate_trees(four_cycle)) == 4
