"""Closed-form and bounded liquidity: failure probabilities, tightness, and
monotonicity experiments.

Under the uniform stationary measure, a transaction of size k between the
endpoints of an edge of capacity >= k fails with probability exactly
k * Gamma_{x=y}(c) / Gamma(c) = k * R_eff(x, y).  For arbitrary pairs,
1 - k * R_eff is a lower bound on success probability, tight exactly when a
direct edge of capacity >= k exists.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import treepoly
from ._kernels import membership_batch_kernel
from .network import CreditNetwork, Edge, Transaction
from .representation import SpanningRepresentation, StatePoint, transaction_vector

TOL = 1e-9


class LiquidityError(Exception):
    pass


class Method(Enum):
    CLOSED_FORM = "closed_form"
    BOUND = "bound"
    MONTE_CARLO = "monte_carlo"


@dataclass
class LiquidityReport:
    tx: Transaction
    exact_failure: float | None
    lower_bound_success: float
    tight: bool
    method: Method
    clamped: bool = False


def _direct_edge(net: CreditNetwork, x, y, k):
    cands = [e for e in net.edges_between(x, y) if e.capacity >= k - TOL]
    if not cands:
        raise LiquidityError(
            f"no edge between {x!r} and {y!r} with capacity >= {k}")
    return max(cands, key=lambda e: e.capacity)


def exact_failure_probability(net: CreditNetwork, x, y, k) -> float:
    """k * R_eff(x, y), valid when a direct edge of capacity >= k exists."""
    if k < 0:
        raise LiquidityError("transaction size must be nonnegative")
    _direct_edge(net, x, y, k)
    p = k * treepoly.effective_resistance(net, x, y)
    return min(max(p, 0.0), 1.0)


def duplicated_edge_equivalence(net: CreditNetwork, x, y, k) -> float:
    """Failure probability via the split-edge construction: duplicate the
    direct edge into f1 (capacity k) and f2 (capacity c - k); the failure
    probability equals P[f1 in a capacity-weighted random spanning tree]."""
    if k < 0:
        raise LiquidityError("transaction size must be nonnegative")
    split = _direct_edge(net, x, y, k)
    if k == 0:
        return 0.0
    edges = []
    for e in net.edges:
        if e.id == split.id:
            edges.append(Edge(e.id + "#f1", e.tail, e.head, k))
            edges.append(Edge(e.id + "#f2", e.tail, e.head, e.capacity - k))
        else:
            edges.append(e)
    net2 = CreditNetwork(net.vertices, edges)
    # P[f1 in tree] = c(f1) * Gamma(G'/f1) / Gamma(G')
    g = treepoly.gamma(net2)
    gc = treepoly.gamma_contracted(net2, [(x, y)])
    return min(max(k * gc / g, 0.0), 1.0)


def success_lower_bound(net: CreditNetwork, x, y, k) -> float:
    """max(0, 1 - k * R_eff); valid for any vertex pair."""
    if k < 0:
        raise LiquidityError("transaction size must be nonnegative")
    if x == y:
        raise LiquidityError("need distinct vertices")
    return max(0.0, 1.0 - k * treepoly.effective_resistance(net, x, y))


def is_bound_tight(net: CreditNetwork, x, y, k) -> bool:
    """True iff some direct edge between x and y has capacity >= k."""
    if k <= 0:
        return True
    return any(e.capacity >= k - TOL for e in net.edges_between(x, y))


def report(net, x, y, k) -> LiquidityReport:
    tight = is_bound_tight(net, x, y, k)
    bound = success_lower_bound(net, x, y, k)
    exact = None
    clamped = False
    if tight:
        raw = k * treepoly.effective_resistance(net, x, y)
        clamped = raw > 1.0
        exact = min(max(raw, 0.0), 1.0)
    return LiquidityReport(Transaction(x, y, k), exact, bound, tight,
                           Method.CLOSED_FORM if tight else Method.BOUND, clamped)


def _as_matrix(samples):
    if isinstance(samples, np.ndarray):
        return samples
    return np.array([s.coords if isinstance(s, StatePoint) else s for s in samples])


def empirical_liquidity(samples, rep: SpanningRepresentation, net, tx: Transaction) -> float:
    """Fraction of sampled states from which tx is feasible (membership of
    z minus the transaction vector)."""
    pts = _as_matrix(samples)
    if len(pts) == 0:
        raise LiquidityError("no samples given")
    v = transaction_vector(rep, tx)
    shifted = pts - v
    scale = max(1.0, float(np.max(np.abs(shifted))))
    ok = membership_batch_kernel(rep.generators, np.ones(len(net.edges)),
                                 shifted, TOL * scale)
    return float(np.mean(ok))


def monotonicity_experiment(net: CreditNetwork, tx, boost):
    """Exact success probability of an adjacent-pair transaction before and
    after adding capacity h between (a, b); the edge is created at the boost
    capacity when absent.  Returns (before, after)."""
    x, y, k = tx
    a, b, h = boost
    if h < 0:
        raise LiquidityError("boost must be nonnegative")
    before = 1.0 - exact_failure_probability(net, x, y, k)
    direct = net.edges_between(a, b)
    edges = list(net.edges)
    if direct:
        tgt = direct[0]
        edges = [Edge(e.id, e.tail, e.head, e.capacity + h) if e.id == tgt.id else e
                 for e in edges]
    else:
        net.vertex_index(a)
        net.vertex_index(b)
        eid = "boost"
        while eid in {e.id for e in edges}:
            eid += "_"
        edges.append(Edge(eid, a, b, h))
    net2 = CreditNetwork(net.vertices, edges)
    after = 1.0 - exact_failure_probability(net2, x, y, k)
    return before, after


def failure_curve(net, x, y, k_grid, samples, rep: SpanningRepresentation):
    """Monte-Carlo failure probability f(k) over a grid of sizes."""
    out = []
    for k in k_grid:
        succ = empirical_liquidity(samples, rep, net, Transaction(x, y, float(k))) \
            if k != 0 else 1.0
        out.append((float(k), 1.0 - succ))
    return out
