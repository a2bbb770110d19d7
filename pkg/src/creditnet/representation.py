"""Spanning representations: edge direction vectors, the score map, and
zonotope membership.

A representation maps the edges of a basis spanning tree to the standard
basis of R^n (n = |V| - 1) and each remaining edge to the signed sum of tree
directions along the tree path between its endpoints.  Direction vectors are
exact integer vectors so cycle sums vanish exactly; scores and state points
live in floating point.
"""

from dataclasses import dataclass

import numpy as np

from . import lp
from ._kernels import lp_feasible_kernel
from .network import CreditNetwork, EscrowConfiguration, Transaction

TOL_EQ = 1e-9
TOL_BOUND = 1e-12


class RepresentationError(Exception):
    pass


@dataclass(frozen=True)
class StatePoint:
    coords: np.ndarray

    def __iter__(self):
        return iter(self.coords)


class SpanningRepresentation:
    """Direction map for a credit network with a designated basis tree."""

    def __init__(self, net: CreditNetwork, basis_tree, dir_map, parent):
        self.net = net
        self.basis_tree = list(basis_tree)  # n edge ids, in basis order
        self.dir = dir_map  # edge id -> integer vector, shape (n,)
        self.n = len(basis_tree)
        self._parent = parent  # vertex -> (parent vertex, edge id) or None
        # Generator matrix: columns are capacity-scaled directions, in edge order.
        self.generators = np.column_stack(
            [net.edge(eid).capacity * self.dir[eid].astype(float) for eid in net.edge_ids()]
        ) if net.edges else np.zeros((self.n, 0))
        self.capacities = np.array([e.capacity for e in net.edges])

    def tree_path(self, x, y):
        """Tree path x -> y as a list of (edge id, sign); sign +1 means the
        edge is traversed tail -> head."""
        self.net.vertex_index(x)
        self.net.vertex_index(y)
        return _tree_path(self.net, self._parent, x, y)

    def path_vector(self, x, y) -> np.ndarray:
        """Integer direction of the tree path x -> y."""
        v = np.zeros(self.n, dtype=np.int64)
        for eid, s in self.tree_path(x, y):
            v += s * self.dir[eid]
        return v


def _tree_path(net, parent, x, y):
    """Path x -> y through the rooted tree, as (edge id, traversal sign)."""

    def depth_of(v):
        d = 0
        while parent[v] is not None:
            v = parent[v][0]
            d += 1
        return d

    up_x, up_y = [], []
    ax, ay = x, y
    dx, dy = depth_of(ax), depth_of(ay)
    while dx > dy:
        p, eid = parent[ax]
        up_x.append((eid, 1 if net.edge(eid).tail == ax else -1))
        ax = p
        dx -= 1
    while dy > dx:
        p, eid = parent[ay]
        up_y.append((eid, 1 if net.edge(eid).tail == ay else -1))
        ay = p
        dy -= 1
    while ax != ay:
        p, eid = parent[ax]
        up_x.append((eid, 1 if net.edge(eid).tail == ax else -1))
        ax = p
        p, eid = parent[ay]
        up_y.append((eid, 1 if net.edge(eid).tail == ay else -1))
        ay = p
    return up_x + [(eid, -s) for eid, s in reversed(up_y)]


def build_representation(net: CreditNetwork, tree_hint=None) -> SpanningRepresentation:
    """Canonical representation: BFS tree from the lowest vertex id, tree
    edges mapped to the standard basis in discovery order.  A tree_hint (list
    of edge ids forming a spanning tree) overrides the tree choice."""
    if not net.is_connected():
        raise RepresentationError("graph is disconnected")
    n = len(net.vertices) - 1
    parent = {v: None for v in net.vertices}
    tree_order = []

    if tree_hint is not None:
        hint = list(tree_hint)
        if len(hint) != n or len(set(hint)) != n:
            raise RepresentationError("tree hint must list n distinct edge ids")
        adj = {v: [] for v in net.vertices}
        for eid in hint:
            try:
                e = net.edge(eid)
            except KeyError:
                raise RepresentationError(f"tree hint names unknown edge {eid!r}")
            adj[e.tail].append((e.head, eid))
            adj[e.head].append((e.tail, eid))
        root = min(net.vertices)
        seen = {root}
        queue = [root]
        while queue:
            v = queue.pop(0)
            for w, eid in adj[v]:
                if w not in seen:
                    seen.add(w)
                    parent[w] = (v, eid)
                    queue.append(w)
        if len(seen) != len(net.vertices):
            raise RepresentationError("tree hint does not span the graph")
        tree_order = hint
    else:
        root = min(net.vertices)
        seen = {root}
        queue = [root]
        while queue:
            v = queue.pop(0)
            for i, _s in sorted(net._adj[v], key=lambda t: net.edges[t[0]].id):
                e = net.edges[i]
                w = e.head if e.tail == v else e.tail
                if w not in seen:
                    seen.add(w)
                    parent[w] = (v, e.id)
                    tree_order.append(e.id)
                    queue.append(w)

    dir_map = {}
    for k, eid in enumerate(tree_order):
        vec = np.zeros(n, dtype=np.int64)
        vec[k] = 1
        dir_map[eid] = vec
    # Chords: signed sum of tree directions along the tree path tail -> head.
    for e in net.edges:
        if e.id not in dir_map:
            vec = np.zeros(n, dtype=np.int64)
            for eid, s in _tree_path(net, parent, e.tail, e.head):
                vec += s * dir_map[eid]
            dir_map[e.id] = vec
    return SpanningRepresentation(net, tree_order, dir_map, parent)


def direction_of_path(rep: SpanningRepresentation, path, edge_choice=None) -> np.ndarray:
    """Signed direction sum along an explicit vertex path.

    Where parallel edges exist between consecutive vertices, edge_choice must
    name the edge to use (one id per hop).
    """
    net = rep.net
    total = np.zeros(rep.n, dtype=np.int64)
    for hop, (x, y) in enumerate(zip(path, path[1:])):
        cands = net.edges_between(x, y)
        if not cands:
            raise RepresentationError(f"vertices {x!r}, {y!r} are not adjacent")
        if edge_choice is not None:
            cands = [e for e in cands if e.id == edge_choice[hop]]
            if not cands:
                raise RepresentationError(f"edge choice at hop {hop} not between {x!r},{y!r}")
        elif len(cands) > 1:
            raise RepresentationError(f"parallel edges between {x!r},{y!r}: edge choice required")
        e = cands[0]
        total += rep.dir[e.id] if e.tail == x else -rep.dir[e.id]
    return total


def score(rep: SpanningRepresentation, cfg: EscrowConfiguration) -> StatePoint:
    """Score map: sum over positively-oriented edges of owned(e) * dir(e)."""
    z = np.zeros(rep.n)
    for e in rep.net.edges:
        z += cfg.owned[e.id] * rep.dir[e.id]
    return StatePoint(z)


def membership(rep: SpanningRepresentation, net: CreditNetwork, z,
               tol_eq: float = TOL_EQ) -> bool:
    """Is z in the configuration zonotope Z?

    Z is the Minkowski sum of the capacity-scaled directions: z is a member
    iff some lambda in [0,1]^m satisfies sum lambda_e c(e) dir(e) = z.
    """
    zv = np.asarray(z.coords if isinstance(z, StatePoint) else z, dtype=float)
    if not np.all(np.isfinite(zv)):
        raise RepresentationError("state point must be finite")
    scale = max(1.0, float(np.max(np.abs(zv))) if zv.size else 1.0)
    resid, _lam = lp_feasible_kernel(rep.generators, zv, np.ones(len(net.edges)))
    return bool(resid <= tol_eq * scale)


def point_to_configuration(rep, net, z) -> EscrowConfiguration:
    """A representative configuration of the class mapping to z (any feasible
    lambda works; they are all cycle-equivalent)."""
    zv = np.asarray(z.coords if isinstance(z, StatePoint) else z, dtype=float)
    ok, lam = lp.feasible(rep.generators, zv, np.ones(len(net.edges)))
    if not ok:
        raise RepresentationError("point is outside the configuration zonotope")
    owned = {e.id: float(lam[i]) * e.capacity for i, e in enumerate(net.edges)}
    return EscrowConfiguration(net, owned)


def transaction_vector(rep: SpanningRepresentation, tx: Transaction) -> np.ndarray:
    """Vector of a transaction: k times the direction of any sender->receiver
    path (the tree path is used; path choice cannot matter)."""
    return tx.amount * rep.path_vector(tx.sender, tx.receiver).astype(float)
