"""Credit-network core: topology, escrow configurations, max-flow feasibility,
and transaction execution.

A network is an undirected multigraph; the stored (tail, head) order of each
edge is its positive orientation.  An escrow configuration records, per edge,
how much of the capacity the tail vertex currently owns (the head owns the
rest).  A transaction from x to y of size k is feasible iff the directed
residual graph with arc capacities w(u, v) admits a flow of value k.
"""

from dataclasses import dataclass

import numpy as np
import yaml

FLOW_TOL = 1e-9


class NetworkError(Exception):
    pass


class InfeasibleTransaction(NetworkError):
    pass


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    capacity: float


class CreditNetwork:
    """Immutable multigraph with per-edge capacities.

    Parallel edges are permitted (and needed: the duplicated-edge liquidity
    argument splits one edge into two).  Self-loops and negative capacities
    are rejected.
    """

    def __init__(self, vertices, edges):
        vertices = list(vertices)
        if len(set(vertices)) != len(vertices):
            raise NetworkError("duplicate vertex id")
        self.vertices = vertices
        self._vidx = {v: i for i, v in enumerate(vertices)}
        built = []
        seen = set()
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(*e)
            if e.id in seen:
                raise NetworkError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            if e.tail not in self._vidx or e.head not in self._vidx:
                raise NetworkError(f"edge {e.id!r} references unknown vertex")
            if e.tail == e.head:
                raise NetworkError(f"edge {e.id!r} is a self-loop")
            if not (e.capacity >= 0):
                raise NetworkError(f"edge {e.id!r} has negative capacity")
            built.append(Edge(e.id, e.tail, e.head, float(e.capacity)))
        self.edges = built
        self._eidx = {e.id: i for i, e in enumerate(built)}
        # adjacency: vertex -> list of (edge index, +1 if vertex is the tail)
        self._adj = {v: [] for v in vertices}
        for i, e in enumerate(built):
            self._adj[e.tail].append((i, 1))
            self._adj[e.head].append((i, -1))

    def edge(self, edge_id) -> Edge:
        return self.edges[self._eidx[edge_id]]

    def edge_ids(self):
        return [e.id for e in self.edges]

    def edges_between(self, x, y):
        return [e for e in self.edges if {e.tail, e.head} == {x, y}]

    def vertex_index(self, v) -> int:
        if v not in self._vidx:
            raise NetworkError(f"unknown vertex {v!r}")
        return self._vidx[v]

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for i, _s in self._adj[v]:
                e = self.edges[i]
                w = e.head if e.tail == v else e.tail
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def __repr__(self):
        return f"CreditNetwork(|V|={len(self.vertices)}, |E|={len(self.edges)})"


class EscrowConfiguration:
    """Per-edge ownership: owned[e] is the tail vertex's share of capacity."""

    def __init__(self, net: CreditNetwork, owned):
        self.owned = {}
        for e in net.edges:
            v = float(owned.get(e.id, 0.0))
            if v < -FLOW_TOL or v > e.capacity + FLOW_TOL:
                raise NetworkError(f"owned({e.id!r})={v} outside [0, {e.capacity}]")
            self.owned[e.id] = min(max(v, 0.0), e.capacity)

    def w(self, net: CreditNetwork, u, v) -> float:
        """Amount u can push towards v across their direct edges (summed)."""
        total = 0.0
        for e in net.edges_between(u, v):
            total += self.owned[e.id] if e.tail == u else e.capacity - self.owned[e.id]
        return total


@dataclass(frozen=True)
class Transaction:
    sender: str
    receiver: str
    amount: float

    def __post_init__(self):
        if self.sender == self.receiver:
            raise NetworkError("sender equals receiver")


class Flow:
    """Signed per-edge flow: positive values run tail -> head."""

    def __init__(self, by_edge):
        self.by_edge = dict(by_edge)

    def amount(self, edge_id, forward=True) -> float:
        f = self.by_edge.get(edge_id, 0.0)
        if forward:
            return max(f, 0.0)
        return max(-f, 0.0)

    def value_at(self, net: CreditNetwork, vertex) -> float:
        """Net outflow at a vertex."""
        out = 0.0
        for i, s in net._adj[vertex]:
            out += s * self.by_edge.get(net.edges[i].id, 0.0)
        return out


def load_network(description: str) -> CreditNetwork:
    net, _cfg = parse_network_text(description)
    return net


def parse_network_text(description: str):
    """Parse the YAML graph format.

    Schema::

        vertices: [A, B, C]
        edges:
          - {id: e1, tail: A, head: B, capacity: 10}
        configuration: {e1: 5}   # optional; omitted edges default to 0

    Returns (CreditNetwork, EscrowConfiguration or None).
    """
    try:
        doc = yaml.safe_load(description)
    except yaml.YAMLError as exc:
        raise NetworkError(f"parse error: {exc}") from exc
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise NetworkError("network file needs 'vertices' and 'edges' keys")
    edges = []
    for item in doc["edges"]:
        try:
            edges.append(Edge(str(item["id"]), str(item["tail"]), str(item["head"]),
                              float(item["capacity"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise NetworkError(f"bad edge entry {item!r}: {exc}") from exc
    net = CreditNetwork([str(v) for v in doc["vertices"]], edges)
    cfg = None
    if "configuration" in doc and doc["configuration"] is not None:
        cfg = EscrowConfiguration(net, {str(k): float(v)
                                        for k, v in doc["configuration"].items()})
    return net, cfg


def _augmenting_path(net, residual, x, y):
    """BFS for a path with positive residual; returns list of (edge idx, sign)."""
    prev = {x: None}
    queue = [x]
    qi = 0
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        for i, s in net._adj[v]:
            cap = residual[i][0] if s == 1 else residual[i][1]
            if cap <= FLOW_TOL:
                continue
            e = net.edges[i]
            w = e.head if s == 1 else e.tail
            if w not in prev:
                prev[w] = (v, i, s)
                if w == y:
                    path = []
                    cur = y
                    while prev[cur] is not None:
                        pv, pi, ps = prev[cur]
                        path.append((pi, ps))
                        cur = pv
                    path.reverse()
                    return path
                queue.append(w)
    return None


def _max_flow(net, cfg, x, y, limit=np.inf):
    """Edmonds-Karp on the escrow residual graph, stopping at `limit`.

    Returns (value, signed flow per edge id).
    """
    net.vertex_index(x)
    net.vertex_index(y)
    if x == y:
        raise NetworkError("source equals sink")
    # residual[i] = [forward capacity, backward capacity] of edge i
    residual = []
    for e in net.edges:
        o = cfg.owned[e.id]
        residual.append([o, e.capacity - o])
    flow = {e.id: 0.0 for e in net.edges}
    total = 0.0
    while total < limit - FLOW_TOL:
        path = _augmenting_path(net, residual, x, y)
        if path is None:
            break
        bottleneck = limit - total
        for i, s in path:
            cap = residual[i][0] if s == 1 else residual[i][1]
            bottleneck = min(bottleneck, cap)
        for i, s in path:
            if s == 1:
                residual[i][0] -= bottleneck
                residual[i][1] += bottleneck
            else:
                residual[i][1] -= bottleneck
                residual[i][0] += bottleneck
            flow[net.edges[i].id] += s * bottleneck
        total += bottleneck
    return total, flow


def max_sendable(net: CreditNetwork, cfg: EscrowConfiguration, x, y) -> float:
    """Maximum amount x can send to y in configuration cfg."""
    value, _flow = _max_flow(net, cfg, x, y)
    return value


def is_feasible(net, cfg, tx: Transaction) -> bool:
    k = tx.amount
    if k < 0:
        return is_feasible(net, cfg, Transaction(tx.receiver, tx.sender, -k))
    if k == 0:
        net.vertex_index(tx.sender)
        net.vertex_index(tx.receiver)
        return True
    return max_sendable(net, cfg, tx.sender, tx.receiver) >= k - FLOW_TOL


def route_transaction(net, cfg, tx: Transaction) -> Flow:
    """Some feasible routing of tx: a max-flow truncated to the amount.

    Route choice does not matter downstream; any two routings of the same
    transaction land in the same cycle-equivalence class.
    """
    if tx.amount < 0:
        rev = route_transaction(net, cfg, Transaction(tx.receiver, tx.sender, -tx.amount))
        return Flow({eid: -f for eid, f in rev.by_edge.items()})
    if tx.amount == 0:
        return Flow({})
    value, flow = _max_flow(net, cfg, tx.sender, tx.receiver, limit=tx.amount)
    if value < tx.amount - FLOW_TOL:
        raise InfeasibleTransaction(
            f"{tx.sender}->{tx.receiver} amount {tx.amount} exceeds max {value:.12g}")
    return Flow(flow)


def execute(net, cfg, tx: Transaction, flow: Flow) -> EscrowConfiguration:
    """Apply a validated flow for tx; returns the new configuration."""
    for v in net.vertices:
        div = flow.value_at(net, v)
        want = 0.0
        if v == tx.sender:
            want = tx.amount
        elif v == tx.receiver:
            want = -tx.amount
        if abs(div - want) > FLOW_TOL:
            raise NetworkError(f"flow conservation violated at {v!r}")
    new_owned = {}
    for e in net.edges:
        f = flow.by_edge.get(e.id, 0.0)
        o = cfg.owned[e.id] - f
        if o < -FLOW_TOL or o > e.capacity + FLOW_TOL:
            raise NetworkError(f"flow violates capacity on edge {e.id!r}")
        new_owned[e.id] = min(max(o, 0.0), e.capacity)
    return EscrowConfiguration(net, new_owned)
