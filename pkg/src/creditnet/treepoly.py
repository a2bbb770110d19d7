"""Weighted spanning-tree generating polynomial and friends.

Gamma(c) = sum over spanning trees of the product of edge capacities; by the
matrix-tree theorem it equals any cofactor of the weighted Laplacian.
Contractions identify vertex pairs (self-loops produced by contraction are
dropped: they belong to no spanning tree).  Effective resistance is
Gamma_{x=y}/Gamma, computed by a Laplacian solve.  A brute-force subset
determinant sum serves as the zonotope-volume oracle.

Determinants are plain floating-point LU; values can overflow for large
capacities.  Desk scale only.
"""

from fractions import Fraction
from itertools import combinations

import numpy as np

from .network import CreditNetwork

MAX_ENUM_EDGES = 16


class TreePolyError(Exception):
    pass


def _laplacian(nclasses, edge_classes, weights):
    L = np.zeros((nclasses, nclasses))
    for (a, b), w in zip(edge_classes, weights):
        if a == b:
            continue
        L[a, a] += w
        L[b, b] += w
        L[a, b] -= w
        L[b, a] -= w
    return L


def _classes(net: CreditNetwork, identified_pairs=()):
    """Vertex -> contracted class index, after merging the given pairs."""
    parent = {v: v for v in net.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in identified_pairs:
        net.vertex_index(a)
        net.vertex_index(b)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    roots = sorted({find(v) for v in net.vertices})
    rid = {r: i for i, r in enumerate(roots)}
    return {v: rid[find(v)] for v in net.vertices}, len(roots)


def _connected(nclasses, edge_classes):
    if nclasses == 0:
        return False
    adj = [[] for _ in range(nclasses)]
    for a, b in edge_classes:
        if a != b:
            adj[a].append(b)
            adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == nclasses


def gamma_contracted(net: CreditNetwork, identified_pairs) -> float:
    """Gamma of the multigraph with each listed vertex pair merged."""
    cls, nc = _classes(net, identified_pairs)
    if nc == 0:
        raise TreePolyError("empty graph after contraction")
    if nc == 1:
        return 1.0  # single vertex: one (empty) spanning tree
    edge_classes = [(cls[e.tail], cls[e.head]) for e in net.edges]
    if not _connected(nc, edge_classes):
        raise TreePolyError("graph is disconnected (Gamma undefined)")
    L = _laplacian(nc, edge_classes, [e.capacity for e in net.edges])
    return float(np.linalg.det(L[1:, 1:]))


def gamma(net: CreditNetwork) -> float:
    """Weighted spanning-tree count at the network's capacities."""
    return gamma_contracted(net, [])


def effective_resistance(net: CreditNetwork, x, y) -> float:
    """Resistance between x and y with conductances c(e); equals
    Gamma_{x=y}/Gamma."""
    net.vertex_index(x)
    net.vertex_index(y)
    if x == y:
        raise TreePolyError("effective resistance needs distinct vertices")
    cls, nc = _classes(net)
    edge_classes = [(cls[e.tail], cls[e.head]) for e in net.edges]
    if not _connected(nc, edge_classes):
        raise TreePolyError("graph is disconnected")
    L = _laplacian(nc, edge_classes, [e.capacity for e in net.edges])
    rhs = np.zeros(nc)
    rhs[cls[x]] = 1.0
    rhs[cls[y]] = -1.0
    # Ground one vertex; the grounded system is nonsingular on a connected graph.
    keep = [i for i in range(nc) if i != cls[y]]
    phi = np.zeros(nc)
    phi[keep] = np.linalg.solve(L[np.ix_(keep, keep)], rhs[keep])
    return float(phi[cls[x]] - phi[cls[y]])


def _gamma_exact(net: CreditNetwork, identified_pairs):
    """Gamma as an exact rational (capacities converted exactly from their
    binary representations)."""
    cls, nc = _classes(net, identified_pairs)
    if nc == 1:
        return Fraction(1)
    edge_classes = [(cls[e.tail], cls[e.head]) for e in net.edges]
    if not _connected(nc, edge_classes):
        raise TreePolyError("graph is disconnected (Gamma undefined)")
    n = nc - 1
    L = [[Fraction(0)] * n for _ in range(n)]
    for (a, b), e in zip(edge_classes, net.edges):
        if a == b:
            continue
        w = Fraction(e.capacity)
        if a:
            L[a - 1][a - 1] += w
        if b:
            L[b - 1][b - 1] += w
        if a and b:
            L[a - 1][b - 1] -= w
            L[b - 1][a - 1] -= w
    # Fraction-free elimination keeps everything exact.
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if L[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            L[col], L[piv] = L[piv], L[col]
            det = -det
        det *= L[col][col]
        for r in range(col + 1, n):
            f = L[r][col] / L[col][col]
            for c in range(col, n):
                L[r][c] -= f * L[col][c]
    return det


def rayleigh_gap(net: CreditNetwork, pair1, pair2) -> float:
    """Gamma_{a=b} Gamma_{x=y} - Gamma_{x=y,a=b} Gamma; nonnegative because
    the graphic matroid is Rayleigh.  The two identifications must differ.

    Evaluated in exact rational arithmetic so the sign (and exact zeros) are
    trustworthy even when the products are large.
    """
    (x, y), (a, b) = pair1, pair2
    if {x, y} == {a, b}:
        raise TreePolyError("rayleigh_gap needs two distinct vertex pairs")
    g = _gamma_exact(net, [])
    gxy = _gamma_exact(net, [(x, y)])
    gab = _gamma_exact(net, [(a, b)])
    gboth = _gamma_exact(net, [(x, y), (a, b)])
    return float(gab * gxy - gboth * g)


def enumerate_trees(net: CreditNetwork):
    """All spanning trees as sets of edge ids (exponential; small graphs)."""
    m = len(net.edges)
    if m > MAX_ENUM_EDGES:
        raise TreePolyError(f"too many edges for enumeration ({m} > {MAX_ENUM_EDGES})")
    n = len(net.vertices) - 1
    if n < 0:
        return []
    if n == 0:
        return [set()]
    vid = {v: i for i, v in enumerate(net.vertices)}
    trees = []
    for combo in combinations(range(m), n):
        parent = list(range(n + 1))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        acyclic = True
        for ei in combo:
            e = net.edges[ei]
            ra, rb = find(vid[e.tail]), find(vid[e.head])
            if ra == rb:
                acyclic = False
                break
            parent[ra] = rb
        if acyclic:
            trees.append({net.edges[ei].id for ei in combo})
    return trees


def volume_oracle(rep, net: CreditNetwork) -> float:
    """Zonotope volume by brute force: sum over n-subsets of edges of
    |det| of the capacity-scaled direction columns."""
    m = len(net.edges)
    if m > MAX_ENUM_EDGES:
        raise TreePolyError(f"too many edges for enumeration ({m} > {MAX_ENUM_EDGES})")
    n = rep.n
    G = rep.generators
    total = 0.0
    for combo in combinations(range(m), n):
        total += abs(np.linalg.det(G[:, combo]))
    return total
