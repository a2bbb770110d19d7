"""State sampling: exact uniform sampling of the configuration zonotope via
the recursive slab decomposition, and hit-and-run as an independent check.

The exact sampler processes edges last-to-first with the basis tree ordered
first.  At each level the zonotope Z_k splits into Z_{k-1} and a slab
(the visible surface swept along the last generator); the slab's volume
fraction is c(e_k) times the effective resistance across e_k in the current
(possibly contracted) multigraph.  Choosing the slab projects the remaining
generators perpendicular to the last one, which is exactly contraction of
that edge; rejecting it deletes the edge.  Reaching a linearly independent
generator set (a forest) finishes with independent uniform coefficients.

States reached by the recursion are memoized per (prefix length, contracted
edge set), so repeated sampling mostly costs RNG draws plus the occasional
lifting LP.
"""

import weakref
from dataclasses import dataclass

import numpy as np

from ._kernels import lp_solve_kernel
from .network import CreditNetwork
from .representation import SpanningRepresentation, StatePoint, membership

TOL_EQ = 1e-9


class SamplerError(Exception):
    pass


@dataclass
class SamplerConfig:
    seed: int = 0
    burn_in: int = -1  # -1: default 100 * n
    thinning: int = -1  # -1: default 10 * n
    tolerance: float = TOL_EQ

    def __post_init__(self):
        if (self.burn_in < 0 and self.burn_in != -1) or (self.thinning < 0 and self.thinning != -1):
            raise SamplerError("burn_in and thinning must be nonnegative")


class _Level:
    __slots__ = ("independent", "W", "q", "cls")

    def __init__(self, independent, W, q, cls):
        self.independent = independent
        self.W = W  # (k, n) projected generator directions at this level
        self.q = q  # slab-branch probability for the last edge (dependent case)
        self.cls = cls


class ExactZonotopeSampler:
    """Exactly uniform sampler over the configuration zonotope."""

    def __init__(self, rep: SpanningRepresentation, net: CreditNetwork):
        if not net.is_connected():
            raise SamplerError("graph is disconnected")
        self.rep = rep
        self.net = net
        # Edge processing order: basis tree first, then the chords.
        tree = list(rep.basis_tree)
        chords = [eid for eid in net.edge_ids() if eid not in set(tree)]
        self.order = tree + chords
        self.V = np.array([rep.dir[eid] for eid in self.order], dtype=float)
        self.caps = np.array([net.edge(eid).capacity for eid in self.order])
        self.ends = [(net.vertex_index(net.edge(eid).tail),
                      net.vertex_index(net.edge(eid).head)) for eid in self.order]
        self.nv = len(net.vertices)
        self.n = rep.n
        self._levels = {}

    # -- state machinery ---------------------------------------------------

    def _level(self, k, cmask) -> _Level:
        key = (k, cmask)
        lv = self._levels.get(key)
        if lv is None:
            lv = self._build_level(k, cmask)
            self._levels[key] = lv
        return lv

    def _build_level(self, k, cmask):
        # Vertex classes after contracting the masked edges.
        parent = list(range(self.nv))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        contracted = [j for j in range(len(self.order)) if cmask >> j & 1]
        for j in contracted:
            a, b = self.ends[j]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        cls = [find(i) for i in range(self.nv)]

        # Projected directions: components perpendicular to the span of the
        # contracted generators.
        W = self.V[:k].copy()
        if contracted:
            C = self.V[contracted].T  # (n, |contracted|)
            U, sv, _vt = np.linalg.svd(C, full_matrices=False)
            Q = U[:, sv > 1e-9]
            W = W - (W @ Q) @ Q.T

        # Forest test on the active prefix (self-loops excluded: their
        # projected direction is zero and they generate nothing).
        fparent = list(parent)

        def ffind(i):
            while fparent[i] != i:
                fparent[i] = fparent[fparent[i]]
                i = fparent[i]
            return i

        independent = True
        for j in range(k):
            a, b = self.ends[j]
            ra, rb = ffind(a), ffind(b)
            if ra == rb:
                if cls[a] != cls[b]:
                    independent = False
                    break
                continue  # self-loop in the contracted graph: inert
            fparent[ra] = rb
        if independent:
            return _Level(True, W, 0.0, cls)

        # Slab probability for the last active edge: c * effective resistance
        # in the contracted multigraph on the active edges.
        last = k - 1
        ax, ay = self.ends[last]
        if cls[ax] == cls[ay]:
            q = 0.0
        else:
            q = self.caps[last] * self._resistance(k, cls, ax, ay)
        return _Level(False, W, min(max(q, 0.0), 1.0), cls)

    def _resistance(self, k, cls, ax, ay):
        ids = sorted({cls[i] for i in range(self.nv)})
        rid = {c: i for i, c in enumerate(ids)}
        nc = len(ids)
        L = np.zeros((nc, nc))
        adj = [set() for _ in range(nc)]
        for j in range(k):
            a, b = rid[cls[self.ends[j][0]]], rid[cls[self.ends[j][1]]]
            if a == b:
                continue
            w = self.caps[j]
            L[a, a] += w
            L[b, b] += w
            L[a, b] -= w
            L[b, a] -= w
            adj[a].add(b)
            adj[b].add(a)
        x, y = rid[cls[ax]], rid[cls[ay]]
        # Restrict to the component containing x (deletions elsewhere may
        # have disconnected other parts; x and y share a component via the
        # edge whose resistance we are computing).
        comp = {x}
        stack = [x]
        while stack:
            v = stack.pop()
            for w2 in adj[v]:
                if w2 not in comp:
                    comp.add(w2)
                    stack.append(w2)
        keep = sorted(comp - {y})
        sub = L[np.ix_(keep, keep)]
        rhs = np.zeros(len(keep))
        rhs[keep.index(x)] = 1.0
        phi = np.linalg.solve(sub, rhs)
        return float(phi[keep.index(x)])

    # -- sampling ----------------------------------------------------------

    def _lift(self, k, lv: _Level, p):
        """Map a point of the projected zonotope back to the visible surface:
        maximize alpha with p + alpha * w_last inside the level's Z_{k-1}."""
        w_last = lv.W[k - 1]
        nw = float(np.linalg.norm(w_last))
        R = float(np.sum(self.caps[: k - 1] * np.linalg.norm(lv.W[: k - 1], axis=1))) / nw + 1.0
        mvar = k - 1
        A = np.empty((self.n, mvar + 1))
        A[:, :mvar] = (lv.W[:mvar] * self.caps[:mvar, None]).T
        A[:, mvar] = -w_last
        b = p - R * w_last
        u = np.ones(mvar + 1)
        u[mvar] = 2.0 * R
        cobj = np.zeros(mvar + 1)
        cobj[mvar] = 1.0
        st, val, x, resid = lp_solve_kernel(cobj, A, b, u)
        if st != 0 or resid > 1e-7 * max(1.0, float(np.max(np.abs(b)))):
            raise SamplerError("lifting LP failed")
        alpha = x[mvar] - R
        return p + alpha * w_last

    def _draw(self, k, cmask, rng):
        if k == 0:
            return np.zeros(self.n)
        lv = self._level(k, cmask)
        if lv.independent:
            lam = rng.random(k)
            return (lam * self.caps[:k]) @ lv.W
        q = lv.q
        take_slab = q >= 1.0 - 1e-12 or (q > 1e-15 and rng.random() < q)
        if not take_slab:
            return self._draw(k - 1, cmask, rng)
        p = self._draw(k - 1, cmask | (1 << (k - 1)), rng)
        s = self._lift(k, lv, p)
        lam = 1.0 - rng.random()  # uniform on (0, 1]
        return s + lam * self.caps[k - 1] * lv.W[k - 1]

    def sample(self, rng) -> np.ndarray:
        return self._draw(len(self.order), 0, rng)

    def sample_many(self, count, rng) -> np.ndarray:
        out = np.empty((count, self.n))
        for i in range(count):
            out[i] = self._draw(len(self.order), 0, rng)
        return out


_sampler_cache = weakref.WeakKeyDictionary()


def _exact_sampler(rep, net) -> ExactZonotopeSampler:
    s = _sampler_cache.get(rep)
    if s is None or s.net is not net:
        s = ExactZonotopeSampler(rep, net)
        _sampler_cache[rep] = s
    return s


def sample_uniform_exact(rep, net, rng) -> StatePoint:
    """One exactly uniform state point (sampler instances are cached per
    representation, so repeated calls are cheap)."""
    return StatePoint(_exact_sampler(rep, net).sample(rng))


def chord_extent(rep, net, z, d, tol_eq: float = TOL_EQ):
    """Extent [t_min, t_max] of {t : z + t d in Z} for a unit direction d."""
    zv = np.asarray(z.coords if isinstance(z, StatePoint) else z, dtype=float)
    if not membership(rep, net, zv, tol_eq=max(tol_eq, 1e-8)):
        raise SamplerError("chord start point is outside the zonotope")
    d = np.asarray(d, dtype=float)
    tmin, tmax = _chord(rep.generators, zv, d)
    return min(tmin, 0.0), max(tmax, 0.0)


def _chord(G, z, d):
    n, m = G.shape
    R = float(np.sum(np.linalg.norm(G, axis=0))) / max(float(np.linalg.norm(d)), 1e-300) + 1.0
    A = np.empty((n, m + 1))
    A[:, :m] = G
    A[:, m] = -d
    b = z - R * d
    u = np.ones(m + 1)
    u[m] = 2.0 * R
    cobj = np.zeros(m + 1)
    cobj[m] = 1.0
    st1, _v1, x1, r1 = lp_solve_kernel(cobj, A, b, u)
    st2, _v2, x2, r2 = lp_solve_kernel(-cobj, A, b, u)
    scale = max(1.0, float(np.max(np.abs(b))))
    if st1 != 0 or st2 != 0 or r1 > 1e-7 * scale or r2 > 1e-7 * scale:
        raise SamplerError("chord LP failed")
    return x2[m] - R, x1[m] - R


def hit_and_run(rep, net, cfg: SamplerConfig, count):
    """Hit-and-run over the configuration zonotope (uniform target).

    Starts at the centroid, burns in, then emits one state per `thinning`
    steps.  Defaults: burn_in = 100 n, thinning = 10 n.
    """
    if not net.is_connected():
        raise SamplerError("graph is disconnected")
    n = rep.n
    burn_in = cfg.burn_in if cfg.burn_in >= 0 else 100 * n
    thinning = max(1, cfg.thinning if cfg.thinning >= 0 else 10 * n)
    rng = np.random.default_rng(cfg.seed)
    G = rep.generators
    z = 0.5 * G.sum(axis=1)  # center of symmetry, always interior
    out = []

    def step(z):
        d = rng.standard_normal(n)
        nd = float(np.linalg.norm(d))
        if nd < 1e-12:
            return z
        d /= nd
        tmin, tmax = _chord(G, z, d)
        t = rng.uniform(min(tmin, 0.0), max(tmax, 0.0))
        return z + t * d

    for _ in range(burn_in):
        z = step(z)
    for _ in range(count):
        for _ in range(thinning):
            z = step(z)
        out.append(StatePoint(z.copy()))
    return out
