"""Sequential random-transaction Markov chain over the configuration zonotope.

Each step draws a vertex pair from the model, a signed size from that pair's
distribution, and moves the state z to z - k * dir(pair) when the target is
still inside the zonotope (a negative draw is simply money flowing the other
way; the vector update needs no branch).  Feasibility is checked in score
space by zonotope membership, one LP per step.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import chain_kernel, lp_feasible_kernel
from .network import CreditNetwork
from .representation import SpanningRepresentation, StatePoint
from .samplers import SamplerConfig

TOL = 1e-9


class ModelError(Exception):
    pass


@dataclass(frozen=True)
class SizeDist:
    """Transaction-size distribution.

    kinds: "uniform" (symmetric, params (eps,)), "gaussian" (mean, sd),
    "point_mass" (k,), "shifted_uniform" (lo, hi).
    """

    kind: str
    params: tuple

    def __post_init__(self):
        k, p = self.kind, self.params
        if k == "uniform":
            if len(p) != 1 or p[0] <= 0:
                raise ModelError("uniform needs eps > 0")
        elif k == "gaussian":
            if len(p) != 2 or p[1] <= 0:
                raise ModelError("gaussian needs (mean, sd > 0)")
        elif k == "point_mass":
            if len(p) != 1:
                raise ModelError("point_mass needs (k,)")
        elif k == "shifted_uniform":
            if len(p) != 2 or p[1] <= p[0]:
                raise ModelError("shifted_uniform needs lo < hi")
        else:
            raise ModelError(f"unknown size distribution {k!r}")

    def sample(self, rng, size):
        k, p = self.kind, self.params
        if k == "uniform":
            return rng.uniform(-p[0], p[0], size)
        if k == "gaussian":
            return rng.normal(p[0], p[1], size)
        if k == "point_mass":
            return np.full(size, float(p[0]))
        return rng.uniform(p[0], p[1], size)

    @property
    def symmetric_support(self) -> bool:
        """Support contains an interval (-eps, eps) for some eps > 0."""
        k, p = self.kind, self.params
        if k in ("uniform", "gaussian"):
            return True
        if k == "shifted_uniform":
            return p[0] < 0 < p[1]
        return False

    @property
    def symmetric(self) -> bool:
        k, p = self.kind, self.params
        if k == "uniform":
            return True
        if k == "gaussian":
            return p[0] == 0
        if k == "point_mass":
            return p[0] == 0
        return p[0] == -p[1]


@dataclass
class TransactionModel:
    pairs: list  # [(a, b)], one orientation per unordered pair
    pair_weights: list
    size_dists: list  # SizeDist per pair

    def __post_init__(self):
        if not (len(self.pairs) == len(self.pair_weights) == len(self.size_dists)):
            raise ModelError("pairs, weights, size_dists must align")
        seen = set()
        for a, b in self.pairs:
            if a == b:
                raise ModelError("pair with equal endpoints")
            key = frozenset((a, b))
            if key in seen:
                raise ModelError(f"both orientations of pair {a!r},{b!r} listed")
            seen.add(key)
        w = np.array(self.pair_weights, dtype=float)
        if np.any(w <= 0):
            raise ModelError("pair weights must be positive")
        self.pair_weights = list(w / w.sum())


def validate_model(net: CreditNetwork, model: TransactionModel):
    """(connected, symmetric) per the stationary-measure conditions: connected
    needs (V, pairs) spanning and connected plus symmetric-interval support
    everywhere; symmetric needs every size distribution symmetric about 0."""
    adj = {v: set() for v in net.vertices}
    for a, b in model.pairs:
        net.vertex_index(a)
        net.vertex_index(b)
        adj[a].add(b)
        adj[b].add(a)
    seen = {net.vertices[0]}
    stack = [net.vertices[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    connected = len(seen) == len(net.vertices) and \
        all(d.symmetric_support for d in model.size_dists)
    symmetric = all(d.symmetric for d in model.size_dists)
    return {"connected": connected, "symmetric": symmetric}


@dataclass
class ChainState:
    current: StatePoint
    steps: int = 0
    accepted: int = 0


def step(rep: SpanningRepresentation, net, state: ChainState,
         model: TransactionModel, rng) -> ChainState:
    """One chain step: draw a pair and size, move iff the target is in Z."""
    i = rng.choice(len(model.pairs), p=model.pair_weights)
    a, b = model.pairs[i]
    k = float(model.size_dists[i].sample(rng, 1)[0])
    z = state.current.coords
    target = z - k * rep.path_vector(a, b)
    scale = max(1.0, float(np.max(np.abs(target))))
    resid, _lam = lp_feasible_kernel(rep.generators, target,
                                     np.ones(len(net.edges)))
    if resid <= TOL * scale:
        return ChainState(StatePoint(target), state.steps + 1, state.accepted + 1)
    return ChainState(state.current, state.steps + 1, state.accepted)


@dataclass
class RunResult:
    steps: int
    accepted: int
    states: np.ndarray  # recorded states, one row per record
    final: np.ndarray
    failure_rates: dict = field(default_factory=dict)  # (a, b, k) -> rate
    warnings: list = field(default_factory=list)


def run(rep: SpanningRepresentation, net: CreditNetwork, model: TransactionModel,
        steps: int, cfg: SamplerConfig, z0=None, monitor=()) -> RunResult:
    """Run the chain for `steps` steps from z0 (default: the all-zero
    configuration's score, the origin) and record states every `thinning`
    steps after `burn_in`.  `monitor` lists (x, y, k) transactions whose
    empirical failure frequency over the recorded states is reported."""
    from .liquidity import empirical_liquidity
    from .network import Transaction

    checks = validate_model(net, model)
    warnings = []
    if not checks["connected"]:
        warnings.append("transaction model is not connected; the stationary "
                        "measure may not be unique")
    n = rep.n
    burn_in = cfg.burn_in if cfg.burn_in >= 0 else min(100 * n, steps)
    thinning = max(1, cfg.thinning if cfg.thinning >= 0 else 10 * n)
    z = np.zeros(n) if z0 is None else np.asarray(
        z0.coords if isinstance(z0, StatePoint) else z0, dtype=float)
    if steps == 0:
        return RunResult(0, 0, np.zeros((0, n)), z, {}, warnings)

    rng = np.random.default_rng(cfg.seed)
    pair_idx = rng.choice(len(model.pairs), p=model.pair_weights,
                          size=steps).astype(np.int64)
    sizes = np.empty(steps)
    for i, dist in enumerate(model.size_dists):
        mask = pair_idx == i
        cnt = int(mask.sum())
        if cnt:
            sizes[mask] = dist.sample(rng, cnt)
    dirs = np.array([rep.path_vector(a, b) for a, b in model.pairs], dtype=float)
    n_record = max(0, (steps - burn_in + thinning - 1) // thinning)
    scale = max(1.0, float(np.sum(np.abs(rep.generators))))
    acc, rec, states, zfin = chain_kernel(
        rep.generators, np.ones(len(net.edges)), z, dirs, pair_idx, sizes,
        burn_in, thinning, n_record, TOL * scale)
    states = states[:rec]
    rates = {}
    for x, y, k in monitor:
        succ = empirical_liquidity(states, rep, net, Transaction(x, y, float(k)))
        rates[(x, y, float(k))] = 1.0 - succ
    return RunResult(steps, int(acc), states, zfin, rates, warnings)
