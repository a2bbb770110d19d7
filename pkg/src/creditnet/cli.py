"""Command-line front end.

Subcommands: analyze, sample, simulate, monotonicity, volume, verify.
Outputs are CSV with '#'-prefixed metadata header lines (seed, tolerances)
so runs can be reproduced from the artifact alone.

Exit codes: 0 success, 1 input error, 2 property violation.
"""

import argparse
import contextlib
import csv
import sys

import numpy as np
import yaml

from . import __version__, liquidity, samplers, simulate, treepoly
from .network import NetworkError, parse_network_text
from .representation import build_representation, membership
from .samplers import SamplerConfig
from .simulate import SizeDist, TransactionModel

TOL = 1e-9


class InputError(Exception):
    pass


def _load_net(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_network_text(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read network file: {exc}") from exc
    except NetworkError as exc:
        raise InputError(str(exc)) from exc


def _parse_pairs(text, net):
    if text == "all":
        out = []
        for i, x in enumerate(net.vertices):
            for y in net.vertices[i + 1:]:
                out.append((x, y))
        return out
    pairs = []
    for item in text.split(","):
        try:
            x, y = item.split(":")
        except ValueError:
            raise InputError(f"bad pair {item!r}; expected x:y") from None
        pairs.append((x, y))
    return pairs


def _parse_ks(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad k list {text!r}") from exc


def _writer(args):
    if args.out:
        return open(args.out, "w", encoding="utf-8", newline="")
    return contextlib.nullcontext(sys.stdout)


def _header(fh, args, extra=()):
    fh.write(f"# creditnet {__version__}\n")
    fh.write(f"# seed: {args.seed}\n")
    fh.write(f"# tol_eq: {TOL}\n")
    for line in extra:
        fh.write(f"# {line}\n")


def cmd_analyze(args):
    net, _cfg = _load_net(args.network)
    if not net.is_connected():
        raise InputError("graph is disconnected")
    pairs = _parse_pairs(args.pairs, net)
    ks = _parse_ks(args.k)
    with _writer(args) as fh:
        _header(fh, args)
        w = csv.writer(fh)
        w.writerow(["x", "y", "k", "exact_failure", "lower_bound", "tight", "method"])
        for x, y in pairs:
            for k in ks:
                rep = liquidity.report(net, x, y, k)
                w.writerow([x, y, k,
                            "" if rep.exact_failure is None else f"{rep.exact_failure:.12g}",
                            f"{rep.lower_bound_success:.12g}",
                            rep.tight, rep.method.value])
    return 0


def cmd_sample(args):
    net, _cfg = _load_net(args.network)
    rep = build_representation(net)
    rng = np.random.default_rng(args.seed)
    if args.method == "exact":
        sampler = samplers.ExactZonotopeSampler(rep, net)
        pts = sampler.sample_many(args.samples, rng) if args.samples else \
            np.zeros((0, rep.n))
    else:
        cfg = SamplerConfig(seed=args.seed, burn_in=args.burn_in, thinning=args.thin)
        pts = np.array([s.coords for s in
                        samplers.hit_and_run(rep, net, cfg, args.samples)]) \
            if args.samples else np.zeros((0, rep.n))
    with _writer(args) as fh:
        _header(fh, args, [f"method: {args.method}", f"samples: {args.samples}"])
        w = csv.writer(fh)
        w.writerow([f"z{i}" for i in range(rep.n)])
        for row in pts:
            w.writerow([f"{v:.12g}" for v in row])
    return 0


def _load_model(path, net):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read model file: {exc}") from exc
    if not isinstance(doc, dict) or "pairs" not in doc:
        raise InputError("model file needs a 'pairs' list")
    pairs, weights, dists = [], [], []
    try:
        for item in doc["pairs"]:
            pairs.append((str(item["a"]), str(item["b"])))
            weights.append(float(item.get("weight", 1.0)))
            size = item["size"]
            dists.append(SizeDist(str(size["kind"]),
                                  tuple(float(v) for v in size["params"])))
        model = TransactionModel(pairs, weights, dists)
    except (KeyError, TypeError, ValueError, simulate.ModelError) as exc:
        raise InputError(f"bad model file: {exc}") from exc
    monitor = [(str(m["x"]), str(m["y"]), float(m["k"]))
               for m in doc.get("monitor", [])]
    steps = int(doc.get("steps", 0))
    return model, monitor, steps


def cmd_simulate(args):
    net, _cfg0 = _load_net(args.network)
    rep = build_representation(net)
    model, monitor, file_steps = _load_model(args.model, net)
    steps = args.steps if args.steps is not None else file_steps
    cfg = SamplerConfig(seed=args.seed, burn_in=args.burn_in, thinning=args.thin)
    result = simulate.run(rep, net, model, steps, cfg, monitor=monitor)
    with _writer(args) as fh:
        _header(fh, args, [f"steps: {steps}"])
        for msg in result.warnings:
            fh.write(f"# warning: {msg}\n")
        w = csv.writer(fh)
        w.writerow(["x", "y", "k", "empirical_failure", "accepted", "steps", "recorded"])
        for (x, y, k), rate in result.failure_rates.items():
            w.writerow([x, y, k, f"{rate:.6g}", result.accepted, result.steps,
                        len(result.states)])
        if not result.failure_rates:
            w.writerow(["", "", "", "", result.accepted, result.steps,
                        len(result.states)])
        if args.dump_states:
            with open(args.dump_states, "w", encoding="utf-8", newline="") as sf:
                _header(sf, args)
                sw = csv.writer(sf)
                sw.writerow([f"z{i}" for i in range(rep.n)])
                for row in result.states:
                    sw.writerow([f"{v:.12g}" for v in row])
    return 0


def cmd_monotonicity(args):
    net, _cfg = _load_net(args.network)
    if not net.is_connected():
        raise InputError("graph is disconnected")
    rng = np.random.default_rng(args.seed)
    rows = []
    violated = False
    edges = [e for e in net.edges if e.capacity > 0]
    if not edges:
        raise InputError("network has no positive-capacity edge")
    for trial in range(args.trials):
        e = edges[rng.integers(len(edges))]
        k = float(rng.uniform(0.1, 0.9) * e.capacity)
        verts = net.vertices
        a, b = verts[rng.integers(len(verts))], verts[rng.integers(len(verts))]
        while a == b:
            b = verts[rng.integers(len(verts))]
        h = float(rng.uniform(0.0, 2.0))
        before, after = liquidity.monotonicity_experiment(
            net, (e.tail, e.head, k), (a, b, h))
        gap = after - before
        if gap < -TOL:
            violated = True
        rows.append((trial, e.tail, e.head, k, a, b, h, before, after, gap))
    with _writer(args) as fh:
        _header(fh, args, [f"trials: {args.trials}"])
        w = csv.writer(fh)
        w.writerow(["trial", "x", "y", "k", "a", "b", "h", "before", "after", "gap"])
        for r in rows:
            w.writerow([r[0], r[1], r[2], f"{r[3]:.12g}", r[4], r[5],
                        f"{r[6]:.12g}", f"{r[7]:.12g}", f"{r[8]:.12g}", f"{r[9]:.12g}"])
    return 2 if violated else 0


def cmd_volume(args):
    net, _cfg = _load_net(args.network)
    if not net.is_connected():
        raise InputError("graph is disconnected")
    rep = build_representation(net)
    g = treepoly.gamma(net)
    lines = [f"gamma_matrix_tree,{g:.12g}"]
    mismatch = False
    if len(net.edges) <= treepoly.MAX_ENUM_EDGES:
        total = 0.0
        for tree in treepoly.enumerate_trees(net):
            prod = 1.0
            for eid in tree:
                prod *= net.edge(eid).capacity
            total += prod
        vol = treepoly.volume_oracle(rep, net)
        lines.append(f"gamma_tree_enumeration,{total:.12g}")
        lines.append(f"volume_determinant_oracle,{vol:.12g}")
        ref = max(abs(g), 1.0)
        if abs(total - g) > 1e-9 * ref or abs(vol - g) > 1e-9 * ref:
            mismatch = True
    else:
        lines.append("gamma_tree_enumeration,skipped (too many edges)")
        lines.append("volume_determinant_oracle,skipped (too many edges)")
    with _writer(args) as fh:
        _header(fh, args)
        fh.write("quantity,value\n")
        for line in lines:
            fh.write(line + "\n")
        if mismatch:
            fh.write("# ERROR: volume identities disagree beyond 1e-9\n")
    return 2 if mismatch else 0


def cmd_verify(args):
    net, _cfg = _load_net(args.network)
    rep = build_representation(net)
    try:
        with open(args.states, "r", encoding="utf-8") as fh:
            rows = [line for line in fh if not line.startswith("#")]
    except OSError as exc:
        raise InputError(f"cannot read states file: {exc}") from exc
    reader = csv.reader(rows)
    header = next(reader, None)
    if header is None:
        raise InputError("states file is empty")
    bad = 0
    total = 0
    for row in reader:
        if not row:
            continue
        z = np.array([float(v) for v in row])
        total += 1
        if not membership(rep, net, z, tol_eq=1e-8):
            bad += 1
    print(f"verified {total} states, {bad} outside the zonotope")
    return 2 if bad else 0


def build_parser():
    p = argparse.ArgumentParser(prog="creditnet",
                                description="payment-channel network liquidity analysis")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--network", required=True, help="graph file (YAML)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="output file (default stdout)")

    sp = sub.add_parser("analyze", help="closed-form/bounded liquidity per pair")
    common(sp)
    sp.add_argument("--pairs", default="all", help="x:y[,x:y...] or 'all'")
    sp.add_argument("--k", default="1", help="transaction sizes, comma separated")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("sample", help="sample state points")
    common(sp)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--method", choices=["exact", "hitrun"], default="exact")
    sp.add_argument("--burn-in", dest="burn_in", type=int, default=-1)
    sp.add_argument("--thin", type=int, default=-1)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("simulate", help="run the transaction Markov chain")
    common(sp)
    sp.add_argument("--model", required=True, help="transaction model file (YAML)")
    sp.add_argument("--steps", type=int, default=None)
    sp.add_argument("--burn-in", dest="burn_in", type=int, default=-1)
    sp.add_argument("--thin", type=int, default=-1)
    sp.add_argument("--dump-states", default=None, help="also write recorded states CSV")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("monotonicity", help="randomized capacity-boost trials")
    common(sp)
    sp.add_argument("--trials", type=int, default=100)
    sp.set_defaults(func=cmd_monotonicity)

    sp = sub.add_parser("volume", help="zonotope volume three ways")
    common(sp)
    sp.set_defaults(func=cmd_volume)

    sp = sub.add_parser("verify", help="re-check sampled states against the zonotope")
    common(sp)
    sp.add_argument("--states", required=True, help="CSV produced by 'sample'")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, NetworkError, treepoly.TreePolyError,
            liquidity.LiquidityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
