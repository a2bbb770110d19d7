"""Benchmark the jitted kernels against the pure-numpy fallback.

Runs itself twice in subprocesses, once with CREDITNET_DISABLE_NUMBA=1, and
prints a comparison table.  Invoke with no arguments:

    python3 benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import time

import numpy as np


def bench_simplex(iters=300):
    from creditnet._kernels import lp_solve_kernel

    rng = np.random.default_rng(0)
    probs = []
    for _ in range(iters):
        p, m = 4, 10
        A = rng.normal(size=(p, m))
        u = rng.uniform(0.5, 2.0, size=m)
        b = A @ (rng.uniform(0, 1, size=m) * u)
        c = rng.normal(size=m)
        probs.append((c, A, b, u))
    lp_solve_kernel(*probs[0])  # warm up / compile
    start = time.perf_counter()
    for c, A, b, u in probs:
        lp_solve_kernel(c, A, b, u)
    return time.perf_counter() - start


def bench_chain(steps=20000):
    from creditnet import CreditNetwork, build_representation
    from creditnet.samplers import SamplerConfig
    from creditnet.simulate import SizeDist, TransactionModel, run

    net = CreditNetwork(
        ["a", "b", "c", "d"],
        [("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0),
         ("e3", "c", "d", 1.0), ("e4", "a", "d", 1.0)])
    rep = build_representation(net)
    pairs = [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")]
    model = TransactionModel(pairs, [1.0] * 4,
                             [SizeDist("uniform", (0.5,))] * 4)
    run(rep, net, model, 100, SamplerConfig(seed=0))  # warm up / compile
    start = time.perf_counter()
    run(rep, net, model, steps, SamplerConfig(seed=1))
    return time.perf_counter() - start


def bench_membership(count=2000):
    from creditnet import CreditNetwork, build_representation
    from creditnet._kernels import membership_batch_kernel

    net = CreditNetwork(
        ["a", "b", "c", "d"],
        [("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0),
         ("e3", "c", "d", 1.0), ("e4", "a", "d", 1.0)])
    rep = build_representation(net)
    rng = np.random.default_rng(2)
    pts = rng.uniform(-1, 2, size=(count, rep.n))
    u = np.ones(len(net.edges))
    membership_batch_kernel(rep.generators, u, pts[:10], 1e-9)  # warm up
    start = time.perf_counter()
    membership_batch_kernel(rep.generators, u, pts, 1e-9)
    return time.perf_counter() - start


BENCHES = {
    "simplex (300 solves, 4x10)": bench_simplex,
    "transaction chain (20k steps)": bench_chain,
    "batch membership (2000 points)": bench_membership,
}


def run_child():
    from creditnet._kernels import USE_NUMBA
    results = {name: fn() for name, fn in BENCHES.items()}
    print(json.dumps({"numba": USE_NUMBA, "results": results}))


def main():
    if "--child" in sys.argv:
        run_child()
        return
    rows = {}
    for disable in ("0", "1"):
        env = dict(os.environ, CREDITNET_DISABLE_NUMBA=disable)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--child"],
            env=env, capture_output=True, text=True, check=True)
        doc = json.loads(out.stdout.strip().splitlines()[-1])
        rows["numba" if doc["numba"] else "numpy"] = doc["results"]
    if set(rows) != {"numba", "numpy"}:
        print("warning: numba unavailable; both runs used the numpy fallback")
    width = max(len(n) for n in BENCHES) + 2
    print(f"{'benchmark':<{width}}{'numba':>10}{'numpy':>10}{'speedup':>10}")
    for name in BENCHES:
        a = rows.get("numba", rows.get("numpy"))[name]
        b = rows.get("numpy", rows.get("numba"))[name]
        print(f"{name:<{width}}{a:>9.3f}s{b:>9.3f}s{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
