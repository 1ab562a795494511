"""Time the discord oracle kernels: compiled Cython vs numpy/scipy fallback.

    python3 benchmarks/bench_discord_oracle.py [--states N] [--starts K] [--repeat R]

Reports per-state wall time for both the raw objective (one trace distance to a
classical-quantum state) and the full multi-start minimisation, plus the largest
disagreement in the minimised value between the two backends.
"""
import argparse
import statistics
import time

import numpy as np

from xsym import kernels
from xsym.correlations import discord_oracle, discord_x, oracle_starts
from xsym.qmat import random_x_state


def _best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_objective(backend, states, starts, repeat):
    kern = kernels.get_backend(backend)
    mats = [x.to_dense() for x in states]

    def run():
        for m, t in zip(mats, starts):
            kern.cq_trace_distance(t[0], m)

    return _best_of(run, repeat) / len(states)


def bench_oracle(backend, states, n_starts, repeat):
    values = []

    def run():
        values.clear()
        values.extend(discord_oracle(x, n_starts=n_starts, backend=backend) for x in states)

    return _best_of(run, repeat) / len(states), np.array(values)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--states", type=int, default=5)
    ap.add_argument("--starts", type=int, default=32)
    ap.add_argument("--repeat", type=int, default=1)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    states = [random_x_state(rng, coherences="real") for _ in range(args.states)]
    starts = [oracle_starts(x.to_dense(), 2, rng) for x in states]
    exact = np.array([discord_x(x) for x in states])

    backends = ["python"] + (["cython"] if kernels.compiled is not None else [])
    rows = {}
    for name in backends:
        obj = bench_objective(name, states, starts, max(args.repeat, 5))
        per_state, vals = bench_oracle(name, states, args.starts, args.repeat)
        rows[name] = (obj, per_state, vals)
        print(f"{name:>7}: objective {obj * 1e6:9.1f} us/call   "
              f"oracle {per_state * 1e3:9.1f} ms/state   "
              f"max |oracle - closed form| {np.max(np.abs(vals - exact)):.2e}")

    if len(rows) == 2:
        (o_py, s_py, v_py), (o_cy, s_cy, v_cy) = rows["python"], rows["cython"]
        print(f"speed-up: objective x{o_py / o_cy:.1f}, oracle x{s_py / s_cy:.1f}; "
              f"backend disagreement {np.max(np.abs(v_py - v_cy)):.2e} "
              f"(median {statistics.median(np.abs(v_py - v_cy)):.1e})")
    else:
        print("compiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
