"""Compare the compiled kernels with the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 3]

Prints one line per kernel with the best wall time of each backend, the
speed-up and the max abs difference between their outputs.
"""

import argparse
import time

import numpy as np

from brlab import _accel
from brlab.models import torus_model
from brlab.space import uniform_grid


def best_of(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    sp1 = uniform_grid("torus-periodic", 4096)
    sp2 = uniform_grid("torus-periodic", 64, dims=2)
    rng = np.random.default_rng(0)
    v1 = rng.uniform(size=sp1.size)
    v2 = rng.uniform(size=sp2.size)
    r1 = sp1.min_spacing * 2.0 ** np.arange(12)
    r2 = sp2.min_spacing * 2.0 ** np.arange(7)
    m = torus_model(1, 256, 1024)
    c = rng.standard_normal(m.truncation_K) + 1j * rng.standard_normal(m.truncation_K)
    cuts = np.arange(1, m.truncation_K + 1, 2)
    yield "ball_maximal 1d N=4096", lambda impl: _accel.ball_maximal(
        sp1.points, sp1._kind, sp1.period, v1, sp1.weights, r1, impl=impl)
    yield "ball_maximal 2d N=4096", lambda impl: _accel.ball_maximal(
        sp2.points, sp2._kind, sp2.period, v2, sp2.weights, r2, impl=impl)
    yield "greedy_net 2d N=4096", lambda impl: _accel.greedy_net(
        sp2.points, sp2._kind, sp2.period, 3 * sp2.min_spacing, impl=impl)[1]
    yield "count_within 1d N=4096", lambda impl: _accel.count_within(
        sp1.points, sp1._kind, sp1.period, 64 * sp1.min_spacing, impl=impl)
    yield "prefix_abs_max N=1024 K=513", lambda impl: _accel.prefix_abs_max(
        m.basis, c, cuts, impl=impl)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    impls = _accel.implementations()
    print(f"active backend: {_accel.BACKEND}")
    if "cython" not in impls:
        print("compiled extension not built; only the fallback is timed")
    for name, fn in cases():
        tp, outp = best_of(lambda: fn(impls["python"]), args.repeat)
        line = f"{name:<30} python {tp * 1e3:9.2f} ms"
        if "cython" in impls:
            tc, outc = best_of(lambda: fn(impls["cython"]), args.repeat)
            diff = float(np.max(np.abs(np.asarray(outp, float) - np.asarray(outc, float))))
            line += f"  cython {tc * 1e3:9.2f} ms  speed-up {tp / tc:6.1f}x  max diff {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
