"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]

Each kernel runs on identical inputs under both backends; the script checks
that outputs agree and prints the best-of-R wall time and the speedup.
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np

from popre._kernels import _fallback
from popre.channel import alias_table, bitflip, build_channel_matrix, erasure, noise_mask_table
from popre.lp import _StandardForm, build_eta_lp
from popre.samples import pack_string


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def sampling_case(model, n, count):
    rng = np.random.default_rng(0)
    strings = ["".join(rng.choice(["0", "1"], n)) for _ in range(3)]
    support = np.ascontiguousarray(np.stack([pack_string(x) for x in strings]))
    pp, pa = alias_table([0.5, 0.3, 0.2])
    mp, ma = noise_mask_table(model)
    args = (support, pp, pa, mp, ma, n, model.kind.value == "erasure", np.uint64(7),
            np.uint64(0), count)
    return lambda k: k.sample_population(*args)


def histogram_case(n, count, ncands):
    model = erasure(0.6)
    f = sampling_case(model, n, count)
    bits, vis = f(_fallback)
    rng = np.random.default_rng(1)
    cands = np.zeros((ncands, bits.shape[1]), dtype=np.uint64)
    for k in range(ncands):
        row = pack_string("".join(rng.choice(["0", "1"], n)))
        cands[k, : row.size] = row
    return lambda k: k.prefix_histograms(bits, vis, cands, n)


def simplex_case(n):
    # phase-two style tableau of the eta LP, slack basis, costs on the first block
    sf = _StandardForm(build_eta_lp(build_channel_matrix(bitflip(0.9), n), 0.1))
    m, total = sf.A.shape
    rng = np.random.default_rng(2)
    A = np.abs(sf.A) + rng.uniform(0, 1e-3, sf.A.shape)
    T = np.zeros((m + 1, total + m + 1))
    T[:m, :total] = A
    T[:m, total:total + m] = np.eye(m)
    T[:m, -1] = 1.0
    T[m, :total] = -rng.uniform(0, 1, total)
    basis = np.arange(total, total + m, dtype=np.int64)

    def run(k):
        TT, bb = T.copy(), basis.copy()
        status, its = k.simplex_pivots(TT, bb, total + m, 100_000, 1e-9, 1e-9)
        return status, its, TT[m, -1]
    return run


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.shape == b.shape and np.allclose(a, b, rtol=1e-12, atol=1e-12)
    return a == b or (isinstance(a, float) and abs(a - b) <= 1e-9 * max(1.0, abs(a)))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    try:
        core = importlib.import_module("popre._kernels._core")
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")

    cases = [
        (f"sample_population bitflip n=10, {args.samples} samples",
         sampling_case(bitflip(0.7), 10, args.samples)),
        (f"sample_population erasure n=64, {args.samples} samples",
         sampling_case(erasure(0.4), 64, args.samples)),
        (f"prefix_histograms n=10, 16 candidates, {args.samples} samples",
         histogram_case(10, args.samples, 16)),
        (f"prefix_histograms n=96, 4 candidates, {args.samples} samples",
         histogram_case(96, args.samples, 4)),
        ("simplex_pivots eta tableau n=24", simplex_case(24)),
    ]
    print(f"{'kernel':58s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}  agree")
    for name, fn in cases:
        tc, oc = best_of(lambda: fn(core), args.repeat)
        tp, op = best_of(lambda: fn(_fallback), args.repeat)
        print(f"{name:58s} {tc:9.4f}s {tp:9.4f}s {tp / tc:7.1f}x  {same(oc, op)}")


if __name__ == "__main__":
    main()
