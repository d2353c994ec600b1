#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Usage:
    python benchmarks/bench_kernels.py [--limit 1000000] [--x 100000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from siegellab._kernels import _pykernels, inverse_table, progression_prefix

try:
    from siegellab._kernels import _ckernels
except ImportError:
    _ckernels = None


def timed(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def build_inputs(limit, x):
    spf = _pykernels.build_spf(limit)
    period = np.array([0, 1, -1], dtype=np.int64)  # chi mod 3
    chi_n = period[np.arange(limit + 1) % 3]
    _, lam, nu, big = _pykernels.multiplicative_tables(spf, chi_n)
    logs = np.zeros(limit + 1)
    logs[1:] = np.log(np.arange(1, limit + 1, dtype=float))
    lamp = _pykernels.convolve_float(chi_n.astype(float), logs)
    q, a, dstar = 97, 5, 9
    inv = inverse_table(q)
    return {
        "spf": spf,
        "chi_n": chi_n,
        "lam": lam[: x + 1],
        "nu": nu[: x + 1],
        "big": big[: x + 1],
        "pps": np.nonzero(big[: x + 1] > 0)[0].astype(np.int64),
        "lam_pref": progression_prefix(lam[: x + 1], q),
        "lamp_pref": progression_prefix(lamp[: x + 1], q),
        "primes": _pykernels.primes_from_spf(spf),
        "inv": inv,
        "q": q,
        "a": a,
        "x": x,
        "dstar": dstar,
    }


def cases(backend, d, limit):
    q, a, x, dstar = d["q"], d["a"], d["x"], d["dstar"]
    pw = d["primes"][d["primes"] >= x // 2]
    pw = pw[pw <= x]
    return [
        ("build_spf", lambda: backend.build_spf(limit)),
        ("multiplicative_tables",
         lambda: backend.multiplicative_tables(d["spf"], d["chi_n"])),
        ("convolve_float",
         lambda: backend.convolve_float(d["chi_n"].astype(float),
                                        d["chi_n"].astype(float))),
        ("psi_split_sums",
         lambda: backend.psi_split_sums(d["nu"], d["lamp_pref"], d["inv"],
                                        q, a, x, dstar)),
        ("t_sums_accumulate",
         lambda: backend.t_sums_accumulate(d["lam"], d["lam_pref"], d["big"],
                                           d["pps"], d["inv"], q, a, x, dstar,
                                           x ** 0.49, x ** 0.02)),
        ("kloosterman_max_over_units",
         lambda: backend.kloosterman_max_over_units(pw, 409, inverse_table(409))),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=1_000_000)
    ap.add_argument("--x", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"inputs: limit={args.limit} x={args.x} repeat={args.repeat}")
    d = build_inputs(args.limit, args.x)
    py = dict(cases(_pykernels, d, args.limit))
    print(f"{'kernel':<28}{'python':>12}{'cython':>12}{'speedup':>10}")
    for name, fn in py.items():
        t_py, r_py = timed(fn, args.repeat)
        if _ckernels is None:
            print(f"{name:<28}{t_py:>11.4f}s{'n/a':>12}{'':>10}")
            continue
        c_fn = dict(cases(_ckernels, d, args.limit))[name]
        t_c, r_c = timed(c_fn, args.repeat)
        print(f"{name:<28}{t_py:>11.4f}s{t_c:>11.4f}s{t_py / t_c:>9.1f}x")
        if isinstance(r_py, tuple) and not isinstance(r_py[0], np.ndarray):
            assert all(
                abs(u - v) < 1e-9 if isinstance(u, float) else u == v
                for u, v in zip(r_py, r_c)
            ), name
    if _ckernels is None:
        print("compiled backend not available; built fallback only")


if __name__ == "__main__":
    main()
