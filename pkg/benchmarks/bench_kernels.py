"""Compare the numba and pure-numpy flash-simulation backends.

Usage: python3 benchmarks/bench_kernels.py [--flashes N] [--repeat R] [--workers W]

Each backend is warmed up once (so numba compilation is excluded), then timed
on full ensembles.  The reports from both backends must agree exactly.
"""

import argparse
import time

from sonosqueeze import _kernels
from sonosqueeze.montecarlo import DetectorConfig, SourceConfig, run_ensemble

CASES = {
    "squeezed ideal": (SourceConfig.squeezed(1.0), DetectorConfig()),
    "squeezed lossy": (SourceConfig.squeezed(1.0), DetectorConfig(0.8, 0.8)),
    "thermal lossy": (SourceConfig.thermal(1.0, 2.0), DetectorConfig(0.7, 0.9)),
}


def best_time(source, det, flashes, repeat, workers, use_numba):
    run_ensemble(source, det, 10_000, 0, workers=workers, use_numba=use_numba)
    best, report = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        report = run_ensemble(source, det, flashes, 1, workers=workers, use_numba=use_numba)
        best = min(best, time.perf_counter() - t0)
    return best, report


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--flashes", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    backends = [False] + ([True] if _kernels.HAVE_NUMBA else [])
    print(f"{args.flashes} flashes, best of {args.repeat}, {args.workers} worker(s)")
    print(f"{'case':<16} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}  agree")
    for name, (source, det) in CASES.items():
        results = {b: best_time(source, det, args.flashes, args.repeat, args.workers, b) for b in backends}
        t_np, r_np = results[False]
        if True in results:
            t_nb, r_nb = results[True]
            print(f"{name:<16} {t_np:10.3f} {t_nb:10.3f} {t_np / t_nb:8.1f}  {r_np == r_nb}")
        else:
            print(f"{name:<16} {t_np:10.3f} {'n/a':>10} {'':>8}  -")


if __name__ == "__main__":
    main()
