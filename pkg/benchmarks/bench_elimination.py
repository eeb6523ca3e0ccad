"""Compare the compiled and pure-Python elimination kernels.

    python benchmarks/bench_elimination.py --sizes 40 80 120 --repeat 3
"""

import argparse
import random
import time

from involute.exact_core import _backend
from involute.field_equations import Metric, ricci_symbol
from involute.symbol_systems import prolong


def random_rows(rng, nrows, ncols, bound):
    return [[rng.randint(-bound, bound) for _ in range(ncols)] for _ in range(nrows)]


def prolonged_ricci_rows(extra):
    m = prolong(ricci_symbol(Metric.minkowski(4)), extra).matrix
    return [[int(x * m.denominator) for x in row] for row in m.rows()], m.ncols


def best_of(fn, rows, ncols, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn([r[:] for r in rows], ncols)
        times.append(time.perf_counter() - t0)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[40, 80, 120])
    ap.add_argument("--bound", type=int, default=9, help="entries drawn from [-bound, bound]")
    ap.add_argument("--prolong", type=int, default=2, help="prolongation order for the structured case")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _backend.echelon_ext is None:
        print("compiled kernel unavailable; build the extension to compare")
        return 1
    rng = random.Random(args.seed)
    cases = [(f"dense {n}x{n}", random_rows(rng, n, n, args.bound), n) for n in args.sizes]
    cases.append((f"prolonged Ricci (+{args.prolong})", *prolonged_ricci_rows(args.prolong)))

    print(f"{'case':<28}{'rows':>6}{'cols':>6}{'compiled s':>12}{'python s':>12}{'speedup':>9}")
    for name, rows, ncols in cases:
        t_ext, r_ext = best_of(_backend.echelon_ext, rows, ncols, args.repeat)
        t_py, r_py = best_of(_backend.echelon_py, rows, ncols, args.repeat)
        if r_ext != r_py:
            raise SystemExit(f"kernels disagree on {name}")
        print(f"{name:<28}{len(rows):>6}{ncols:>6}{t_ext:>12.4f}{t_py:>12.4f}{t_py / t_ext:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
