"""Compare the numba and numpy exhaustive-model kernels.

    python3 benchmarks/bench_kernels.py [--atoms 14 18 22] [--clauses 40] [--repeat 3]

Both paths get the same random clause masks; the script checks that they
agree before reporting best-of-N wall times.
"""
import argparse
import time

import numpy as np

from disjex import kernels


def clauses(rng, n, k):
    body = np.zeros(k, dtype=np.uint64)
    head = np.zeros(k, dtype=np.uint64)
    for j in range(k):
        atoms = rng.choice(n, size=rng.integers(1, 4), replace=False)
        split = rng.integers(0, len(atoms))
        body[j] = sum(1 << int(a) for a in atoms[:split])
        head[j] = sum(1 << int(a) for a in atoms[split:])
    return body, head


def best(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--atoms", type=int, nargs="+", default=[14, 18, 22])
    ap.add_argument("--clauses", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    if not kernels.HAVE_NUMBA:
        print("numba disabled or missing; timing the numpy path only")
    else:
        b, h = clauses(rng, 4, 3)  # compile outside the timed region
        kernels.minimal_flags_numba(kernels.model_flags_numba(4, b, h))
    print(f"{'atoms':>5} {'numpy s':>9} {'numba s':>9} {'speedup':>8} {'models':>8}")
    for n in args.atoms:
        b, h = clauses(rng, n, args.clauses)
        t_np, f_np = best(lambda: kernels.minimal_flags_numpy(kernels.model_flags_numpy(n, b, h)), args.repeat)
        if kernels.HAVE_NUMBA:
            t_nb, f_nb = best(lambda: kernels.minimal_flags_numba(kernels.model_flags_numba(n, b, h)), args.repeat)
            assert (f_np == f_nb).all(), "kernels disagree"
            print(f"{n:>5} {t_np:>9.3f} {t_nb:>9.3f} {t_np / t_nb:>7.1f}x {int(f_np.sum()):>8}")
        else:
            print(f"{n:>5} {t_np:>9.3f} {'-':>9} {'-':>8} {int(f_np.sum()):>8}")


if __name__ == "__main__":
    main()
