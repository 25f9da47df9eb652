#!/usr/bin/env python
"""Compare the compiled level kernel with the pure-Python fallback.

    python benchmarks/bench_kernel.py --levels 200000 --repeat 3
"""

import argparse
import time
from fractions import Fraction

from flatskew import GroupSpec, RationalDirection, build_surface, kernel
from flatskew.cuts import sample_liftable_cuts
from flatskew.skew import context
from flatskew.surface import perm_from_cycles


def bench(levels, repeat, n_cuts, seed):
    surf = build_surface(3, perm_from_cycles(3, [(0, 1, 2)]), perm_from_cycles(3, [(0, 1)]))
    _, lifted, _ = sample_liftable_cuts(surf, n_cuts, seed=seed, group=GroupSpec(2, (5,)))
    ctx = context(surf, lifted, RationalDirection(4181, 6765))
    start = ctx.start_state(surf.marked)
    ctx.advance(*start, 1)  # build the level table outside the timings
    rows = []
    results = {}
    for name, force in (("compiled", False), ("python", True)):
        if name == "compiled" and not kernel.compiled_available():
            rows.append((name, None))
            continue
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            results[name] = ctx.advance(*start, Fraction(levels), force_python=force)
            best = min(best, time.perf_counter() - t0)
        rows.append((name, best))
    if len(results) == 2 and results["compiled"] != results["python"]:
        raise SystemExit("kernels disagree")
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--cuts", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rows = bench(args.levels, args.repeat, args.cuts, args.seed)
    base = dict(rows).get("python")
    print(f"{'kernel':<10} {'seconds':>10} {'levels/s':>14} {'speedup':>8}")
    for name, secs in rows:
        if secs is None:
            print(f"{name:<10} {'unavailable':>10}")
            continue
        print(f"{name:<10} {secs:>10.4f} {args.levels / secs:>14.0f} {base / secs:>8.1f}")


if __name__ == "__main__":
    main()
