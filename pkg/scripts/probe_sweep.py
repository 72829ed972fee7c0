#!/usr/bin/env python3
"""Success counts of the determinant probe per activation, p and sampling range.

Useful for choosing the node range: narrow boxes make g(a_i b_j) close to a
low-degree polynomial in a_i b_j, and the scaled determinant collapses as p grows.
"""
import argparse

from perfectlab import activations
from perfectlab.detprobe import probe_nonvanishing


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ranges", type=float, nargs="+", default=[1.0, 2.0, 4.0])
    ap.add_argument("--p-max", type=int, default=8)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--tol", type=float, default=1e-12)
    args = ap.parse_args()

    for r in args.ranges:
        print(f"node range +-{r}  (successes out of {args.seeds}, worst attempt count)")
        for g in activations.ALL:
            cells = []
            for p in range(1, args.p_max + 1):
                reps = [probe_nonvanishing(g, p, s, tol=args.tol, node_range=r) for s in range(args.seeds)]
                wins = sum(rep.success for rep in reps)
                worst = max(rep.attempts for rep in reps)
                cells.append(f"p={p}:{wins:>2}/{worst:<3}")
            print(f"  {g.name:>9}  " + "  ".join(cells))


if __name__ == "__main__":
    main()
