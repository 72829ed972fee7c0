#!/usr/bin/env python3
"""Tangent-rank witness over a range of sample counts p for fixed (m, n)."""
import argparse

from perfectlab import activations
from perfectlab.network import Dims
from perfectlab.witness import unfeasibility_witness


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--p-max", type=int, default=16)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--activations", nargs="+", default=["logistic", "tanh", "sin"])
    args = ap.parse_args()

    q = Dims(args.m, args.n, 1).q
    print(f"(m, n) = ({args.m}, {args.n}), q = {q}")
    print(f"{'act':>9} {'p':>3}  {'min rank':>8}  verdicts")
    for name in args.activations:
        g = activations.get(name)
        for p in range(1, args.p_max + 1):
            reps = [unfeasibility_witness(g, g, Dims(args.m, args.n, p), s) for s in range(args.seeds)]
            verdicts = sorted({r.verdict for r in reps})
            print(f"{name:>9} {p:>3}  {min(r.rank for r in reps):>8}  {', '.join(verdicts)}")


if __name__ == "__main__":
    main()
