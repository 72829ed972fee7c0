#!/usr/bin/env python3
"""Print P_k, P_k(g(0)) and the selected nonvanishing indices."""
import argparse

from perfectlab.polynomial import fraction_to_str
from perfectlab.symbolic import pk_sequence_for, select_indices


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("activation", choices=["logistic", "tanh"])
    ap.add_argument("--kmax", type=int, default=8)
    ap.add_argument("--p", type=int, default=6)
    args = ap.parse_args()

    seq = pk_sequence_for(args.activation, args.kmax)
    print(f"G = {seq.G},  g(0) = {fraction_to_str(seq.g0)}")
    for e in seq.entries:
        print(f"k={e.k:<3} P_k(g0) = {fraction_to_str(e.value_at_g0):>12}   P_k = {e.poly}")
    print("selected indices:", select_indices(seq.G, seq.g0, args.p))


if __name__ == "__main__":
    main()
