#!/usr/bin/env python3
"""Teacher/student backpropagation experiment; writes a JSON report and a per-run CSV."""
import argparse
import json
from dataclasses import replace
from pathlib import Path

from perfectlab.cli import dumps, write_atomic
from perfectlab.experiment import ExperimentConfig, run_experiment, runs_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path, help="config JSON (defaults used for missing keys)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--runs", type=int, help="override n_runs")
    ap.add_argument("--out", type=Path, default=Path("results/backprop.json"))
    args = ap.parse_args()

    cfg = ExperimentConfig.from_dict(json.loads(args.config.read_text())) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.runs is not None:
        cfg = replace(cfg, n_runs=args.runs)

    doc = run_experiment(cfg).to_dict()
    write_atomic(args.out, dumps(doc))
    write_atomic(args.out.with_suffix(".csv"), runs_csv(doc["runs"]))

    s = doc["summary"]
    print(f"dims {doc['dims']}  teacher residual {doc['teacher_residual']:.1e}")
    print(f"final E: min {s['min_error']:.3g}  median {s['median_error']:.3g}  max {s['max_error']:.3g}")
    print(f"runs with E > {s['error_threshold']}: {s['fraction_above_threshold']:.0%} "
          f"({s['n_diverged']} diverged)")
    print(f"wrote {args.out} and {args.out.with_suffix('.csv')}")


if __name__ == "__main__":
    main()
