"""Command-line entry point.

Exit codes: 0 success, 2 tolerance failure, 3 search failure, 64 usage error,
65 unsupported combination.
"""
from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
import tempfile
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .activations import Kind, get as get_activation
from .detprobe import DEFAULT_MAX_ATTEMPTS, DEFAULT_NODE_RANGE, DEFAULT_TOL, probe_nonvanishing
from .experiment import (ConfigError, ExperimentConfig, backprop_learner, generate_instance, run_experiment,
                         runs_csv)
from .gradcheck import check_random
from .network import Dims
from .symbolic import KMAX_CAP, PreconditionError, pk_sequence_for, select_indices
from .witness import (CONTRADICTION, SEARCH_FAILED, TOO_SMALL, perfect_map_residual,
                      pi_point_differentiability_probe, unfeasibility_witness)

EXIT_OK = 0
EXIT_TOLERANCE = 2
EXIT_SEARCH = 3
EXIT_USAGE = 64
EXIT_UNSUPPORTED = 65

ACTIVATIONS = [k.value for k in Kind]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if val < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {val}")
    return val


def _nonneg_int(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if val < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {val}")
    return val


def _fresh_seed() -> int:
    return secrets.randbits(31)


def _pair(config: dict):
    return get_activation(config["f"]), get_activation(config["g"])


# Each runner takes a fully resolved config and returns (report, exit code).
# Replaying a manifest calls the same runner with the same config.

def run_grad_check(config: dict) -> tuple[dict, int]:
    dims = Dims(config["m"], config["n"], config["p"])
    f, g = _pair(config)
    rng = np.random.default_rng(config["seed"])
    checks = [check_random(dims, f, g, rng) for _ in range(config["trials"])]
    passed = all(c.passed for c in checks)
    report = {
        "rtol": 1e-6, "atol": 1e-8, "step": "1e-5 * max(1, |x|)",
        "trials": [c.to_dict() for c in checks], "passed": passed,
    }
    return report, EXIT_OK if passed else EXIT_TOLERANCE


def run_pk(config: dict) -> tuple[dict, int]:
    seq = pk_sequence_for(config["activation"], config["kmax"])
    report = seq.to_dict()
    report["G"] = seq.G.to_strings()
    report["g0"] = f"{seq.g0.numerator}/{seq.g0.denominator}"
    if config.get("p") is not None:
        report["selected_indices"] = list(select_indices(seq.G, seq.g0, config["p"]))
    return report, EXIT_OK


def run_det_probe(config: dict) -> tuple[dict, int]:
    g = get_activation(config["activation"])
    rep = probe_nonvanishing(g, config["p"], config["seed"], config["max_attempts"], config["tol"],
                             config["node_range"], identity_checks=config["identity_checks"])
    return rep.to_dict(), EXIT_OK if rep.success else EXIT_SEARCH


def run_witness(config: dict) -> tuple[dict, int]:
    dims = Dims(config["m"], config["n"], config["p"])
    f, g = _pair(config)
    rep = unfeasibility_witness(f, g, dims, config["seed"], config["max_attempts"], config["tol"],
                                config["node_range"])
    if rep.verdict in (CONTRADICTION, TOO_SMALL):
        code = EXIT_OK
    elif rep.verdict == SEARCH_FAILED:
        code = EXIT_SEARCH
    else:
        code = EXIT_TOLERANCE
    return rep.to_dict(), code


def run_train(config: dict) -> tuple[dict, int]:
    cfg = ExperimentConfig.from_dict(config)
    return run_experiment(cfg).to_dict(), EXIT_OK


def run_learner_probe(config: dict) -> tuple[dict, int]:
    exp = dict(config)
    directions = exp.pop("directions")
    cfg = ExperimentConfig.from_dict(exp)
    f, g = cfg.activation_pair
    dims = cfg.dims
    teacher, data = generate_instance(cfg)
    run_seed = cfg.seed
    pi = backprop_learner(cfg, data.gamma, run_seed)
    report = {
        "dims": dims.to_dict(),
        "oracle_residual": perfect_map_residual(f, g, dims, data.gamma, lambda z: teacher, teacher),
        "backprop_residual": perfect_map_residual(f, g, dims, data.gamma, pi, teacher),
    }
    if directions:
        probe = pi_point_differentiability_probe(pi, f, dims, data.gamma, seed=cfg.seed,
                                                 n_directions=directions)
        report["differentiability_probe"] = probe.to_dict()
    return report, EXIT_OK


RUNNERS: dict[str, Callable[[dict], tuple[dict, int]]] = {
    "grad-check": run_grad_check,
    "pk": run_pk,
    "det-probe": run_det_probe,
    "witness": run_witness,
    "train": run_train,
    "learner-probe": run_learner_probe,
}


def _activation_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--activation", choices=ACTIVATIONS, default="tanh",
                   help="activation for both layers (default: tanh)")
    p.add_argument("--f", choices=ACTIVATIONS, help="output activation, overrides --activation")
    p.add_argument("--g", choices=ACTIVATIONS, help="hidden activation, overrides --activation")


def _search_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-attempts", type=_positive_int, default=DEFAULT_MAX_ATTEMPTS)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--node-range", type=float, default=DEFAULT_NODE_RANGE)


def _output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="perfectlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"perfectlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("grad-check", help="finite-difference check of gradients and Jacobians")
    for dim in ("m", "n", "p"):
        p.add_argument(f"--{dim}", type=_positive_int, required=True)
    _activation_args(p)
    p.add_argument("--seed", type=_nonneg_int)
    p.add_argument("--trials", type=_positive_int, default=10)
    _output_args(p)

    p = sub.add_parser("pk", help="exact derivative polynomials P_k and index selection")
    p.add_argument("--activation", choices=ACTIVATIONS, required=True)
    p.add_argument("--kmax", type=_nonneg_int, default=10)
    p.add_argument("--p", type=_positive_int)
    _output_args(p)

    p = sub.add_parser("det-probe", help="sample nodes with a nonvanishing det(g(a_i b_j))")
    p.add_argument("--activation", choices=ACTIVATIONS, required=True)
    p.add_argument("--p", type=_positive_int, required=True)
    p.add_argument("--seed", type=_nonneg_int)
    _search_args(p)
    p.add_argument("--no-identity-checks", action="store_true",
                   help="skip the derivative-identity residuals")
    _output_args(p)

    p = sub.add_parser("witness", help="tangent-rank witness against perfect learners")
    for dim in ("m", "n", "p"):
        p.add_argument(f"--{dim}", type=_positive_int, required=True)
    _activation_args(p)
    p.add_argument("--seed", type=_nonneg_int)
    _search_args(p)
    _output_args(p)

    p = sub.add_parser("train", help="teacher/student backpropagation experiment")
    p.add_argument("--config", type=Path, required=True, help="experiment config JSON")
    p.add_argument("--seed", type=_nonneg_int, help="override the config's master seed")
    p.add_argument("--csv", type=Path, help="also write one CSV row per student run")
    _output_args(p)

    p = sub.add_parser("learner-probe",
                       help="theta(pi(theta)) residual and differentiability probe for the backprop learner")
    p.add_argument("--config", type=Path, required=True, help="experiment config JSON")
    p.add_argument("--seed", type=_nonneg_int, help="override the config's master seed")
    p.add_argument("--directions", type=_nonneg_int, default=5,
                   help="random directions for the differentiability probe (0 skips it)")
    _output_args(p)

    p = sub.add_parser("replay", help="re-run the manifest embedded in a report and compare")
    p.add_argument("report", type=Path)
    _output_args(p)
    return parser


def _load_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path} must contain a JSON object")
    return data


def resolve_config(args: argparse.Namespace) -> dict:
    cmd = args.command
    seed = getattr(args, "seed", None)
    if cmd in ("grad-check", "witness"):
        cfg = {"m": args.m, "n": args.n, "p": args.p,
               "f": args.f or args.activation, "g": args.g or args.activation}
        if cmd == "grad-check":
            cfg["trials"] = args.trials
        else:
            cfg.update(max_attempts=args.max_attempts, tol=args.tol, node_range=args.node_range)
    elif cmd == "pk":
        if args.kmax > KMAX_CAP:
            raise UsageError(f"--kmax must be at most {KMAX_CAP}")
        return {"activation": args.activation, "kmax": args.kmax, "p": args.p}
    elif cmd == "det-probe":
        cfg = {"activation": args.activation, "p": args.p, "max_attempts": args.max_attempts,
               "tol": args.tol, "node_range": args.node_range,
               "identity_checks": not args.no_identity_checks}
    elif cmd in ("train", "learner-probe"):
        cfg = _load_json(args.config)
        if seed is None:
            seed = cfg.get("seed")
        if cmd == "learner-probe":
            cfg["directions"] = args.directions
    else:
        raise UsageError(f"unknown command {cmd}")
    cfg["seed"] = _fresh_seed() if seed is None else seed
    if cmd in ("train", "learner-probe"):
        probe_cfg = {k: v for k, v in cfg.items() if k != "directions"}
        # validate now so a bad config is a usage error, and store it fully resolved
        resolved = ExperimentConfig.from_dict(probe_cfg).to_dict()
        if cmd == "learner-probe":
            resolved["directions"] = cfg["directions"]
        cfg = resolved
    return cfg


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_document(command: str, config: dict, outputs: dict) -> tuple[str, int, dict]:
    report, code = RUNNERS[command](config)
    manifest = {"subcommand": command, "config": config, "seed": config.get("seed"),
                "version": __version__, "outputs": outputs}
    doc = {"manifest": manifest, "exit_code": code, "report": report}
    return dumps(doc), code, report


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def _replay(args) -> int:
    stored_text = args.report.read_text() if args.report.exists() else None
    if stored_text is None:
        raise UsageError(f"cannot read {args.report}")
    stored = _load_json(args.report)
    manifest = stored.get("manifest")
    if not isinstance(manifest, dict) or manifest.get("subcommand") not in RUNNERS:
        raise UsageError(f"{args.report} has no replayable manifest")
    text, _, _ = build_document(manifest["subcommand"], manifest["config"], manifest["outputs"])
    _emit(text, args.out)
    identical = text == stored_text
    print(f"replay {'identical' if identical else 'DIFFERS'}: {args.report}", file=sys.stderr)
    return EXIT_OK if identical else EXIT_TOLERANCE


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            return _replay(args)
        config = resolve_config(args)
        outputs = {"out": str(args.out) if args.out else None}
        if args.command == "train":
            outputs["csv"] = str(args.csv) if args.csv else None
        text, code, report = build_document(args.command, config, outputs)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"perfectlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        sys.stdout.write(dumps({"error": str(exc), "exit_code": EXIT_UNSUPPORTED}))
        return EXIT_UNSUPPORTED
    _emit(text, args.out)
    if args.command == "train" and args.csv:
        write_atomic(args.csv, runs_csv(report["runs"]))
    return code


if __name__ == "__main__":
    sys.exit(main())
