"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 flow/solver error,
4 invariant breach.
"""

import argparse
import ast
import sys
from pathlib import Path

from .config import (ConvergenceConfig, ExperimentConfig, FrameCheckConfig,
                     parse_config)
from .errors import ConfigError, EquiflowError, InvariantBreach

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FLOW = 3
EXIT_BREACH = 4


def _load_config(path, expected_scenario=None):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    cfg = parse_config(text)
    if expected_scenario is not None and cfg.scenario != expected_scenario:
        raise ConfigError(f"config scenario is {cfg.scenario!r}, "
                          f"expected {expected_scenario!r}")
    return cfg


def _parse_values(text):
    raw = text.strip()
    if not raw.startswith("["):
        raw = "[" + raw + "]"
    try:
        vals = ast.literal_eval(raw)
    except (ValueError, SyntaxError) as exc:
        raise ConfigError(f"cannot parse --values {text!r}") from exc
    return [float(v) for v in vals]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="equiflow",
        description="Equivariant Lagrangian mean curvature flow with boundary: "
                    "simulations, frame-identity checks, and solver validation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_lawlor = sub.add_parser("lawlor", help="hyperbola-neck boundary flow")
    s_lawlor = p_lawlor.add_subparsers(dest="action", required=True)
    s_lawlor.add_parser("run", help="run a config").add_argument("config")

    p_cliff = sub.add_parser("clifford", help="shrinking-torus boundary flow")
    s_cliff = p_cliff.add_subparsers(dest="action", required=True)
    s_cliff.add_parser("run", help="run a config").add_argument("config")

    p_frame = sub.add_parser("frame-check",
                             help="randomised boundary-frame identity suite")
    p_frame.add_argument("--n", type=int, default=2)
    p_frame.add_argument("--alpha", type=float, default=0.0)
    p_frame.add_argument("--trials", type=int, default=1000)
    p_frame.add_argument("--seed", type=int, default=0)
    p_frame.add_argument("--out", default="out/frame_check")

    p_conv = sub.add_parser("convergence", help="observed-order ladder")
    p_conv.add_argument("config")

    p_sweep = sub.add_parser("sweep", help="parameter sweep over a template")
    p_sweep.add_argument("template")
    p_sweep.add_argument("--param", required=True, help="section.key to vary")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated or bracketed numbers")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--workers", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from . import runner  # deferred: keeps --help fast

    try:
        if args.command in ("lawlor", "clifford"):
            cfg = _load_config(args.config, expected_scenario=args.command)
            runner.run_experiment(cfg)
        elif args.command == "frame-check":
            if args.n < 2:
                raise ConfigError("--n must be >= 2")
            cfg = ExperimentConfig(
                scenario="frame_check", output_dir=args.out,
                frame_check=FrameCheckConfig(n=args.n, alpha=args.alpha,
                                             trials=args.trials, seed=args.seed))
            manifest = runner.run_experiment(cfg)
            print(f"max residual: {manifest['final']['max_residual']:.3e} "
                  f"over {args.trials} frames")
        elif args.command == "convergence":
            cfg = _load_config(args.config, expected_scenario="convergence")
            manifest = runner.run_experiment(cfg)
            orders = ", ".join(f"{o:.3f}" for o in manifest["final"]["orders"])
            print(f"observed orders: {orders}")
        elif args.command == "sweep":
            cfg = _load_config(args.template)
            values = _parse_values(args.values)
            rows = runner.sweep(cfg, args.param, values,
                                output_dir=args.out, workers=args.workers)
            failed = sum(1 for r in rows if r["status"] != "ok")
            print(f"sweep complete: {len(rows) - failed} ok, {failed} failed")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantBreach as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_BREACH
    except EquiflowError as exc:
        print(f"flow error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FLOW
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
