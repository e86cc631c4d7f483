"""Command-line entry points: train, eval, sweep, plot.

Key precedence everywhere: command-line flags beat config-file keys beat
task-preset defaults.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, make_config, parse_config_text


def _collect_overrides(args) -> dict:
    overrides: dict[str, object] = {}
    pairs = list(args.set or [])
    for flag in ("task", "algorithm"):
        if getattr(args, flag, None):
            pairs.append(f"{flag}={getattr(args, flag)}")
    if args.seed is not None:
        pairs.append(f"seed={args.seed}")
    if getattr(args, "out", None):
        pairs.append(f"out_dir={args.out}")
    return parse_config_text("\n".join(pairs))


def _build_config(args):
    file_overrides = {}
    if args.config:
        file_overrides = parse_config_text(Path(args.config).read_text())
    return make_config(file_overrides, _collect_overrides(args))


def _cmd_train(args) -> int:
    from .run import run
    cfg = _build_config(args)
    result = run(cfg)
    print(f"run {result.status}: {result.out_dir}")
    for key, val in sorted(result.final_metrics.items()):
        print(f"  {key}: {val}")
    return 0 if result.status == "done" else 1


def _cmd_eval(args) -> int:
    from .evaluate import evaluate_run
    metrics = evaluate_run(Path(args.run), episodes=args.episodes)
    for key, val in sorted(metrics.items()):
        print(f"{key}: {val}")
    return 0


def _cmd_sweep(args) -> int:
    from .sweeps import sweep_sensitivity
    cfg = _build_config(args)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    rows = sweep_sensitivity(args.axis, values, cfg,
                             out_dir=args.out or None)
    for row in rows:
        print(row)
    return 0 if all(r["status"] == "done" for r in rows) else 1


def _cmd_plot(args) -> int:
    from .plots import emit_plot
    out = emit_plot(args.metrics, args.kind, args.out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flame",
        description="flow-matching maximum-entropy RL at desk scale")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--task", choices=("gmm", "multigoal", "bandit"))
        p.add_argument("--algorithm",
                       choices=("flame_r", "flame_m", "flame_noent",
                                "cfm_only"))
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override any config key (repeatable)")

    p_train = sub.add_parser("train", help="run one training configuration")
    add_config_flags(p_train)
    p_train.set_defaults(fn=_cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a finished run directory")
    p_eval.add_argument("--run", required=True)
    p_eval.add_argument("--episodes", type=int, default=200)
    p_eval.set_defaults(fn=_cmd_eval)

    p_sweep = sub.add_parser("sweep", help="one-axis sensitivity sweep")
    add_config_flags(p_sweep)
    p_sweep.add_argument("--axis", required=True,
                         choices=("n_gen", "n_est", "k", "proposal"))
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_plot = sub.add_parser("plot", help="render a metrics CSV to SVG")
    p_plot.add_argument("--metrics", required=True)
    p_plot.add_argument("--kind", required=True,
                        choices=("learning-curve", "mse-vs-nest",
                                 "goal-scatter"))
    p_plot.add_argument("--out", required=True)
    p_plot.set_defaults(fn=_cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
