"""Command-line front end: ``fockladder fig|qzero|accept``.

Examples:
  fockladder fig 1 --nbar-range 0.05:2:0.05 --out fig1.csv
  fockladder fig 2 --grid -3:3:121 --format json --out fig2.json
  fockladder fig 9 --alpha-sq-range log:1:200:41 --plot-script
  fockladder fig all --out results/
  fockladder qzero --source thermal_ACk(20) --bracket 0.3:1.0
  fockladder accept --out report.json
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .acceptance import dump_report, format_report, run_acceptance
from .errors import ConfigError, FockLadderError, NoSignChange
from .experiments import FIGURES, ExperimentConfig, find_q_zero, run_fig

logger = logging.getLogger("fockladder")

# flag name -> config key
_FLAG_KEYS = {
    "nbar_range": "nbar-range",
    "alpha_sq_range": "alpha-sq-range",
    "k": "k",
    "tail_tol": "tail-tol",
    "grid": "grid",
    "out": "out",
    "format": "format",
    "point": "point",
    "g": "g",
    "mode": "mode",
    "source": "source",
}


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file ([experiment] section) mirroring these flags")
    p.add_argument("--save-config", help="write the effective configuration to this file")
    p.add_argument("--nbar-range", help="thermal grid lo:hi:step (default 0.05:2:0.05)")
    p.add_argument("--alpha-sq-range", help="coherent grid lo:hi:step or log:lo:hi:num")
    p.add_argument("--k", help="repetitions (figs 3/7, custom) or largest k (figs 4/8)")
    p.add_argument("--tail-tol", help="truncation tolerance in (0, 1e-3] (default 1e-12)")
    p.add_argument("--grid", help="Wigner window lo:hi:n or xmin:xmax:ymin:ymax:nx:ny")
    p.add_argument("--out", help="output file (directory for 'fig all')")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--point", help="nbar or |alpha|^2 for figs 2/4/6/8 (default 0.57)")
    p.add_argument("--g", help="coupling constant for fig 9 (default 1)")
    p.add_argument("--mode", choices=("ac", "ca"), help="fig 9 / custom operation")
    p.add_argument("--source", choices=("thermal", "coherent"), help="custom sweep initial state")
    p.add_argument("--plot-script", action="store_true", default=None, help="also emit a gnuplot stub")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockladder", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("fig", help="reproduce a figure dataset")
    fig.add_argument("id", help="1..9, fig1..fig9, custom or all")
    _add_experiment_flags(fig)

    qz = sub.add_parser("qzero", help="bisect the Mandel Q zero crossing")
    qz.add_argument("--source", default="thermal_AC",
                    help="thermal_AC, thermal_CA, coherent_AC, coherent_CA, optionally with k(N) suffix")
    qz.add_argument("--k", type=int, default=None)
    qz.add_argument("--bracket", default="0.3:1.0", help="lo:hi")
    qz.add_argument("--tail-tol", type=float, default=1e-12)

    acc = sub.add_parser("accept", help="run the acceptance criteria")
    acc.add_argument("--out", help="write the JSON report here")
    acc.add_argument("--only", help="comma-separated criterion ids")
    return parser


def config_from_args(args: argparse.Namespace, figure: str) -> ExperimentConfig:
    cfg = ExperimentConfig(figure=figure)
    if args.config:
        cfg = ExperimentConfig.load(args.config, cfg)
        cfg = replace(cfg, figure=figure)
    overrides = {key: str(getattr(args, attr)) for attr, key in _FLAG_KEYS.items()
                 if getattr(args, attr) is not None}
    if args.plot_script:
        overrides["plot-script"] = "true"
    return ExperimentConfig.from_mapping(overrides, cfg)


def _figure_ids(raw: str) -> list[str]:
    raw = raw.strip().lower()
    if raw == "all":
        return [f for f in FIGURES if f != "custom"]
    name = raw if raw.startswith("fig") or raw == "custom" else f"fig{raw}"
    if name not in FIGURES:
        raise ConfigError(f"unknown figure {raw!r}")
    return [name]


def cmd_fig(args: argparse.Namespace) -> int:
    figures = _figure_ids(args.id)
    for figure in figures:
        cfg = config_from_args(args, figure)
        if len(figures) > 1:
            outdir = Path(args.out or ".")
            cfg = replace(cfg, out=str(outdir / f"{figure}.{cfg.format}"))
        if args.save_config:
            target = Path(args.save_config)
            if len(figures) > 1:
                target = target.with_name(f"{target.stem}_{figure}{target.suffix or '.ini'}")
            cfg.save(target)
        paths, summary = run_fig(cfg)
        for path in paths:
            print(f"wrote {path}")
        extra = {k: v for k, v in summary.items() if k != "figure"}
        if extra:
            print(json.dumps(extra, sort_keys=True))
    return 0


def cmd_qzero(args: argparse.Namespace) -> int:
    try:
        lo, hi = (float(x) for x in args.bracket.split(":"))
    except ValueError:
        raise ConfigError(f"bracket must be lo:hi, got {args.bracket!r}") from None
    try:
        root = find_q_zero(args.source, (lo, hi), k=args.k, tail_tol=args.tail_tol)
    except NoSignChange as exc:
        print(f"no sign change: {exc}", file=sys.stderr)
        return 3
    print(f"{root:.6f}")
    return 0


def cmd_accept(args: argparse.Namespace) -> int:
    which = [int(x) for x in args.only.split(",")] if args.only else None
    report = run_acceptance(which)
    print(format_report(report))
    if args.out:
        Path(args.out).write_text(dump_report(report) + "\n")
    print("ALL CRITERIA PASSED" if report["passed"] else "SOME CRITERIA FAILED")
    return 0 if report["passed"] else 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    handlers = {"fig": cmd_fig, "qzero": cmd_qzero, "accept": cmd_accept}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FockLadderError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
