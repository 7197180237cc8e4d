"""Command-line entry point: ``renormlab <command> [options]``.

Every command writes CSV or JSON to stdout (or ``--out``) and exits with 0
only when all of its verification records pass.  Settings come from the
defaults, then a key=value config file named by ``$RENORMLAB_CONFIG`` or
``--config``, then flags.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from . import checks
from .report import SCHEMA_VERSION, ConfigError, RunConfig, VerificationReport, load_config, to_csv

log = logging.getLogger("renormlab")

COMMANDS = ("ratios", "feasible", "fixed-points", "tower", "renorm-check", "extend", "shift-check",
            "perturb", "all")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--side", choices=("l", "r"), default=None, help="left or right branch")
    p.add_argument("--depth", type=int, default=None, help="tower, extension or shift depth")
    p.add_argument("--grid", type=int, default=None, help="grid size")
    p.add_argument("--tol", type=float, default=None, help="root tolerance")
    p.add_argument("--seed", type=int, default=None, help="PRNG seed")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="renormlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _common(p)
        if name == "ratios":
            p.add_argument("--c-min", type=float, default=None)
            p.add_argument("--c-max", type=float, default=None)
        if name == "shift-check":
            p.add_argument("--count", type=int, default=None, help="number of random sequences")
            p.add_argument("--length", type=int, default=None, help="sequence length")
        if name == "perturb":
            p.add_argument("--eps", type=float, nargs="+", default=None, help="epsilon values")
    return parser


def _config(args) -> RunConfig:
    over = {"root_tol": args.tol, "seed": args.seed, "format": args.format}
    if args.depth is not None:
        key = {"tower": "tower_depth", "renorm-check": "tower_depth", "extend": "extension_depth",
               "shift-check": "shift_length"}.get(args.command)
        if key is None:
            raise ConfigError(f"--depth has no meaning for {args.command}")
        over[key] = args.depth
    if args.grid is not None and args.command not in ("ratios", "tower"):
        over["feasible_grid" if args.command == "feasible" else "probe_grid"] = args.grid
    if args.command == "shift-check":
        over["shift_count"] = args.count
        if args.length is not None:
            over["shift_length"] = args.length
    if args.command == "perturb" and args.eps:
        over["epsilons"] = tuple(args.eps)
    return load_config(args.config, **over)


def _table_doc(command: str, cfg: RunConfig, header: Sequence[str], rows, rep: VerificationReport | None = None
               ) -> str:
    if cfg.format == "csv":
        return to_csv(header, rows)
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "config": cfg.as_dict(),
           "header": list(header), "rows": [list(r) for r in rows]}
    if rep is not None:
        doc["pass"] = rep.passed
        doc["records"] = [r.as_dict() for r in rep.records]
    return json.dumps(doc, indent=2) + "\n"


def _report_doc(rep: VerificationReport, cfg: RunConfig) -> str:
    return rep.records_csv() if cfg.format == "csv" else rep.to_json(cfg)


def execute(args) -> tuple[str, bool]:
    cfg = _config(args)
    cmd = args.command
    if cmd == "ratios":
        side = args.side or "l"
        grid = 101 if args.grid is None else args.grid
        rows = checks.ratio_rows(side, args.c_min, args.c_max, grid)
        return _table_doc(cmd, cfg, checks.RATIO_HEADER, rows), True
    if cmd == "tower":
        side = args.side or "l"
        rows = checks.tower_rows(side, cfg.tower_depth)
        return _table_doc(cmd, cfg, ("side", "level", "label", "value"), rows), True
    if cmd == "extend" and cfg.format == "csv":
        rep = checks.run_extend(cfg)
        rows = checks.extension_rows(cfg)
        return to_csv(("side", "n", "lo", "hi", "c0", "c1", "c2", "c3"), rows), rep.passed
    if cmd == "perturb" and cfg.format == "csv":
        rep = checks.run_perturb(cfg, args.side)
        return to_csv(rep.data["header"], rep.data["rows"]), rep.passed
    runners = {
        "fixed-points": lambda: checks.run_fixed_points(cfg),
        "feasible": lambda: checks.run_feasible(cfg, args.side),
        "renorm-check": lambda: checks.run_renorm_check(cfg),
        "extend": lambda: checks.run_extend(cfg),
        "shift-check": lambda: checks.run_shift_check(cfg),
        "perturb": lambda: checks.run_perturb(cfg, args.side),
        "all": lambda: checks.run_all(cfg),
    }
    rep = runners[cmd]()
    for r in rep.failures:
        log.warning("FAIL %s: measured %s, expected %s %s", r.name, r.measured, r.relation, r.expected)
    return _report_doc(rep, cfg), rep.passed


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        text, ok = execute(args)
    except (ConfigError, ValueError) as exc:
        print(f"renormlab: error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"renormlab: cannot write output: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
