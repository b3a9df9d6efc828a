"""Command-line front end.

Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or usage.
Every failure prints exactly one line starting with ``ris-im: error:``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from .codec import codebook_for
from .engine import (PRESETS, Experiment, figure_preset, rate_table, rate_table_to_csv,
                     results_to_csv, run_experiment)
from .params import ConfigError, InactiveMode, Scheme, SystemConfig

SEED_ENV = "RIS_IM_SEED"
ERROR_PREFIX = "ris-im: error:"


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message, 2)


def _load_experiment(path: str) -> Experiment:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc.strerror}", 2) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path} is not valid JSON: {exc}", 2) from exc
    if not isinstance(data, dict):
        raise CliError(f"config {path} must be a JSON object", 2)
    try:
        return Experiment.from_dict(data)
    except ConfigError as exc:
        raise CliError(f"invalid config: {exc}", 2) from exc


def _check_writable(path: Path):
    parent = path.resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK) or (path.exists() and not os.access(path, os.W_OK)):
        raise CliError(f"output path {path} is not writable", 1)


def _resolve_seed(args, exp: Experiment) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env, 0)
        except ValueError as exc:
            raise CliError(f"{SEED_ENV}={env!r} is not an integer", 2) from exc
    return exp.seed


def cmd_run(args) -> int:
    exp = _load_experiment(args.config)
    out = Path(args.output) if args.output else Path(f"{exp.name}.csv")
    _check_writable(out)
    if exp.kind == "rate-table":
        text = rate_table_to_csv(rate_table(exp.modulation_order, exp.groups))
    else:
        seed = _resolve_seed(args, exp)
        if args.workers < 1:
            raise CliError("--workers must be >= 1", 2)
        results = run_experiment(exp, seed, workers=args.workers,
                                 progress=lambda r: print(r.summary(), flush=True))
        text = results_to_csv(results)
    try:
        out.write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror}", 1) from exc
    print(f"wrote {out}")
    return 0


def cmd_preset(args) -> int:
    try:
        exp = figure_preset(args.name)
    except KeyError:
        raise CliError(f"unknown preset {args.name!r}; valid names: {','.join(PRESETS)}", 2) from None
    text = exp.to_json() + "\n"
    if args.output:
        out = Path(args.output)
        _check_writable(out)
        out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_codebook(args) -> int:
    try:
        config = SystemConfig(scheme=Scheme(args.scheme), num_groups=args.G, alpha_db=args.alpha_db,
                              rgb_inactive_mode=InactiveMode(args.inactive_mode))
        if args.G < 1 or (config.scheme is Scheme.RGB and args.G < 2):
            raise ValueError(f"num_groups: G={args.G} is invalid for scheme {args.scheme}")
        cb = codebook_for(config)
    except ValueError as exc:
        raise CliError(str(exc), 2) from exc
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["bits", "index", *(f"group{g + 1}" for g in range(cb.num_groups))])
    for bits, r, labels in cb.rows():
        writer.writerow([bits, r, *labels])
    return 0


def cmd_rate_table(args) -> int:
    if args.M < 2 or args.M & (args.M - 1):
        raise CliError(f"modulation_order: M={args.M} is not a power of two >= 2", 2)
    sys.stdout.write(rate_table_to_csv(rate_table(args.M, range(1, args.max_groups + 1))))
    return 0


def cmd_validate(args) -> int:
    exp = _load_experiment(args.config)
    print(f"ok: {exp.name} ({exp.kind}, {len(exp.curves)} curves)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ris-im", description="Hybrid-RIS over-the-air index modulation simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run a BER experiment (or rate table) from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--output", "-o")
    p.add_argument("--seed", type=lambda s: int(s, 0))
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="write a figure preset as editable JSON")
    p.add_argument("name")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("codebook", help="print a codebook as CSV")
    p.add_argument("scheme", choices=[s.value for s in Scheme])
    p.add_argument("G", type=int)
    p.add_argument("alpha_db", type=float)
    p.add_argument("--inactive-mode", default=InactiveMode.ZERO_PHASE.value,
                   choices=[m.value for m in InactiveMode])
    p.set_defaults(func=cmd_codebook)

    p = sub.add_parser("rate-table", help="print spectral efficiency of all schemes vs G")
    p.add_argument("--M", type=int, default=2)
    p.add_argument("--max-groups", type=int, default=10)
    p.set_defaults(func=cmd_rate_table)

    p = sub.add_parser("validate", help="check a JSON config without running it")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except CliError as exc:
        print(f"{ERROR_PREFIX} {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"{ERROR_PREFIX} invalid config: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
