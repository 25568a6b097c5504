"""Command-line entry point.  Exit codes: 0 success, 1 failed assertion, 2 bad configuration."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments as ex
from .config import ConfigError, ENGINES, load_config
from .core import CapExceeded

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, newline="\n")
    else:
        sys.stdout.write(text)


def _load(args):
    if not args.config:
        raise ConfigError("--config", "this command needs a configuration file")
    cfg = load_config(args.config)
    if getattr(args, "engine", None):
        cfg.engine = args.engine
    if getattr(args, "cap", None):
        cfg.cap = args.cap
    if getattr(args, "n_min", None):
        cfg.n_min = args.n_min
    if getattr(args, "n_max", None):
        cfg.n_max = args.n_max
    if cfg.n_max < cfg.n_min:
        raise ConfigError("n_max", "must be >= n_min")
    return cfg


def cmd_analyze_utility(args) -> int:
    cfg = _load(args)
    _emit(ex.dump_json({"config": cfg.to_json(),
                        "report": ex.analyze_utility(cfg.utility, cfg.source, cfg.d)}),
          args.out or cfg.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load(args)
    header, rows = ex.simulate(cfg, args.threads)
    _emit(ex.write_csv(header, rows, cfg.to_json()), args.out or cfg.output)
    return EXIT_OK


def cmd_example2(args) -> int:
    res = ex.example2(args.threads)
    _emit(ex.write_csv(ex.EXAMPLE2_HEADER, res.rows, ex.example2_config()), args.out)
    failed = [c for c in ex.example2_checks(res) if not c["passed"]]
    for c in failed:
        print(f"check failed: {c['name']} {c}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_example3(args) -> int:
    report = ex.example3_report(args.threads)
    _emit(ex.dump_json(report), args.out)
    for c in report["claims"]:
        if not c["passed"]:
            print(f"claim ({c['id']}) failed: {c['statement']}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_brute_force(args) -> int:
    cfg = _load(args)
    _emit(ex.dump_json(ex.brute_force_sweep(cfg, args.threads)), args.out or cfg.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite not in ex.SUITES:
        raise ConfigError("suite", f"unknown suite {args.suite!r}; choose from {', '.join(ex.SUITES)}")
    result = ex.run_suite(args.suite, args.threads)
    _emit(ex.dump_json(result), args.out)
    return EXIT_OK if result["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stratcomm",
                                     description="Exact strategic-communication game analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, config=False, sweep=False, help_text=""):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        if config:
            p.add_argument("--config", help="JSON configuration file")
        if sweep:
            p.add_argument("--engine", choices=ENGINES)
            p.add_argument("--n-min", type=int, dest="n_min")
            p.add_argument("--n-max", type=int, dest="n_max")
            p.add_argument("--cap", type=int, help="largest q**n for the sequence engine")
        return p

    add("analyze-utility", cmd_analyze_utility, config=True, help_text="permutation optimum and region report")
    add("simulate", cmd_simulate, config=True, sweep=True, help_text="evaluate a strategy over a range of n")
    add("example2", cmd_example2, help_text="recovered-probability curves for growing images")
    add("example3", cmd_example3, help_text="type-level claims for the four-symbol example")
    add("brute-force", cmd_brute_force, config=True, sweep=True, help_text="exhaustive receiver search")
    p = add("verify", cmd_verify, help_text="run a verification suite")
    p.add_argument("suite", help=", ".join(ex.SUITES))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.fn(args)
    except (ConfigError, CapExceeded, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
