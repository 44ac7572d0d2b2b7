"""Command-line entry point: ``pinchplace {run,trace,verify}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, PlacementError
from .experiments import format_rows, format_trace, load_config, run_sweep, trace_step


def _error_line(kind: str, message: str, field: str = None) -> str:
    payload = {"error": kind, "message": message}
    if field is not None:
        payload["field"] = field
    return json.dumps(payload, sort_keys=True)


def _write(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_run(args) -> int:
    config = load_config(args.config)
    out = args.out or config.output
    if out is None:
        raise ConfigError("output", "no --out given and config has no output path")
    _write(format_rows(run_sweep(config)), out)
    return 0


def cmd_trace(args) -> int:
    config = load_config(args.config)
    _write(format_trace(trace_step(config, args.step)), args.out)
    return 0


def cmd_verify(args) -> int:
    from .verification import run_all

    results = run_all(args.seed)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pinchplace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a parameter sweep and write CSV rows")
    run.add_argument("--config", required=True, help="JSON sweep config")
    run.add_argument("--out", help="output CSV ('-' for stdout); defaults to the config's output")
    run.set_defaults(func=cmd_run)

    trace = sub.add_parser("trace", help="gain/phase landscape of one placement step")
    trace.add_argument("--config", required=True)
    trace.add_argument("--step", type=int, required=True, help="deployment step k, 2 <= k <= N")
    trace.add_argument("--out", required=True)
    trace.set_defaults(func=cmd_trace)

    verify = sub.add_parser("verify", help="run the oracle/property checks and print a summary")
    verify.add_argument("--seed", type=int, default=None, help="reseed the randomized checks")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(_error_line("ConfigError", exc.message, exc.field), file=sys.stderr)
    except PlacementError as exc:
        print(_error_line(type(exc).__name__, str(exc)), file=sys.stderr)
    except OSError as exc:
        print(_error_line("IOError", str(exc)), file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
