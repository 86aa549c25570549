"""Command-line runner: execute check suites and write reports.

Exit codes: 0 when every check passes, 1 when at least one fails,
2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from .config import FORMATS, CheckReport, ConfigError, RunConfig, coerce, read_config_file
from .suites import SUITES, run_suite

JSON_KEYS = ("check_id", "params", "measured", "tolerance", "pass", "elapsed", "error")
CSV_HEADER = ("check_id", "measured_re", "measured_im", "tolerance", "pass", "elapsed")

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "array",
    "items": {
        "type": "object",
        "required": list(JSON_KEYS),
        "additionalProperties": False,
        "properties": {
            "check_id": {"type": "string"},
            "params": {"type": "object"},
            "measured": {
                "type": "object",
                "required": ["re", "im"],
                "additionalProperties": False,
                "properties": {
                    "re": {"type": ["number", "null"]},
                    "im": {"type": ["number", "null"]},
                },
            },
            "tolerance": {"type": ["number", "null"]},
            "pass": {"type": "boolean"},
            "elapsed": {"type": "number", "minimum": 0},
            "error": {"type": ["string", "null"]},
        },
    },
}


def _finite(x: float) -> float | None:
    return x if math.isfinite(x) else None


def report_record(report: CheckReport) -> dict:
    """JSON object for one report, keys in the documented order."""
    values = {
        "check_id": report.check_id,
        "params": report.params,
        "measured": {"re": _finite(report.measured.real), "im": _finite(report.measured.imag)},
        "tolerance": _finite(report.tolerance),
        "pass": report.passed,
        "elapsed": report.elapsed,
        "error": report.error,
    }
    return {key: values[key] for key in JSON_KEYS}


def _csv_number(x: float) -> str:
    return repr(float(x)) if math.isfinite(x) else ""


def emit(reports: list[CheckReport], config: RunConfig) -> list[Path]:
    """Write report.json and/or report.csv into ``config.out_dir``."""
    out = Path(config.out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    if config.format in ("json", "both"):
        path = out / "report.json"
        text = json.dumps([report_record(r) for r in reports], indent=2, allow_nan=False)
        try:
            path.write_text(text + "\n", encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)

    if config.format in ("csv", "both"):
        path = out / "report.csv"
        try:
            with path.open("w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_HEADER)
                for r in reports:
                    writer.writerow(
                        [
                            r.check_id,
                            _csv_number(r.measured.real),
                            _csv_number(r.measured.imag),
                            _csv_number(r.tolerance),
                            "true" if r.passed else "false",
                            repr(r.elapsed),
                        ]
                    )
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)
    return written


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bateman-check", description="Run numerical checks of the Bateman model.")
    parser.add_argument("suite", help=f"one of {', '.join(SUITES + ('all',))}")
    parser.add_argument("--config", help="file of 'key = value' lines; flags override it")
    for flag in ("n-max", "theta", "branch", "omega", "gamma", "mass", "hbar", "tol",
                 "margin", "quad-nodes", "out"):
        parser.add_argument(f"--{flag}", dest=flag.replace("-", "_"))
    parser.add_argument("--format", choices=FORMATS)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    for key, raw in vars(args).items():
        if key in ("suite", "config") or raw is None:
            continue
        name, value = coerce(key, raw)
        values[name] = value
    return replace(RunConfig(), **values)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.suite != "all" and args.suite not in SUITES:
            raise ConfigError(f"unknown suite {args.suite!r}")
        config = load_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    reports = run_suite(args.suite, config)
    try:
        files = emit(reports, config)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failed = [r for r in reports if not r.passed]
    for r in failed:
        detail = r.error or f"measured {r.measured:.3g} vs tolerance {r.tolerance:.3g}"
        print(f"FAIL {r.check_id}: {detail}", file=sys.stderr)
    print(
        f"{len(reports) - len(failed)}/{len(reports)} checks passed; wrote "
        + ", ".join(str(f) for f in files)
    )
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
