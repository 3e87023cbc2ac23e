"""kaya_cmd: analyze contract variables, run DBDL suites, serve the HTTP API.

Exit codes: 0 success (run: all expectations passed), 1 failing expectation,
2 input/parse/validation error. Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
import threading
from datetime import datetime, timezone
from pathlib import Path

from .analyzer import analyze, render_report
from .dbdl import parse_dbdl
from .errors import Diagnostic, ParseError, ValidationFailed
from .layout import describe_variables
from .minisol import parse_source
from .minisol.ast import SourceUnit
from .runner import RunOptions, run_suite
from .server import create_server
from .vm import DEFAULT_STEP_LIMIT

DEFAULT_PORT = 7878


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "analyze":
        return cmd_analyze(args)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "serve":
        return cmd_serve(args)
    parser.print_help()
    return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kaya_cmd", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    analyze_p = sub.add_parser("analyze", help="list a contract's state variables and slots")
    analyze_p.add_argument("contract", metavar="FILE")
    analyze_p.add_argument("--format", choices=("text", "json"), default="text")

    run_p = sub.add_parser("run", help="execute a DBDL suite and emit the analysis report")
    run_p.add_argument("-c", "--contract", action="append", default=[], metavar="FILE")
    run_p.add_argument("-t", "--testsuite", required=True, metavar="SUITE.dbdl")
    run_p.add_argument("--format", choices=("text", "json"), default="text")
    run_p.add_argument("--out", metavar="FILE")
    run_p.add_argument("--threshold", type=float, default=0.8)
    run_p.add_argument("--step-limit", type=int, default=DEFAULT_STEP_LIMIT)
    run_p.add_argument("--jobs", type=int, default=1)
    run_p.add_argument("--timestamps", action="store_true", help="include a generation timestamp")

    serve_p = sub.add_parser("serve", help="serve the HTTP API (and web UI when --ui-dir is set)")
    serve_p.add_argument("--port", type=int, default=None, help=f"default {DEFAULT_PORT}, or $KAYA_PORT")
    serve_p.add_argument("--state-dir", default=None)
    serve_p.add_argument("--ui-dir", default=None)
    return parser


def _fail(diagnostics: list[Diagnostic], fmt: str, source: str = "") -> int:
    if fmt == "json":
        doc = {"errors": [d.to_json() for d in diagnostics]}
        print(json.dumps(doc, indent=2), file=sys.stderr)
    else:
        for diag in diagnostics:
            prefix = f"{source}:" if source else ""
            print(f"{prefix}{diag.render()}", file=sys.stderr)
    return 2


def _read_file(path: str, fmt: str) -> str | None:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        _fail([Diagnostic("io", str(err))], fmt)
        return None


def cmd_analyze(args) -> int:
    text = _read_file(args.contract, args.format)
    if text is None:
        return 2
    try:
        unit = parse_source(text)
    except ParseError as err:
        return _fail(err.diagnostics, args.format, args.contract)
    rows = describe_variables(unit)
    if args.format == "json":
        sys.stdout.write(json.dumps({"variables": rows}, indent=2) + "\n")
        return 0
    if not rows:
        print("no state variables")
        return 0
    header = ("contract", "name", "type", "slot")
    table = [header] + [(r["contract"], r["name"], r["type"], r["slot"]) for r in rows]
    widths = [max(len(row[col]) for row in table) for col in range(4)]
    for row in table:
        print("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return 0


def _load_sources(args, suite) -> list[SourceUnit] | None:
    units: list[SourceUnit] = []
    seen: set[str] = set()
    for path in args.contract:
        text = _read_file(path, args.format)
        if text is None:
            return None
        try:
            units.append(parse_source(text))
        except ParseError as err:
            _fail(err.diagnostics, args.format, path)
            return None
    known = {c.name for u in units for c in u.contracts}
    # contract_refs carry a source file; load any the -c flags did not cover,
    # resolved relative to the suite file
    suite_dir = Path(args.testsuite).parent
    for case in suite.cases:
        for ref in case.contract_refs:
            if ref.alias in known or ref.source in seen:
                continue
            candidate = suite_dir / ref.source
            if not candidate.is_file():
                continue
            seen.add(ref.source)
            try:
                unit = parse_source(candidate.read_text(encoding="utf-8"))
            except ParseError as err:
                _fail(err.diagnostics, args.format, str(candidate))
                return None
            units.append(unit)
            known.update(c.name for c in unit.contracts)
    return units


def cmd_run(args) -> int:
    suite_text = _read_file(args.testsuite, args.format)
    if suite_text is None:
        return 2
    try:
        suite = parse_dbdl(suite_text)
    except ParseError as err:
        return _fail(err.diagnostics, args.format, args.testsuite)
    units = _load_sources(args, suite)
    if units is None:
        return 2
    try:
        results = run_suite(suite, units, RunOptions(step_limit=args.step_limit, jobs=args.jobs))
    except ValidationFailed as err:
        return _fail(err.diagnostics, args.format)
    report = analyze(results, threshold=args.threshold)
    payload = render_report(report, args.format)
    if args.timestamps:
        payload = _stamp(payload, args.format)
    if args.out:
        Path(args.out).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    all_pass = all(ok for result in results for _, ok in result.expectation_results)
    return 0 if all_pass else 1


def _stamp(payload: bytes, fmt: str) -> bytes:
    now = datetime.now(timezone.utc).isoformat()
    if fmt == "json":
        doc = json.loads(payload)
        doc["generated_at"] = now
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    return f"generated at {now}\n".encode("utf-8") + payload


def cmd_serve(args) -> int:
    port = args.port
    if port is None:
        env_port = os.environ.get("KAYA_PORT")
        port = int(env_port) if env_port else DEFAULT_PORT
    try:
        server = create_server(port, state_dir=args.state_dir, ui_dir=args.ui_dir)
    except OSError as err:
        print(f"cannot bind port {port}: {err}", file=sys.stderr)
        return 2

    def _shutdown(signum, frame):
        threading.Thread(target=server.shutdown, daemon=True).start()

    signal.signal(signal.SIGINT, _shutdown)
    signal.signal(signal.SIGTERM, _shutdown)
    print(f"serving on http://127.0.0.1:{port}", file=sys.stderr)
    try:
        server.serve_forever()
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
