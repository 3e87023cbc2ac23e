"""HTTP/JSON API mirroring the five-step wizard workflow.

Sessions are in-memory (optionally snapshotted to a state directory) and
isolated; per-session mutation is serialized while runs on distinct sessions
proceed concurrently. Report bytes returned by POST /run are produced by the
same renderer the CLI uses, so identical inputs yield byte-identical output.
"""

from __future__ import annotations

import base64
import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .analyzer import analyze, render_report
from .dbdl import format_dbdl, parse_dbdl, validate
from .errors import ParseError, ValidationFailed
from .layout import describe_variables
from .minisol import parse_source
from .minisol.ast import ContractDecl, SourceUnit
from .runner import RunOptions, run_suite
from .vm import DEFAULT_STEP_LIMIT

SESSION_TTL_SECONDS = 24 * 3600


@dataclass
class Session:
    id: str
    created_at: float
    sources: dict[str, str] = field(default_factory=dict)  # upload name -> text
    units: dict[str, SourceUnit] = field(default_factory=dict)
    draft_dbdl: str | None = None
    report: bytes | None = None
    running: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)

    def contracts(self) -> dict[str, ContractDecl]:
        found: dict[str, ContractDecl] = {}
        for unit in self.units.values():
            for contract in unit.contracts:
                found[contract.name] = contract
        return found


class SessionStore:
    def __init__(self, state_dir: str | None = None):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.state_dir = Path(state_dir) if state_dir else None
        if self.state_dir:
            self.state_dir.mkdir(parents=True, exist_ok=True)
            self._load_snapshots()

    def create(self) -> Session:
        session = Session(id=secrets.token_hex(16), created_at=time.time())
        with self._lock:
            self._sessions[session.id] = session
        self.snapshot(session)
        return session

    def get(self, session_id: str) -> Session | None:
        now = time.time()
        with self._lock:
            expired = [sid for sid, s in self._sessions.items() if now - s.created_at > SESSION_TTL_SECONDS]
            for sid in expired:
                del self._sessions[sid]
            return self._sessions.get(session_id)

    def snapshot(self, session: Session) -> None:
        if not self.state_dir:
            return
        doc = {
            "id": session.id,
            "created_at": session.created_at,
            "sources": session.sources,
            "draft_dbdl": session.draft_dbdl,
            "report": base64.b64encode(session.report).decode() if session.report else None,
        }
        (self.state_dir / f"{session.id}.json").write_text(json.dumps(doc, indent=2), encoding="utf-8")

    def _load_snapshots(self) -> None:
        for path in self.state_dir.glob("*.json"):
            try:
                doc = json.loads(path.read_text(encoding="utf-8"))
                session = Session(id=doc["id"], created_at=doc["created_at"])
                session.sources = dict(doc.get("sources") or {})
                for name, text in session.sources.items():
                    session.units[name] = parse_source(text)
                session.draft_dbdl = doc.get("draft_dbdl")
                if doc.get("report"):
                    session.report = base64.b64decode(doc["report"])
                self._sessions[session.id] = session
            except (KeyError, ValueError, ParseError):
                continue  # stale or corrupt snapshot; start without it


class ApiServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, store: SessionStore, ui_dir: str | None = None):
        self.store = store
        self.ui_dir = Path(ui_dir) if ui_dir else None
        super().__init__(address, ApiHandler)


def create_server(port: int, state_dir: str | None = None, ui_dir: str | None = None) -> ApiServer:
    return ApiServer(("127.0.0.1", port), SessionStore(state_dir), ui_dir=ui_dir)


def _wei_amount(value) -> int:
    """Accepts 7, "7", "7 wei", and "1 ether"."""
    if isinstance(value, int):
        return value
    text = str(value).strip()
    if text.endswith("ether"):
        return int(text[: -len("ether")].strip()) * 10**18
    if text.endswith("wei"):
        return int(text[: -len("wei")].strip())
    return int(text, 0)


def _literal_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def compose_case_dbdl(doc: dict, uploads: dict[str, str]) -> str:
    """Build DBDL text from the wizard's JSON case description."""
    lines = [f'testcase "{doc.get("name", "case")}" {{']
    for upload_name, text in uploads.items():
        for contract in parse_source(text).contracts:
            lines.append(f'    contract {contract.name} from "{upload_name}"')
    for acct in doc.get("accounts", []):
        lines.append(f'    account {acct["alias"]} {{ balance: {_wei_amount(acct["balance"])} wei }}')
    prestate = doc.get("prestate", [])
    if prestate:
        lines.append("    prestate {")
        for entry in prestate:
            lines.append(f'        {entry["path"]} = {_literal_text(entry["value"])}')
        lines.append("    }")
    lines.append("    events {")
    for event in doc.get("events", []):
        args = ", ".join(_literal_text(a) for a in event.get("args", []))
        line = f'        call {event["contract"]}.{event["function"]}({args}) from {event["sender"]}'
        value = _wei_amount(event.get("value", 0))
        if value:
            line += f" value {value} wei"
        lines.append(line)
    lines.append("    }")
    expectations = doc.get("expectations", [])
    if expectations:
        lines.append("    expect {")
        for exp in expectations:
            lines.append(f'        {exp["path"]} {exp["cmp"]} {_literal_text(exp["value"])}')
        lines.append("    }")
    lines.append("}")
    return "\n".join(lines) + "\n"


class ApiHandler(BaseHTTPRequestHandler):
    server: ApiServer

    def log_message(self, format, *args):  # keep stdout/stderr clean
        pass

    # -- plumbing -----------------------------------------------------------

    def _cors_headers(self) -> list[tuple[str, str]]:
        origin = self.headers.get("Origin", "")
        if origin.startswith("http://localhost") or origin.startswith("http://127.0.0.1"):
            return [
                ("Access-Control-Allow-Origin", origin),
                ("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"),
                ("Access-Control-Allow-Headers", "Content-Type"),
            ]
        return []

    def _send(self, status: int, body: bytes, content_type: str = "application/json") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for name, value in self._cors_headers():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, doc) -> None:
        self._send(status, (json.dumps(doc, indent=2) + "\n").encode("utf-8"))

    def _read_json(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        return json.loads(raw)

    def _session(self, session_id: str) -> Session | None:
        session = self.server.store.get(session_id)
        if session is None:
            self._send_json(404, {"error": "unknown or expired session"})
        return session

    # -- routes ---------------------------------------------------------------

    def do_OPTIONS(self):
        self._send(204, b"", "text/plain")

    def do_GET(self):
        parts = [p for p in self.path.split("?")[0].split("/") if p]
        if parts == ["health"]:
            self._send_json(200, {"status": "ok"})
            return
        if len(parts) == 3 and parts[0] == "sessions" and parts[2] == "report":
            session = self._session(parts[1])
            if session is None:
                return
            with session.lock:
                report = session.report
            if report is None:
                self._send_json(404, {"error": "no report yet"})
                return
            self._send(200, report)
            return
        if self._serve_static(parts):
            return
        self._send_json(404, {"error": "not found"})

    def do_POST(self):
        parts = [p for p in self.path.split("?")[0].split("/") if p]
        if parts == ["sessions"]:
            session = self.server.store.create()
            self._send_json(201, {"id": session.id})
            return
        if len(parts) == 3 and parts[0] == "sessions":
            if parts[2] == "contracts":
                self._upload_contract(parts[1])
                return
            if parts[2] == "run":
                self._run(parts[1])
                return
        self._send_json(404, {"error": "not found"})

    def do_PUT(self):
        parts = [p for p in self.path.split("?")[0].split("/") if p]
        if len(parts) == 3 and parts[0] == "sessions" and parts[2] == "case":
            self._put_case(parts[1])
            return
        self._send_json(404, {"error": "not found"})

    # -- handlers ----------------------------------------------------------------

    def _upload_contract(self, session_id: str) -> None:
        session = self._session(session_id)
        if session is None:
            return
        try:
            doc = self._read_json()
            name = doc["name"]
            source = doc["source"]
        except (ValueError, KeyError):
            self._send_json(400, {"error": "body must be JSON with 'name' and 'source'"})
            return
        try:
            unit = parse_source(source)
        except ParseError as err:
            self._send_json(422, {"diagnostics": [d.to_json() for d in err.diagnostics]})
            return
        with session.lock:
            session.sources[name] = source
            session.units[name] = unit
            listing = describe_variables(unit)
        self.server.store.snapshot(session)
        self._send_json(200, {"variables": listing})

    def _put_case(self, session_id: str) -> None:
        session = self._session(session_id)
        if session is None:
            return
        try:
            doc = self._read_json()
        except ValueError:
            self._send_json(400, {"error": "invalid JSON body"})
            return
        with session.lock:
            uploads = dict(session.sources)
            contracts = session.contracts()
        try:
            text = compose_case_dbdl(doc, uploads)
            suite = parse_dbdl(text)
        except (KeyError, ValueError) as err:
            self._send_json(400, {"error": f"malformed case description: {err}"})
            return
        except ParseError as err:
            self._send_json(422, {"diagnostics": [d.to_json() for d in err.diagnostics]})
            return
        diagnostics = validate(suite, list(contracts.values()))
        if diagnostics:
            self._send_json(422, {"diagnostics": [d.to_json() for d in diagnostics]})
            return
        canonical = format_dbdl(suite)
        with session.lock:
            session.draft_dbdl = canonical
        self.server.store.snapshot(session)
        self._send_json(200, {"dbdl": canonical})

    def _run(self, session_id: str) -> None:
        session = self._session(session_id)
        if session is None:
            return
        try:
            doc = self._read_json()
        except ValueError:
            self._send_json(400, {"error": "invalid JSON body"})
            return
        options = doc.get("options") or {}
        with session.lock:
            if session.running:
                self._send_json(409, {"error": "run already in progress"})
                return
            if session.draft_dbdl is None:
                self._send_json(422, {"diagnostics": [{"code": "no-case", "message": "no test case submitted", "line": 0, "col": 0}]})
                return
            session.running = True
            draft = session.draft_dbdl
            units = list(session.units.values())
        try:
            suite = parse_dbdl(draft)
            results = run_suite(
                suite,
                units,
                RunOptions(
                    step_limit=int(options.get("step_limit", DEFAULT_STEP_LIMIT)),
                    jobs=int(options.get("jobs", 1)),
                ),
            )
            report = render_report(analyze(results, float(options.get("threshold", 0.8))), "json")
        except ValidationFailed as err:
            self._send_json(422, {"diagnostics": [d.to_json() for d in err.diagnostics]})
            return
        finally:
            with session.lock:
                session.running = False
        with session.lock:
            session.report = report
        self.server.store.snapshot(session)
        self._send(200, report)

    # -- static files -------------------------------------------------------------

    _CONTENT_TYPES = {
        ".html": "text/html; charset=utf-8",
        ".js": "text/javascript; charset=utf-8",
        ".css": "text/css; charset=utf-8",
        ".map": "application/json",
        ".svg": "image/svg+xml",
    }

    def _serve_static(self, parts: list[str]) -> bool:
        root = self.server.ui_dir
        if root is None:
            return False
        relative = "/".join(parts) if parts else "index.html"
        target = (root / relative).resolve()
        if not str(target).startswith(str(root.resolve())) or not target.is_file():
            return False
        body = target.read_bytes()
        self._send(200, body, self._CONTENT_TYPES.get(target.suffix, "application/octet-stream"))
        return True
