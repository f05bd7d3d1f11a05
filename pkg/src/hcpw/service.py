"""Local training/authentication HTTP service.

Sessions hold a server-side secret mapping, a drill cursor over freshly
generated single-digit challenges, per-cue rehearsal logs, per-answer
timings, and named account records.  The mapping's digits are transmitted
exactly once, inside the mnemonic table of the session-creation response;
no other endpoint ever includes them.

Endpoints (JSON bodies):
  POST /api/session                {n,d,k1,k2,t,seed?}  -> session + mnemonic table
  GET  /api/session/{id}           state without secrets
  POST /api/session/{id}/confirm   mark training confirmed
  GET  /api/session/{id}/challenge current single-digit challenge
  POST /api/session/{id}/answer    {digit, elapsed_ms} -> verdict
  GET  /api/session/{id}/rehearsal cue due-windows (expanding schedule)
  POST /api/session/{id}/account   {label} -> stored account record
  POST /api/session/{id}/login     {label, digits} -> verify result

Sessions are in-memory; with a data directory set (HCP_DATA_DIR or
--data-dir) every mutation is appended to a per-session JSONL event log
and replayed on restart.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from hcpw.accounts import AccountRecord, create_account, verify
from hcpw.params import SchemeParams
from hcpw.rng import make_rng
from hcpw.scheme import (
    Clause,
    SecretMapping,
    gen_clause,
    gen_mapping,
    recalled_indices,
)

DAY_SECONDS = 86_400.0


@dataclass
class Session:
    session_id: str
    mapping: SecretMapping
    rng: np.random.Generator
    created_at: float
    training_confirmed: bool = False
    cursor: int = 0  # answers accepted so far within the current challenge
    challenge_index: int = 0
    current_clause: Clause | None = None
    rehearsal_log: dict[int, list[float]] = field(default_factory=dict)
    timings_ms: list[float] = field(default_factory=list)
    answered: int = 0
    correct: int = 0
    accounts: dict[str, AccountRecord] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def ensure_clause(self) -> Clause:
        if self.current_clause is None:
            self.current_clause = gen_clause(self.mapping.params, self.rng)
        return self.current_clause


class BadRequest(Exception):
    pass


class NotFound(Exception):
    pass


def _require(obj: dict, key: str, kind=int):
    if key not in obj:
        raise BadRequest(f"missing field {key!r}")
    try:
        return kind(obj[key])
    except (TypeError, ValueError):
        raise BadRequest(f"field {key!r} must be {kind.__name__}") from None


class TrainerService:
    """Session store plus request handling, independent of HTTP transport."""

    def __init__(self, data_dir: str | None = None, now_fn=time.time):
        self.sessions: dict[str, Session] = {}
        self.store_lock = threading.Lock()
        self.now_fn = now_fn
        self.data_dir = Path(data_dir) if data_dir else None
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._replay_logs()

    # event persistence

    def _log_path(self, session_id: str) -> Path | None:
        return self.data_dir / f"{session_id}.jsonl" if self.data_dir else None

    def _append_event(self, session_id: str, event: dict) -> None:
        path = self._log_path(session_id)
        if path is None:
            return
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, separators=(",", ":")) + "\n")

    def _replay_logs(self) -> None:
        for path in sorted(self.data_dir.glob("*.jsonl")):
            events = [json.loads(line) for line in path.read_text().splitlines() if line]
            if not events or events[0].get("kind") != "created":
                continue
            head = events[0]
            params = SchemeParams.from_dict(head["params"])
            mapping = SecretMapping(params=params,
                                    digits=np.array(head["digits"], dtype=np.int64))
            session = Session(
                session_id=head["session_id"], mapping=mapping,
                rng=make_rng(head["rng_seed"]), created_at=head["at"],
            )
            self.sessions[session.session_id] = session
            for event in events[1:]:
                self._apply_event(session, event)

    def _apply_event(self, session: Session, event: dict) -> None:
        kind = event.get("kind")
        if kind == "confirmed":
            session.training_confirmed = True
        elif kind == "answer":
            session.answered += 1
            session.correct += int(event["correct"])
            session.timings_ms.append(float(event["elapsed_ms"]))
            session.cursor = event["cursor"]
            session.challenge_index = event["challenge_index"]
            session.current_clause = None
            for cue in event.get("cues", []):
                session.rehearsal_log.setdefault(int(cue), []).append(float(event["at"]))
        elif kind == "account":
            record = AccountRecord.from_dict(event["record"])
            session.accounts[record.account_id] = record

    # operations

    def create_session(self, body: dict) -> dict:
        n = _require(body, "n")
        d = _require(body, "d")
        k1 = _require(body, "k1")
        k2 = _require(body, "k2")
        t = _require(body, "t")
        try:
            params = SchemeParams(d=d, k1=k1, k2=k2, n=n, t=t)
        except ValueError as exc:
            raise BadRequest(str(exc)) from None
        seed = body.get("seed")
        seed = int(seed) if seed is not None else secrets.randbits(63)
        mapping = gen_mapping(params, seed)
        rng_seed = secrets.randbits(63) if body.get("seed") is None else seed + 1
        session = Session(
            session_id=secrets.token_hex(8),
            mapping=mapping,
            rng=make_rng(rng_seed),
            created_at=self.now_fn(),
        )
        with self.store_lock:
            self.sessions[session.session_id] = session
        self._append_event(session.session_id, {
            "kind": "created", "session_id": session.session_id,
            "params": params.to_dict(), "digits": mapping.digits.tolist(),
            "rng_seed": rng_seed, "at": session.created_at,
        })
        table = [
            {"index": i, "image_id": f"object-{i:03d}", "digit": int(v)}
            for i, v in enumerate(mapping.digits)
        ]
        return {"session_id": session.session_id, "params": params.to_dict(),
                "mnemonic_table": table}

    def _session(self, session_id: str) -> Session:
        with self.store_lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise NotFound(f"unknown session {session_id!r}")
        return session

    def session_state(self, session_id: str) -> dict:
        s = self._session(session_id)
        with s.lock:
            mean_ms = float(np.mean(s.timings_ms)) if s.timings_ms else None
            return {
                "session_id": s.session_id,
                "params": s.mapping.params.to_dict(),
                "training_confirmed": s.training_confirmed,
                "challenge_index": s.challenge_index,
                "cursor": s.cursor,
                "answered": s.answered,
                "correct": s.correct,
                "accuracy": (s.correct / s.answered) if s.answered else None,
                "mean_ms": mean_ms,
                "accounts": sorted(s.accounts),
            }

    def confirm_training(self, session_id: str) -> dict:
        s = self._session(session_id)
        with s.lock:
            s.training_confirmed = True
        self._append_event(session_id, {"kind": "confirmed", "at": self.now_fn()})
        return {"training_confirmed": True}

    def current_challenge(self, session_id: str) -> dict:
        s = self._session(session_id)
        with s.lock:
            clause = s.ensure_clause()
            p = s.mapping.params
            return {
                "challenge_index": s.challenge_index,
                "cursor": s.cursor,
                "clause": list(clause.indices),
                "layout": {
                    "slots": list(clause.indices[:p.d]),
                    "index_vars": list(clause.indices[p.d:p.d + p.k1]),
                    "tail_vars": list(clause.indices[p.d + p.k1:]),
                },
                "image_ids": [f"object-{i:03d}" for i in clause.indices],
            }

    def submit_answer(self, session_id: str, body: dict) -> dict:
        s = self._session(session_id)
        digit = _require(body, "digit")
        elapsed_ms = _require(body, "elapsed_ms", float)
        with s.lock:
            p = s.mapping.params
            if not 0 <= digit < p.d:
                raise BadRequest(f"digit must lie in [0, {p.d})")
            clause = s.ensure_clause()
            from hcpw.scheme import eval_f

            expected = eval_f(p, s.mapping.digits[list(clause.indices)])
            correct = digit == expected
            now = self.now_fn()
            cues: list[int] = []
            if correct:
                cues = sorted(recalled_indices(p, s.mapping, clause))
                for cue in cues:
                    s.rehearsal_log.setdefault(cue, []).append(now)
            s.answered += 1
            s.correct += int(correct)
            s.timings_ms.append(float(elapsed_ms))
            s.cursor += 1
            if s.cursor >= p.t:
                s.cursor = 0
                s.challenge_index += 1
            s.current_clause = None
            state = {
                "correct": bool(correct),
                "cursor": s.cursor,
                "challenge_index": s.challenge_index,
                "rehearsed_cues": cues,
                "answered": s.answered,
                "accuracy": s.correct / s.answered,
            }
        self._append_event(session_id, {
            "kind": "answer", "correct": bool(correct), "elapsed_ms": elapsed_ms,
            "cursor": state["cursor"], "challenge_index": state["challenge_index"],
            "cues": cues, "at": now,
        })
        return state

    def rehearsal_state(self, session_id: str) -> dict:
        s = self._session(session_id)
        now = self.now_fn()
        cues = []
        with s.lock:
            for cue, recalls in sorted(s.rehearsal_log.items()):
                first = recalls[0]
                window = 0
                while True:
                    start = first + (2.0**window) * DAY_SECONDS
                    end = first + (2.0 ** (window + 1)) * DAY_SECONDS
                    if any(start <= r < end for r in recalls):
                        window += 1
                        continue
                    break
                cues.append({
                    "cue": cue,
                    "image_id": f"object-{cue:03d}",
                    "recalls": len(recalls),
                    "due_start": first + (2.0**window) * DAY_SECONDS,
                    "due_end": first + (2.0 ** (window + 1)) * DAY_SECONDS,
                    "overdue": now >= first + (2.0 ** (window + 1)) * DAY_SECONDS,
                })
        cues.sort(key=lambda c: c["due_start"])
        return {"now": now, "cues": cues}

    def create_session_account(self, session_id: str, body: dict) -> dict:
        s = self._session(session_id)
        label = str(body.get("label", "")).strip()
        if not label:
            raise BadRequest("account label must be nonempty")
        with s.lock:
            if label in s.accounts:
                raise BadRequest(f"account {label!r} already exists")
            record = create_account(s.mapping, label, s.rng, algorithm="sha256")
            s.accounts[label] = record
        self._append_event(session_id, {"kind": "account", "record": record.to_dict(),
                                        "at": self.now_fn()})
        return {
            "label": label,
            "challenge": [list(c.indices) for c in record.challenge.clauses],
            "algorithm": record.algorithm,
        }

    def login(self, session_id: str, body: dict) -> dict:
        s = self._session(session_id)
        label = str(body.get("label", ""))
        digits = str(body.get("digits", ""))
        with s.lock:
            record = s.accounts.get(label)
            if record is None:
                raise NotFound(f"unknown account {label!r}")
            try:
                ok = verify(record, digits)
            except ValueError as exc:
                raise BadRequest(str(exc)) from None
        return {"ok": bool(ok)}


class _Handler(BaseHTTPRequestHandler):
    service: TrainerService

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, obj: dict) -> None:
        data = json.dumps(obj).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            obj = json.loads(raw.decode("utf-8"))
        except (ValueError, UnicodeDecodeError):
            raise BadRequest("body must be a JSON object") from None
        if not isinstance(obj, dict):
            raise BadRequest("body must be a JSON object")
        return obj

    def _route(self, method: str) -> None:
        try:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            svc = self.service
            if parts[:2] == ["api", "session"]:
                if method == "POST" and len(parts) == 2:
                    self._send(200, svc.create_session(self._body()))
                    return
                if len(parts) >= 3:
                    sid = parts[2]
                    tail = parts[3] if len(parts) > 3 else None
                    if method == "GET" and tail is None:
                        self._send(200, svc.session_state(sid))
                        return
                    if method == "POST" and tail == "confirm":
                        self._send(200, svc.confirm_training(sid))
                        return
                    if method == "GET" and tail == "challenge":
                        self._send(200, svc.current_challenge(sid))
                        return
                    if method == "POST" and tail == "answer":
                        self._send(200, svc.submit_answer(sid, self._body()))
                        return
                    if method == "GET" and tail == "rehearsal":
                        self._send(200, svc.rehearsal_state(sid))
                        return
                    if method == "POST" and tail == "account":
                        self._send(200, svc.create_session_account(sid, self._body()))
                        return
                    if method == "POST" and tail == "login":
                        self._send(200, svc.login(sid, self._body()))
                        return
            self._send(404, {"error": f"no route for {method} {self.path}"})
        except BadRequest as exc:
            self._send(400, {"error": str(exc)})
        except NotFound as exc:
            self._send(404, {"error": str(exc)})
        except Exception as exc:  # pragma: no cover - defensive
            self._send(500, {"error": f"internal error: {exc}"})

    def do_GET(self):
        self._route("GET")

    def do_POST(self):
        self._route("POST")

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()


def make_server(port: int, data_dir: str | None = None,
                now_fn=time.time) -> ThreadingHTTPServer:
    if data_dir is None:
        data_dir = os.environ.get("HCP_DATA_DIR") or None
    service = TrainerService(data_dir=data_dir, now_fn=now_fn)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.service = service  # type: ignore[attr-defined]
    return server


def serve(port: int, data_dir: str | None = None) -> None:
    server = make_server(port, data_dir)
    print(json.dumps({"serving": f"http://127.0.0.1:{server.server_address[1]}"}),
          flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
