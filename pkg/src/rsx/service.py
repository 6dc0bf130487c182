"""Interactive stepper service.

Speaks newline-delimited JSON over a loopback TCP socket. Each request is one
line:

    {"id": n, "op": "load|redexes|apply|reset", "session": tok?,
     "text": str?, "redex": key?}

and each response one line:

    {"id": n, "ok": bool, "error": str?, "session": tok?,
     "canonical": str?, "redexes": {"forward": [...], "backward": [...]}?}

Redex entries carry a stable content-hash key, the rule name, the label, and
a human-readable description. The service adds no semantics of its own: the
state after any sequence of applies equals `replay_keys` over the same keys.
Sessions are independent; operations within one session are serialized.
"""
from __future__ import annotations

import json
import secrets
import socket
import socketserver
import threading
from dataclasses import dataclass, field

from .congruence import canonicalize
from .errors import RsxError, StaleRedex, UnknownSession
from .semantics import Redex, apply_redex, enumerate_backward, enumerate_forward
from .surface import parse_config
from .syntax import Configuration


@dataclass
class SessionState:
    root: Configuration
    current: Configuration
    redexes: dict[str, Redex]
    # applied steps as (redex, canonical text after it); replaying the redex
    # keys from the root always reproduces `current`
    history: list[tuple[Redex, str]] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _redex_listing(cfg: Configuration) -> tuple[dict[str, Redex], dict]:
    forward = enumerate_forward(cfg)
    backward = enumerate_backward(cfg)
    mapping = {r.key: r for r in forward + backward}
    listing = {"forward": [r.to_json() for r in forward],
               "backward": [r.to_json() for r in backward]}
    return mapping, listing


class StepperServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, port: int = 0, host: str = "127.0.0.1"):
        super().__init__((host, port), _Handler)
        self.sessions: dict[str, SessionState] = {}
        self.sessions_lock = threading.Lock()

    @property
    def port(self) -> int:
        return self.server_address[1]

    # -- operations

    def _get_session(self, req: dict) -> tuple[str, SessionState]:
        tok = req.get("session")
        with self.sessions_lock:
            state = self.sessions.get(tok)
        if state is None:
            raise UnknownSession(f"no session {tok!r}")
        return tok, state

    def dispatch(self, req: dict) -> dict:
        rid = req.get("id")
        try:
            op = req.get("op")
            if op == "load":
                return self._op_load(rid, req)
            if op == "redexes":
                return self._op_redexes(rid, req)
            if op == "apply":
                return self._op_apply(rid, req)
            if op == "reset":
                return self._op_reset(rid, req)
            return {"id": rid, "ok": False, "error": f"unknown op {op!r}"}
        except RsxError as e:
            resp = {"id": rid, "ok": False,
                    "error": f"{type(e).__name__}: {e}"}
            if req.get("session"):
                resp["session"] = req["session"]
            return resp

    def _op_load(self, rid, req: dict) -> dict:
        cfg = canonicalize(parse_config(req.get("text", ""))).to_configuration()
        mapping, listing = _redex_listing(cfg)
        tok = secrets.token_hex(8)
        with self.sessions_lock:
            self.sessions[tok] = SessionState(cfg, cfg, mapping)
        return {"id": rid, "ok": True, "session": tok,
                "canonical": canonicalize(cfg).text, "redexes": listing}

    def _op_redexes(self, rid, req: dict) -> dict:
        tok, state = self._get_session(req)
        with state.lock:
            _, listing = _redex_listing(state.current)
            return {"id": rid, "ok": True, "session": tok,
                    "canonical": canonicalize(state.current).text,
                    "redexes": listing}

    def _op_apply(self, rid, req: dict) -> dict:
        tok, state = self._get_session(req)
        key = req.get("redex")
        with state.lock:
            r = state.redexes.get(key)
            if r is None:
                raise StaleRedex(f"redex key {key!r} is not applicable now")
            canon = canonicalize(apply_redex(state.current, r))
            state.current = canon.to_configuration()
            state.redexes, listing = _redex_listing(state.current)
            state.history.append((r, canon.text))
            return {"id": rid, "ok": True, "session": tok,
                    "canonical": canon.text, "redexes": listing}

    def _op_reset(self, rid, req: dict) -> dict:
        tok, state = self._get_session(req)
        with state.lock:
            state.current = state.root
            state.redexes, listing = _redex_listing(state.root)
            state.history.clear()
            return {"id": rid, "ok": True, "session": tok,
                    "canonical": canonicalize(state.root).text,
                    "redexes": listing}


class _Handler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        for line in self.rfile:
            line = line.strip()
            if not line:
                continue
            try:
                req = json.loads(line)
            except json.JSONDecodeError as e:
                resp = {"id": None, "ok": False, "error": f"ParseError: {e}"}
            else:
                resp = self.server.dispatch(req)
            self.wfile.write(json.dumps(resp).encode() + b"\n")
            self.wfile.flush()


def serve(port: int) -> None:
    server = StepperServer(port)
    print(f"rsx stepper listening on 127.0.0.1:{server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


class StepperClient:
    """Line-oriented client for tests and scripts."""

    def __init__(self, port: int, host: str = "127.0.0.1"):
        self.sock = socket.create_connection((host, port), timeout=30)
        self.file = self.sock.makefile("rwb")
        self._id = 0

    def request(self, op: str, **fields) -> dict:
        self._id += 1
        req = {"id": self._id, "op": op, **fields}
        self.file.write(json.dumps(req).encode() + b"\n")
        self.file.flush()
        line = self.file.readline()
        if not line:
            raise ConnectionError("service closed the connection")
        resp = json.loads(line)
        assert resp.get("id") == self._id
        return resp

    def close(self) -> None:
        try:
            self.file.close()
        finally:
            self.sock.close()
