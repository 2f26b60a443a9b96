"""Local replay server for recorded chat-completions fixtures.

A fixture is a directory holding ``request.json`` (the expected request:
model, message roles, temperature, max_tokens) and ``response.json``::

    {"status": 200, "body": {...}}          # JSON reply
    {"status": 200, "raw": "not json"}      # verbatim text reply
    {"status": 200, "delay_ms": 3000, ...}  # slow reply, for timeouts
"""
from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures" / "llm"


def load_fixture(name_or_path) -> tuple[dict, dict]:
    path = Path(name_or_path)
    if not path.is_dir():
        path = FIXTURE_DIR / str(name_or_path)
    request = json.loads((path / "request.json").read_text())
    response = json.loads((path / "response.json").read_text())
    return request, response


def request_matches(expected: dict, actual: dict) -> bool:
    """Compare the recorded request shape with what the client sent."""
    if expected.get("model") != actual.get("model"):
        return False
    roles = [m.get("role") for m in actual.get("messages", [])]
    if roles != [m["role"] for m in expected.get("messages", [])]:
        return False
    for key in ("temperature", "max_tokens"):
        if key in expected and expected[key] != actual.get(key):
            return False
    return True


class StubLlmServer:
    """Serve one recorded response for every POST; keeps the received requests."""

    def __init__(self, fixture, host: str = "127.0.0.1"):
        self.expected, self.response = load_fixture(fixture) if not isinstance(fixture, tuple) else fixture
        self.requests: list[dict] = []
        self.headers: list[dict] = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output quiet
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                payload = self.rfile.read(length)
                try:
                    stub.requests.append(json.loads(payload))
                except ValueError:
                    stub.requests.append({"_raw": payload.decode("utf-8", "replace")})
                stub.headers.append(dict(self.headers))
                spec = stub.response
                if spec.get("delay_ms"):
                    time.sleep(spec["delay_ms"] / 1000.0)
                if "raw" in spec:
                    data = spec["raw"].encode()
                    ctype = "text/plain"
                else:
                    data = json.dumps(spec.get("body", {})).encode()
                    ctype = "application/json"
                try:
                    self.send_response(spec.get("status", 200))
                    self.send_header("Content-Type", ctype)
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                except (BrokenPipeError, ConnectionResetError):
                    pass

        self._server = ThreadingHTTPServer((host, 0), Handler)
        self._server.daemon_threads = True
        self._thread: Optional[threading.Thread] = None

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/v1/chat/completions"

    def __enter__(self) -> "StubLlmServer":
        self._thread = threading.Thread(target=self._server.serve_forever, args=(0.05,), daemon=True)
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self._server.shutdown()
        self._server.server_close()
