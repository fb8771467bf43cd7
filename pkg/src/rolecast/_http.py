"""Minimal JSON-over-HTTP plumbing shared by the scorer server and the facade."""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .ioutil import dumps_canonical


class BadRequest(Exception):
    pass


class JsonRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def handle_one_request(self):
        self._body_consumed = False
        super().handle_one_request()

    def _consume_body(self) -> bytes:
        if getattr(self, "_body_consumed", False):
            return b""
        self._body_consumed = True
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def read_json(self):
        body = self._consume_body()
        if not body:
            raise BadRequest("empty request body")
        try:
            return json.loads(body)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise BadRequest(f"body is not valid JSON: {exc}") from exc

    def send_json(self, status: int, obj) -> None:
        # drain any unread request body so keep-alive connections stay in sync
        self._consume_body()
        payload = dumps_canonical(obj).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def send_error_json(self, status: int, message: str) -> None:
        self.send_json(status, {"error": message})


def make_server(handler_cls, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """Threaded server; port 0 picks a free port (server.server_address)."""
    return ThreadingHTTPServer((host, port), handler_cls)
