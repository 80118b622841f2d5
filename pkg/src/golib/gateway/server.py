"""Threaded HTTP server over the dispatch table, with optional static files."""
from __future__ import annotations

import json
import mimetypes
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from ..app import Platform
from . import api

MAX_BODY_BYTES = 32 * 1024 * 1024  # fits two 10 MB images as base64


class GatewayHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    platform: Platform = None
    static_dir: str | None = None

    # silence per-request stderr logging
    def log_message(self, format, *args):
        pass

    def _handle(self, method: str) -> None:
        parsed = urlsplit(self.path)
        if not parsed.path.startswith("/v1/"):
            if method == "GET" and self.static_dir:
                return self._serve_static(parsed.path)
            return self._respond(api.error_response("UNKNOWN_ROUTE", f"no route for {parsed.path}"))

        query = {k: v[0] for k, v in parse_qs(parsed.query).items()}
        body = {}
        length = int(self.headers.get("Content-Length") or 0)
        if length:
            if length > MAX_BODY_BYTES:
                return self._respond(api.error_response("VALIDATION_FAILED", "request body too large"))
            raw = self.rfile.read(length)
            try:
                body = json.loads(raw) if raw.strip() else {}
                if not isinstance(body, dict):
                    raise ValueError("body must be a JSON object")
            except (ValueError, json.JSONDecodeError):
                return self._respond(api.error_response("VALIDATION_FAILED", "body is not valid JSON"))

        headers = {k.lower(): v for k, v in self.headers.items()}
        try:
            response = api.dispatch(self.platform, method, parsed.path, query, body, headers)
        except Exception as exc:  # a handler bug must not kill the connection thread
            response = api.error_response("STORAGE_FAILURE", f"internal error: {exc}")
        self._respond(response)

    def _respond(self, response: api.Response) -> None:
        payload = response.body_bytes()
        self.send_response(response.status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self._cors()
        for name, value in response.headers.items():
            self.send_header(name, value)
        self.end_headers()
        if payload:
            self.wfile.write(payload)

    def _serve_static(self, path: str) -> None:
        rel = path.lstrip("/") or "index.html"
        full = os.path.normpath(os.path.join(self.static_dir, rel))
        if not full.startswith(os.path.abspath(self.static_dir)):
            return self._respond(api.error_response("UNKNOWN_ROUTE", "bad path"))
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        if not os.path.exists(full):
            # single-page app: unknown paths fall back to the shell
            full = os.path.join(self.static_dir, "index.html")
            if not os.path.exists(full):
                return self._respond(api.error_response("UNKNOWN_ROUTE", path))
        with open(full, "rb") as f:
            data = f.read()
        self.send_response(200)
        self.send_header("Content-Type", mimetypes.guess_type(full)[0] or "application/octet-stream")
        self.send_header("Content-Length", str(len(data)))
        self._cors()
        self.end_headers()
        self.wfile.write(data)

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, PATCH, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Authorization, Content-Type")

    def do_GET(self):
        self._handle("GET")

    def do_POST(self):
        self._handle("POST")

    def do_PUT(self):
        self._handle("PUT")

    def do_PATCH(self):
        self._handle("PATCH")

    def do_DELETE(self):
        self._handle("DELETE")

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Content-Length", "0")
        self._cors()
        self.end_headers()


class GatewayServer:
    """Owns the listening socket; requests run on the handler thread pool."""

    def __init__(self, platform: Platform, port: int = 0, static_dir: str | None = None):
        handler = type(
            "BoundHandler",
            (GatewayHandler,),
            {
                "platform": platform,
                "static_dir": os.path.abspath(static_dir) if static_dir else None,
            },
        )
        self.httpd = ThreadingHTTPServer(("127.0.0.1", port), handler)
        self.httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    def start_background(self) -> "GatewayServer":
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self.httpd.serve_forever()

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread:
            self._thread.join(timeout=5)
