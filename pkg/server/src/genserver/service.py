"""Threaded HTTP service speaking the generation wire protocol.

POST /generate takes `{"requests": [{input, target_lang, num_candidates}]}`
and answers `{"candidates": [[{text, score}, ...], ...]}` with exactly one
list per request, in request order. GET /healthz reports readiness.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .config import ServerConfig
from .modes import BadRequest, build_mode, parse_generate_body

logger = logging.getLogger(__name__)


class _Handler(BaseHTTPRequestHandler):
    server_version = "genserver/0.1"
    protocol_version = "HTTP/1.1"

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path == "/healthz":
            self._send_json(200, {"status": "ok", "mode": self.server.mode.name})
        else:
            self._send_json(404, {"error": f"no such path: {self.path}"})

    def do_POST(self):
        if self.path != "/generate":
            self._send_json(404, {"error": f"no such path: {self.path}"})
            return
        try:
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length)
            requests = parse_generate_body(raw)
        except (BadRequest, ValueError) as exc:
            self._send_json(400, {"error": str(exc)})
            return
        if len(requests) > self.server.config.max_batch:
            self._send_json(
                429,
                {"error": f"batch of {len(requests)} exceeds max_batch={self.server.config.max_batch}"},
            )
            return
        try:
            candidates = self.server.mode.generate(requests)
        except BadRequest as exc:
            self._send_json(400, {"error": str(exc)})
            return
        except Exception:
            logger.exception("generation failed")
            self._send_json(500, {"error": "internal generation failure"})
            return
        self._send_json(200, {"candidates": candidates})

    def log_message(self, fmt, *args):
        logger.debug("%s - %s", self.address_string(), fmt % args)


class GenerationServer:
    """Owns the HTTP server plus its serving mode; usable as a context manager."""

    def __init__(self, config: ServerConfig):
        self.config = config
        self.mode = build_mode(config)
        self._httpd = ThreadingHTTPServer((config.host, config.port), _Handler)
        self._httpd.config = config
        self._httpd.mode = self.mode
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._httpd.server_port

    @property
    def url(self) -> str:
        return f"http://{self.config.host}:{self.port}"

    def start(self) -> None:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        logger.info("serving %s mode on %s", self.mode.name, self.url)

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=10)

    def serve_forever(self) -> None:
        logger.info("serving %s mode on %s", self.mode.name, self.url)
        self._httpd.serve_forever()

    def __enter__(self) -> "GenerationServer":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()
