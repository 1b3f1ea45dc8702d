"""Local HTTP service: the browser client's only window into the pipeline.

Stateless by construction — every request is parsed, generated, and
serialized independently, so concurrent requests cannot interact.  The
JSON payloads round through the same canonicalization as the CLI's file
exports, keeping the two interfaces byte-identical on equal input.
"""

from __future__ import annotations

import json
import mimetypes
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import MalformedInput
from .export_io import canonical_json, model_to_dict, round_floats
from .params import RampParams, load_rules, params_from_overrides, params_to_dict
from .pipeline import generate

_JSON = "application/json; charset=utf-8"


def _defaults_payload() -> dict:
    return {
        "params": params_to_dict(RampParams()),
        "rules": load_rules().to_dict(),
    }


def handle_generate(body: bytes) -> tuple[int, dict]:
    """Pure request -> (http status, response document) mapping."""
    try:
        doc = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        return 400, {"error": f"request body is not valid JSON: {exc}"}
    if not isinstance(doc, dict):
        return 400, {"error": "request body must be a JSON object"}

    env = doc.get("environment")
    if env is None:
        return 400, {"error": "request needs an 'environment' member"}
    env_text = env if isinstance(env, str) else json.dumps(env)

    try:
        params = params_from_overrides(doc.get("params"))
    except MalformedInput as exc:
        return 400, {"error": str(exc)}

    res = generate(env_text, params=params)
    report = round_floats(res.report)
    if res.error_kind == "malformed_input":
        return 400, {"error": res.error, "report": report}
    if res.stage_score != 4:
        return 422, {"error": res.error or "generation fell short of full compliance",
                     "report": report}
    payload = {
        "report": report,
        "model": round_floats(model_to_dict(res.model, res.path)),
    }
    return 200, payload


def make_handler(static_dir: str | None):
    static_root = Path(static_dir).resolve() if static_dir else None

    class Handler(BaseHTTPRequestHandler):
        server_version = "rampgen/0.1"

        def log_message(self, fmt, *args):  # keep test output clean
            pass

        def _send_json(self, status: int, doc: dict) -> None:
            body = canonical_json(doc).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", _JSON)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_static(self, rel: str) -> None:
            if static_root is None:
                self._send_json(404, {"error": "no static directory configured"})
                return
            rel = rel.lstrip("/") or "index.html"
            target = (static_root / rel).resolve()
            if static_root not in target.parents and target != static_root:
                self._send_json(404, {"error": "not found"})
                return
            if target.is_dir():
                target = target / "index.html"
            if not target.is_file():
                self._send_json(404, {"error": "not found"})
                return
            ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
            data = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self):
            if self.path == "/healthz":
                body = b"ok\n"
                self.send_response(200)
                self.send_header("Content-Type", "text/plain; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
            elif self.path == "/api/defaults":
                self._send_json(200, round_floats(_defaults_payload()))
            elif self.path.startswith("/api/"):
                self._send_json(404, {"error": "unknown endpoint"})
            else:
                self._send_static(self.path)

        def do_POST(self):
            if self.path != "/api/generate":
                self._send_json(404, {"error": "unknown endpoint"})
                return
            length = int(self.headers.get("Content-Length") or 0)
            body = self.rfile.read(length)
            status, doc = handle_generate(body)
            self._send_json(status, doc)

    return Handler


def make_server(port: int = 0, static_dir: str | None = None,
                host: str = "127.0.0.1") -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), make_handler(static_dir))


def serve(port: int, static_dir: str | None = None,
          host: str = "127.0.0.1") -> None:
    server = make_server(port, static_dir, host)
    addr = server.server_address
    print(f"serving on http://{addr[0]}:{addr[1]}/ "
          + (f"(static: {static_dir})" if static_dir else "(API only)"))
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
