"""Local HTTP/JSON service exposing datasets, search, and statistics.

Built on the standard library's threading HTTP server: the engine is
already read-only after load, so concurrent requests only need the
registry's per-dataset load locks. Binds to loopback unless a host is
given explicitly, keeping private corpora private by default.

Configuration precedence: command-line flag, then environment variable
(RELSEARCH_MANIFEST, RELSEARCH_DATA_ROOT, RELSEARCH_HOST,
RELSEARCH_PORT), then default.
"""

from __future__ import annotations

import json
import logging
import os
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from . import __version__, service
from .errors import (
    AlignmentError,
    FilterValidationError,
    FormatError,
    QueryParseError,
    RelSearchError,
    VariableError,
)
from .ingest import load_manifest
from .service import DatasetRegistry, NotApplicableError, UnknownDatasetError
from .state import decode, from_obj

log = logging.getLogger(__name__)

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8807

ENV_MANIFEST = "RELSEARCH_MANIFEST"
ENV_DATA_ROOT = "RELSEARCH_DATA_ROOT"
ENV_HOST = "RELSEARCH_HOST"
ENV_PORT = "RELSEARCH_PORT"

CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".map": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}

LANDING_PAGE = """<!doctype html>
<meta charset="utf-8">
<title>relsearch</title>
<h1>relsearch service</h1>
<p>No UI build found. Endpoints:</p>
<ul>
<li>GET /datasets</li>
<li>POST /load {"dataset_id": ...}</li>
<li>POST /query, /freq, /crosstab, /compare (query-state JSON body)</li>
<li>GET /export.tsv?state=&lt;token&gt;</li>
</ul>
"""


def error_response(exc: Exception) -> tuple[int, dict]:
    """(status, body) for an exception raised while handling a request."""
    if isinstance(exc, UnknownDatasetError):
        return 404, {"code": "unknown_dataset", "message": str(exc),
                     "detail": None}
    if isinstance(exc, QueryParseError):
        return 400, {"code": "query_parse_error", "message": str(exc),
                     "detail": {"position": exc.position,
                                "segment": exc.segment}}
    if isinstance(exc, FilterValidationError):
        return 400, {"code": "invalid_filter", "message": str(exc),
                     "detail": {"allowed": exc.allowed}}
    if isinstance(exc, VariableError):
        return 400, {"code": "invalid_variable", "message": str(exc),
                     "detail": {"allowed": exc.allowed}}
    if isinstance(exc, NotApplicableError):
        return 400, {"code": "test_not_applicable", "message": str(exc),
                     "detail": exc.payload}
    if isinstance(exc, (FormatError, AlignmentError)):
        return 400, {"code": "bad_request", "message": str(exc),
                     "detail": None}
    if isinstance(exc, RelSearchError):
        return 400, {"code": "bad_request", "message": str(exc),
                     "detail": None}
    log.exception("request failed")
    return 500, {"code": "internal_error", "message": str(exc),
                 "detail": None}


class RequestHandler(BaseHTTPRequestHandler):
    registry: DatasetRegistry
    static_dir: str | None = None
    protocol_version = "HTTP/1.1"
    server_version = f"relsearch/{__version__}"

    def log_message(self, fmt, *args):  # route through logging, not stderr
        log.debug("%s %s", self.address_string(), fmt % args)

    # -- plumbing ----------------------------------------------------------

    def _send_bytes(self, status: int, content_type: str, body: bytes,
                    extra_headers: dict | None = None):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for k, v in (extra_headers or {}).items():
            self.send_header(k, v)
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, obj, status: int = 200):
        body = json.dumps(obj, ensure_ascii=False).encode("utf-8")
        self._send_bytes(status, "application/json; charset=utf-8", body)

    def _send_exception(self, exc: Exception):
        status, body = error_response(exc)
        self._send_json(body, status)

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise FormatError("empty request body")
        try:
            return json.loads(raw.decode("utf-8"))
        except (ValueError, UnicodeError) as exc:
            raise FormatError(f"request body is not JSON: {exc}") from None

    # -- routes ------------------------------------------------------------

    def do_GET(self):
        url = urlparse(self.path)
        try:
            if url.path == "/datasets":
                self._send_json(
                    {"datasets": service.list_datasets(self.registry)})
            elif url.path == "/export.tsv":
                tokens = parse_qs(url.query).get("state")
                if not tokens:
                    raise FormatError("missing state parameter")
                st = decode(tokens[0])
                filename, text = service.export_tsv(self.registry, st)
                self._send_bytes(
                    200, "text/tab-separated-values; charset=utf-8",
                    text.encode("utf-8"),
                    {"Content-Disposition":
                     f'attachment; filename="{filename}"'})
            else:
                self._serve_static(url.path)
        except Exception as exc:  # noqa: BLE001 - mapped to JSON errors
            self._send_exception(exc)

    def do_POST(self):
        url = urlparse(self.path)
        try:
            body = self._read_json()
            if url.path == "/load":
                dataset_id = str(body.get("dataset_id", ""))
                loaded = self.registry.get(dataset_id)
                self._send_json(service.dataset_info(loaded))
            elif url.path == "/query":
                self._send_json(
                    service.run_query(self.registry, from_obj(body)))
            elif url.path == "/freq":
                self._send_json(
                    service.run_freq(self.registry, from_obj(body)))
            elif url.path == "/crosstab":
                self._send_json(
                    service.run_crosstab(self.registry, from_obj(body)))
            elif url.path == "/compare":
                self._send_json(
                    service.run_compare(self.registry, from_obj(body)))
            else:
                self._send_json({"code": "not_found",
                                 "message": f"no such endpoint {url.path}",
                                 "detail": None}, 404)
        except Exception as exc:  # noqa: BLE001 - mapped to JSON errors
            self._send_exception(exc)

    def _serve_static(self, path: str):
        if self.static_dir is None:
            if path in ("/", "/index.html"):
                self._send_bytes(200, "text/html; charset=utf-8",
                                 LANDING_PAGE.encode("utf-8"))
            else:
                self._send_json({"code": "not_found",
                                 "message": f"no such endpoint {path}",
                                 "detail": None}, 404)
            return
        rel = path.lstrip("/") or "index.html"
        root = os.path.realpath(self.static_dir)
        target = os.path.realpath(os.path.join(root, rel))
        if not target.startswith(root + os.sep) and target != root:
            self._send_json({"code": "not_found", "message": "bad path",
                             "detail": None}, 404)
            return
        if os.path.isdir(target):
            target = os.path.join(target, "index.html")
        if not os.path.isfile(target):
            self._send_json({"code": "not_found",
                             "message": f"no such file {path}",
                             "detail": None}, 404)
            return
        ext = os.path.splitext(target)[1].lower()
        ctype = CONTENT_TYPES.get(ext, "application/octet-stream")
        with open(target, "rb") as fh:
            self._send_bytes(200, ctype, fh.read())


def make_server(registry: DatasetRegistry, host: str = DEFAULT_HOST,
                port: int = DEFAULT_PORT,
                static_dir: str | None = None) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (RequestHandler,), {
        "registry": registry,
        "static_dir": static_dir,
    })
    return ThreadingHTTPServer((host, port), handler)


def default_static_dir() -> str | None:
    """The UI build shipped next to this package, when present."""
    here = os.path.dirname(os.path.abspath(__file__))
    for candidate in (
        os.path.join(here, "webui"),
        os.path.normpath(os.path.join(here, "..", "..", "frontend", "dist")),
    ):
        if os.path.isfile(os.path.join(candidate, "index.html")):
            return candidate
    return None


def serve(manifest_path: str, *, host: str | None = None,
          port: int | None = None, data_root: str | None = None,
          static_dir: str | None = None) -> None:
    host = host or os.environ.get(ENV_HOST) or DEFAULT_HOST
    if port is None:
        port = int(os.environ.get(ENV_PORT) or DEFAULT_PORT)
    entries = load_manifest(manifest_path, data_root=data_root)
    registry = DatasetRegistry(entries)
    static = static_dir or default_static_dir()
    httpd = make_server(registry, host, port, static)
    names = ", ".join(registry.dataset_ids()) or "none"
    print(f"relsearch serving on http://{host}:{port} (datasets: {names})")
    if static:
        print(f"ui: {static}")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
