"""HTTP service: hosts scenario documents and exposes the computation
and benchmark APIs consumed by the web UI and third parties.

Hosted documents are served verbatim from a directory (one ``{id}.json``
file per scenario), so any instance can play the "other server" in a
distributed setup: a second instance resolves links into this one over
plain GET.  The service is stateless; the resolver cache is shared
across requests and internally synchronized.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any
from urllib.parse import parse_qs, urlsplit

from cfs.engine import (
    ComputationFailedError,
    InsufficientScenariosError,
    NoCommonKeysError,
    benchmark,
    compute,
)
from cfs.errors import CfsError
from cfs.resolver import (
    CycleDetectedError,
    DepthExceededError,
    DocumentBudgetExceededError,
    FetchFailedError,
    ParseFailedError,
    Resolver,
    ResolverConfig,
)
from cfs.schema import SchemaViolationError, parse_scenario
from cfs.units import DEFAULT_REGISTRY, UnitRegistry

__all__ = ["ApiError", "ServerConfig", "build_server", "serve"]

_ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]+$")
_MAX_BODY = 1 << 20  # 1 MiB request body cap

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}

_FALLBACK_SHELL = """<!doctype html>
<html>
<head><meta charset="utf-8"><title>Carbon footprint scenarios</title></head>
<body>
<h1>Carbon footprint scenario service</h1>
<p>The interactive viewer is not bundled with this instance.
The API is available:</p>
<ul>
<li><code>GET /scenarios/{id}</code> &mdash; hosted scenario documents</li>
<li><code>GET /api/compute?uri=...</code> or <code>?id=...</code>,
    <code>POST /api/compute</code> &mdash; emission reports</li>
<li><code>GET /api/benchmark?ids=a,b,...</code> &mdash; scenario comparison</li>
</ul>
</body>
</html>
"""


@dataclass(frozen=True)
class ApiError(Exception):
    """Error payload shape shared by every non-2xx API response."""

    status: int  # 400 | 404 | 408 | 422 | 502
    code: str
    message: str
    detail: Any = None

    def to_json_obj(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"status": self.status, "code": self.code, "message": self.message}
        if self.detail is not None:
            obj["detail"] = self.detail
        return obj


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    scenario_dir: Path | None = None
    ui_dir: Path | None = None
    resolver: ResolverConfig = field(default_factory=ResolverConfig)


def _api_error(exc: Exception) -> ApiError:
    if isinstance(exc, ApiError):
        return exc
    if isinstance(exc, CycleDetectedError):
        return ApiError(400, "cycle_detected", str(exc), {"cycle": [str(u) for u in exc.path]})
    if isinstance(exc, FetchFailedError):
        if exc.timeout:
            return ApiError(408, "timeout", str(exc), {"uri": str(exc.uri)})
        return ApiError(502, "fetch_failed", str(exc), {"uri": str(exc.uri)})
    if isinstance(exc, ParseFailedError):
        detail = {
            "uri": str(exc.uri),
            "violations": [
                {"path": v.path, "rule": v.rule, "message": v.message, "severity": v.severity}
                for v in exc.violations
            ],
        }
        return ApiError(422, "parse_failed", str(exc), detail)
    if isinstance(exc, SchemaViolationError):
        detail = {
            "violations": [
                {"path": v.path, "rule": v.rule, "message": v.message, "severity": v.severity}
                for v in exc.violations
            ]
        }
        return ApiError(422, "parse_failed", str(exc), detail)
    if isinstance(exc, ComputationFailedError):
        return ApiError(422, "computation_failed", str(exc), {"path": list(exc.path)})
    if isinstance(exc, NoCommonKeysError):
        detail = {
            "key_sets": {
                str(r.scenario_uri): sorted(r.grand_total) for r in exc.reports
            }
        }
        return ApiError(400, "no_common_keys", str(exc), detail)
    if isinstance(exc, InsufficientScenariosError):
        return ApiError(400, "insufficient_scenarios", str(exc))
    if isinstance(exc, DepthExceededError):
        return ApiError(400, "depth_exceeded", str(exc))
    if isinstance(exc, DocumentBudgetExceededError):
        return ApiError(400, "document_budget_exceeded", str(exc))
    if isinstance(exc, CfsError):
        return ApiError(400, "bad_request", str(exc))
    return ApiError(502, "internal_error", f"{type(exc).__name__}: {exc}")


class _Context:
    """Shared immutable configuration plus the cross-request resolver."""

    def __init__(self, config: ServerConfig, registry: UnitRegistry):
        self.config = config
        self.registry = registry
        self.resolver = Resolver(config.resolver, registry=registry)


class _Handler(BaseHTTPRequestHandler):
    context: _Context  # bound by build_server
    protocol_version = "HTTP/1.1"

    # -- plumbing -----------------------------------------------------------

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, obj: Any) -> None:
        body = json.dumps(obj, indent=2).encode("utf-8")
        self._send(status, body, "application/json")

    def _send_error_obj(self, error: ApiError) -> None:
        self._send_json(error.status, error.to_json_obj())

    def _query(self) -> dict[str, list[str]]:
        return parse_qs(urlsplit(self.path).query, keep_blank_values=True)

    def _route(self) -> str:
        return urlsplit(self.path).path

    def _self_base(self) -> str:
        host = self.headers.get("Host") or "{}:{}".format(*self.server.server_address)
        return f"http://{host}"

    # -- request entry points ------------------------------------------------

    def do_GET(self) -> None:  # noqa: N802 (http.server interface)
        route = self._route()
        try:
            if route.startswith("/scenarios/"):
                self._get_scenario(route[len("/scenarios/"):])
            elif route == "/api/compute":
                self._get_compute()
            elif route == "/api/benchmark":
                self._get_benchmark()
            elif route.startswith("/api/"):
                raise ApiError(404, "not_found", f"no such endpoint: {route}")
            else:
                self._get_static(route)
        except Exception as exc:  # every failure answers in the ApiError shape
            self._send_error_obj(_api_error(exc))

    def do_POST(self) -> None:  # noqa: N802
        route = self._route()
        try:
            if route == "/api/compute":
                self._post_compute()
            else:
                raise ApiError(404, "not_found", f"no such endpoint: {route}")
        except Exception as exc:
            self._send_error_obj(_api_error(exc))

    def do_OPTIONS(self) -> None:  # noqa: N802 (CORS preflight)
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    # -- hosted documents -----------------------------------------------------

    def _get_scenario(self, identifier: str) -> None:
        directory = self.context.config.scenario_dir
        if identifier.endswith(".json"):
            # Documents may link each other by filename; keep those URIs
            # working when the directory is hosted.
            identifier = identifier[: -len(".json")]
        if directory is None or not _ID_PATTERN.match(identifier):
            raise ApiError(404, "not_found", f"unknown scenario id {identifier!r}")
        path = directory / f"{identifier}.json"
        if not path.is_file():
            raise ApiError(404, "not_found", f"unknown scenario id {identifier!r}")
        # Served verbatim: hosting must stay transparent.
        self._send(200, path.read_bytes(), "application/json")

    # -- computation ----------------------------------------------------------

    def _uri_for(self, value: str) -> str:
        """An ``ids`` entry is either a bare hosted id or a full URI."""
        if _ID_PATTERN.match(value):
            return f"{self._self_base()}/scenarios/{value}"
        return value

    def _get_compute(self) -> None:
        params = self._query()
        if "uri" in params and params["uri"][0]:
            uri = params["uri"][0]
        elif "id" in params and params["id"][0]:
            uri = self._uri_for(params["id"][0])
        else:
            raise ApiError(400, "bad_request", "provide a 'uri' or 'id' query parameter")
        tree = self.context.resolver.resolve(uri)
        report = compute(tree, self.context.registry)
        self._send_json(200, report.to_json_obj())

    def _post_compute(self) -> None:
        length = int(self.headers.get("Content-Length") or 0)
        if length <= 0:
            raise ApiError(400, "bad_request", "request body required")
        if length > _MAX_BODY:
            raise ApiError(400, "bad_request", "request body too large")
        body = self.rfile.read(length)
        try:
            payload = json.loads(body, parse_float=Decimal)
        except (json.JSONDecodeError, ValueError) as exc:
            raise ApiError(400, "bad_request", f"request body is not valid JSON: {exc}")
        if isinstance(payload, dict) and "scenario" in payload:
            scenario_obj = payload["scenario"]
            base = payload.get("base")
        else:
            scenario_obj, base = payload, None
        origin = base if isinstance(base, str) and base else "inline:post"
        # Decimals re-serialize as strings; the parser accepts both forms.
        scenario = parse_scenario(
            json.dumps(scenario_obj, default=str), origin, registry=self.context.registry
        )
        tree = self.context.resolver.resolve_inline(scenario, base=origin)
        report = compute(tree, self.context.registry)
        self._send_json(200, report.to_json_obj())

    def _get_benchmark(self) -> None:
        params = self._query()
        raw = params.get("ids", [""])[0]
        ids = [part.strip() for part in raw.split(",") if part.strip()]
        if len(ids) < 2:
            raise ApiError(400, "insufficient_scenarios", "provide at least 2 ids (comma-separated)")
        trees = [self.context.resolver.resolve(self._uri_for(i)) for i in ids]
        result = benchmark(trees, self.context.registry)
        self._send_json(200, result.to_json_obj())

    # -- static UI --------------------------------------------------------------

    def _get_static(self, route: str) -> None:
        ui_dir = self.context.config.ui_dir
        name = route.lstrip("/") or "index.html"
        if ui_dir is not None:
            candidate = (ui_dir / name).resolve()
            try:
                candidate.relative_to(ui_dir.resolve())
            except ValueError:
                raise ApiError(404, "not_found", "no such asset")
            if candidate.is_file():
                content_type = _CONTENT_TYPES.get(candidate.suffix, "application/octet-stream")
                self._send(200, candidate.read_bytes(), content_type)
                return
        if name == "index.html":
            # Keep the shell reachable so ?id=/?data= deep links stay valid
            # even before the UI bundle is built.
            self._send(200, _FALLBACK_SHELL.encode("utf-8"), "text/html; charset=utf-8")
            return
        raise ApiError(404, "not_found", f"no such asset: {route}")


def build_server(
    config: ServerConfig, *, registry: UnitRegistry = DEFAULT_REGISTRY
) -> ThreadingHTTPServer:
    """Create (and bind) the HTTP server; caller drives serve_forever()."""
    context = _Context(config, registry)

    class Handler(_Handler):
        pass

    Handler.context = context
    return ThreadingHTTPServer((config.host, config.port), Handler)


def serve(config: ServerConfig, *, registry: UnitRegistry = DEFAULT_REGISTRY) -> None:
    """Run until interrupted; access log goes to standard error."""
    httpd = build_server(config, registry=registry)
    host, port = httpd.server_address[:2]
    print(f"serving on http://{host}:{port}/", flush=True)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
