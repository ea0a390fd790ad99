"""HTTP front end: the XML query endpoint, the management/browsing API,
a health probe, and static serving for the built web portal.

Routes:
    POST /gqws                    query documents, bare or SOAP-wrapped
    GET  /healthz                 liveness probe
    POST /api/providers           provider registration (public)
    POST /api/login               issue a session token (+ HttpOnly cookie)
    POST /api/logout              drop the session (idempotent)
    GET  /api/browse[?type=|provider=]   public catalog
    GET/POST /api/my/services     own listings: list / add (upsert)
    PUT/DELETE /api/my/services/<name>   update / remove one listing
    DELETE /api/my/account        remove the provider and its services
    GET  /*                       static portal assets, when configured

Session tokens arrive as ``Authorization: Bearer <token>`` or as the
``gmd_session`` cookie; the header wins.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import time
from dataclasses import dataclass
from http import cookies as http_cookies
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any, Callable
from urllib.parse import parse_qs, unquote, urlparse

from .gqws import QueryEngine
from .model import ValidationError
from .portal import (
    AuthFailedError,
    DigestParams,
    ForbiddenError,
    PortalService,
    UnauthenticatedError,
)
from .repository import (
    DuplicateLoginNameError,
    DuplicateProviderNameError,
    ProviderNotFoundError,
    Repository,
    ServiceNotFoundError,
    UnknownProviderError,
    service_to_json,
)
from .soap import is_enveloped

log = logging.getLogger(__name__)

SESSION_COOKIE = "gmd_session"
_MAX_BODY = 1 << 20


class GmdApp:
    """Composition root shared by every request thread."""

    def __init__(
        self,
        repository: Repository,
        session_ttl_seconds: float = 1800.0,
        assets_dir: str | Path | None = None,
        now: Callable[[], float] = time.monotonic,
        digest_params: DigestParams = DigestParams(),
    ):
        self.repository = repository
        self.portal = PortalService(
            repository, session_ttl_seconds=session_ttl_seconds, now=now, digest_params=digest_params
        )
        self.engine = QueryEngine(repository)
        self.assets_dir = Path(assets_dir).resolve() if assets_dir else None


@dataclass
class _Reply:
    status: int
    body: bytes
    content_type: str
    headers: list[tuple[str, str]]


class _BadRequest(Exception):
    """Internal: short-circuit a handler with a prebuilt reply."""

    def __init__(self, reply: "_Reply"):
        super().__init__(reply.status)
        self.reply = reply


def _json_reply(status: int, payload: Any, headers: list[tuple[str, str]] | None = None) -> _Reply:
    body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
    return _Reply(status, body, "application/json; charset=utf-8", headers or [])


def _error_reply(status: int, code: str, detail: str, violations: list | None = None) -> _Reply:
    payload: dict[str, Any] = {"error": code, "detail": detail}
    if violations is not None:
        payload["violations"] = [{"code": v.code, "field": v.field} for v in violations]
    return _json_reply(status, payload)


def _record_json(record) -> dict[str, Any]:
    out: dict[str, Any] = {"name": record.name, "address": record.address}
    if record.provider is not None:
        out["provider"] = record.provider
    if record.price is not None:
        out["price"] = record.price.to_json()
    if record.description is not None:
        out["description"] = record.description
    return out


class GmdRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "gmd"

    @property
    def app(self) -> GmdApp:
        return self.server.app  # type: ignore[attr-defined]

    # -- plumbing

    def log_message(self, fmt: str, *args: Any) -> None:
        log.info("%s %s", self.address_string(), fmt % args)

    def _send(self, reply: _Reply) -> None:
        self._drain_request_body()
        self.send_response(reply.status)
        self.send_header("Content-Type", reply.content_type)
        self.send_header("Content-Length", str(len(reply.body)))
        for name, value in reply.headers:
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(reply.body)

    def parse_request(self) -> bool:
        # One handler instance serves every request on a keep-alive
        # connection; reset per-request body accounting.
        self._body_consumed = False
        return super().parse_request()

    def _drain_request_body(self) -> None:
        # Keep-alive requires consuming the request body even on paths that
        # never look at it; leftover bytes would be parsed as the next
        # request. Oversized leftovers close the connection instead.
        if getattr(self, "_body_consumed", False):
            return
        self._body_consumed = True
        try:
            remaining = int(self.headers.get("Content-Length") or 0)
        except (AttributeError, ValueError):
            remaining = 0
        if remaining <= 0:
            return
        if remaining > _MAX_BODY:
            self.close_connection = True
            return
        self.rfile.read(remaining)

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        if length > _MAX_BODY:
            raise _BadRequest(_error_reply(413, "too_large", "request body too large"))
        body = self.rfile.read(length) if length else b""
        self._body_consumed = True
        return body

    def _read_json(self) -> dict[str, Any]:
        raw = self._read_body()
        try:
            payload = json.loads(raw.decode("utf-8")) if raw else {}
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise _BadRequest(_error_reply(400, "invalid_json", "request body is not valid JSON"))
        if not isinstance(payload, dict):
            raise _BadRequest(_error_reply(400, "invalid_json", "request body must be a JSON object"))
        return payload

    def _token(self) -> str | None:
        header = self.headers.get("Authorization")
        if header and header.startswith("Bearer "):
            return header[len("Bearer ") :].strip()
        raw_cookie = self.headers.get("Cookie")
        if raw_cookie:
            jar = http_cookies.SimpleCookie()
            try:
                jar.load(raw_cookie)
            except http_cookies.CookieError:
                return None
            if SESSION_COOKIE in jar:
                return jar[SESSION_COOKIE].value
        return None

    # -- dispatch

    def do_GET(self) -> None:
        url = urlparse(self.path)
        if url.path == "/healthz":
            self._send(_Reply(200, b"ok", "text/plain; charset=utf-8", []))
        elif url.path == "/api/browse":
            self._handle_browse(url.query)
        elif url.path == "/api/my/services":
            self._guarded(self._list_own_services)
        elif url.path.startswith("/api/"):
            self._send(_error_reply(404, "not_found", "no such endpoint"))
        else:
            self._serve_asset(url.path)

    def do_POST(self) -> None:
        url = urlparse(self.path)
        if url.path == "/gqws":
            self._handle_gqws()
        elif url.path == "/api/providers":
            self._guarded(self._register)
        elif url.path == "/api/login":
            self._guarded(self._login)
        elif url.path == "/api/logout":
            self._guarded(self._logout)
        elif url.path == "/api/my/services":
            self._guarded(lambda: self._manage("add", None))
        else:
            self._send(_error_reply(404, "not_found", "no such endpoint"))

    def do_PUT(self) -> None:
        name = self._my_service_path()
        if name is None:
            self._send(_error_reply(404, "not_found", "no such endpoint"))
        else:
            self._guarded(lambda: self._manage("update", name))

    def do_DELETE(self) -> None:
        url = urlparse(self.path)
        if url.path == "/api/my/account":
            self._guarded(self._remove_account)
            return
        name = self._my_service_path()
        if name is None:
            self._send(_error_reply(404, "not_found", "no such endpoint"))
        else:
            self._guarded(lambda: self._manage("remove", name))

    def _my_service_path(self) -> str | None:
        url = urlparse(self.path)
        prefix = "/api/my/services/"
        if url.path.startswith(prefix) and len(url.path) > len(prefix):
            return unquote(url.path[len(prefix) :])
        return None

    def _guarded(self, action: Callable[[], _Reply]) -> None:
        try:
            reply = action()
        except _BadRequest as err:
            reply = err.reply
        except UnauthenticatedError as err:
            reply = _error_reply(401, "unauthenticated", str(err))
        except AuthFailedError:
            reply = _error_reply(401, "auth_failed", "login failed")
        except ForbiddenError as err:
            reply = _error_reply(403, "forbidden", str(err))
        except ValidationError as err:
            reply = _error_reply(400, "invalid", str(err), err.violations)
        except DuplicateLoginNameError as err:
            reply = _error_reply(409, "duplicate_login_name", str(err))
        except DuplicateProviderNameError as err:
            reply = _error_reply(409, "duplicate_provider_name", str(err))
        except (ServiceNotFoundError, ProviderNotFoundError, UnknownProviderError) as err:
            reply = _error_reply(404, "not_found", str(err))
        except Exception:
            log.exception("request failed: %s %s", self.command, self.path)
            reply = _error_reply(500, "internal", "internal error")
        self._send(reply)

    # -- query endpoint

    def _handle_gqws(self) -> None:
        try:
            raw = self._read_body()
        except _BadRequest as err:
            self._send(err.reply)
            return
        body = raw.decode("utf-8", errors="replace")
        envelope = "soap" if is_enveloped(body) else "bare"
        status, xml = self.app.engine.handle_query(body, envelope=envelope)
        self._send(_Reply(status, xml.encode("utf-8"), "text/xml; charset=utf-8", []))

    # -- management API

    def _register(self) -> _Reply:
        form = self._read_json()
        info = self.app.portal.register_provider(form)
        return _json_reply(
            201,
            {
                "provider_name": info.provider_name,
                "login_name": info.login_name,
                "contact_address": info.contact_address,
                "extra_info": info.extra_info,
            },
        )

    def _login(self) -> _Reply:
        form = self._read_json()
        login_name = form.get("login_name")
        password = form.get("password")
        if not isinstance(login_name, str) or not isinstance(password, str):
            raise AuthFailedError("login failed")
        token = self.app.portal.login(login_name, password)
        provider_name = self.app.portal.whoami(token)
        cookie = f"{SESSION_COOKIE}={token}; HttpOnly; Path=/; SameSite=Lax"
        return _json_reply(
            200,
            {"token": token, "provider_name": provider_name},
            headers=[("Set-Cookie", cookie)],
        )

    def _logout(self) -> _Reply:
        self.app.portal.logout(self._token())
        cookie = f"{SESSION_COOKIE}=; Max-Age=0; HttpOnly; Path=/; SameSite=Lax"
        return _json_reply(200, {"status": "ok"}, headers=[("Set-Cookie", cookie)])

    def _remove_account(self) -> _Reply:
        self.app.portal.remove_own_account(self._token())
        return _json_reply(200, {"status": "removed"})

    def _manage(self, action: str, path_name: str | None) -> _Reply:
        payload = self._read_json()
        if path_name is not None:
            payload["service_name"] = path_name
        outcome = self.app.portal.manage_service(self._token(), action, payload)
        return _json_reply(201 if outcome == "created" else 200, {"status": outcome})

    def _list_own_services(self) -> _Reply:
        services = self.app.portal.list_own_services(self._token())
        return _json_reply(200, {"services": [service_to_json(s) for s in services]})

    def _handle_browse(self, query: str) -> None:
        params = parse_qs(query)
        by_type = params.get("type", [None])[0]
        by_provider = params.get("provider", [None])[0]
        view = self.app.portal.browse(by_type=by_type, by_provider=by_provider)
        payload = {
            "view": view.view,
            "types": list(view.types),
            "groups": [
                {"type": g.service_type, "services": [_record_json(r) for r in g.services]}
                for g in view.groups
            ],
        }
        self._send(_json_reply(200, payload))

    # -- static assets

    def _serve_asset(self, raw_path: str) -> None:
        root = self.app.assets_dir
        if root is None:
            if raw_path == "/":
                body = b"gmd server is running; no portal assets configured\n"
                self._send(_Reply(200, body, "text/plain; charset=utf-8", []))
            else:
                self._send(_error_reply(404, "not_found", "no such path"))
            return
        rel = unquote(raw_path).lstrip("/")
        candidate = (root / rel).resolve() if rel else root / "index.html"
        if not candidate.is_relative_to(root):
            self._send(_error_reply(404, "not_found", "no such path"))
            return
        if candidate.is_dir():
            candidate = candidate / "index.html"
        if not candidate.is_file():
            # Single-page app: unknown extensionless paths fall back to the shell.
            if "." not in candidate.name:
                candidate = root / "index.html"
            if not candidate.is_file():
                self._send(_error_reply(404, "not_found", "no such path"))
                return
        content_type = mimetypes.guess_type(str(candidate))[0] or "application/octet-stream"
        self._send(_Reply(200, candidate.read_bytes(), content_type, []))


class GmdServer(ThreadingHTTPServer):
    """Threaded HTTP server bound to a GmdApp."""

    daemon_threads = True
    # Default backlog (5) drops simultaneous connection bursts.
    request_queue_size = 128

    def __init__(self, app: GmdApp, host: str = "127.0.0.1", port: int = 8100):
        super().__init__((host, port), GmdRequestHandler)
        self.app = app

    @property
    def port(self) -> int:
        return self.server_address[1]
