"""Typed client for the query service.

Application code (brokers, schedulers) calls the query methods and gets
back service records; the XML and envelope plumbing never leaks out.
Failures surface as typed errors: the server's own error responses as
GmdRemoteError, connectivity as GmdTransportError/GmdTimeoutError, and
undecodable payloads as GmdProtocolError.
"""

from __future__ import annotations

from dataclasses import dataclass

import requests

from .gqws import QueryKind, build_query
from .model import ServiceRecord
from .protocol import (
    ProtocolError,
    QueryMessage,
    STATUS_ERROR,
    decode_response,
    encode_query,
)
from .soap import unwrap_envelope, wrap_envelope

QUERY_PATH = "/gqws"


class GmdError(Exception):
    """Base for client-side failures."""


class GmdRemoteError(GmdError):
    """The server processed the query and answered with an error response."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class GmdTransportError(GmdError):
    """The endpoint could not be reached or the connection broke."""


class GmdTimeoutError(GmdError):
    """The request ran past the configured timeout."""


class GmdProtocolError(GmdError):
    """The server's payload does not follow the wire contract."""


@dataclass(frozen=True)
class GmdClient:
    """Immutable connection settings; each call is an independent request."""

    endpoint: str
    transport: str = "bare"
    timeout: float = 10.0

    def __post_init__(self) -> None:
        if not self.endpoint:
            raise ValueError("endpoint must not be empty")
        if self.transport not in ("bare", "soap"):
            raise ValueError(f"transport must be bare or soap, got {self.transport!r}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    def post_query(self, query: QueryMessage) -> str:
        """Send one query and return the (unwrapped) response document."""
        payload = encode_query(query)
        if self.transport == "soap":
            payload = wrap_envelope(payload)
        url = self.endpoint.rstrip("/") + QUERY_PATH
        try:
            http_response = requests.post(
                url,
                data=payload.encode("utf-8"),
                headers={"Content-Type": "text/xml; charset=utf-8"},
                timeout=self.timeout,
            )
        except requests.Timeout as err:
            raise GmdTimeoutError(f"query timed out after {self.timeout}s") from err
        except requests.RequestException as err:
            raise GmdTransportError(f"cannot reach {url}: {err}") from err
        body = http_response.content.decode("utf-8", errors="replace")
        if self.transport == "soap":
            try:
                body = unwrap_envelope(body)
            except ProtocolError as err:
                raise GmdProtocolError(f"bad envelope in response: {err}") from err
        return body

    def invoke(self, kind: QueryKind, argument: str | None = None) -> list[ServiceRecord]:
        """Run one named query method and return its service records."""
        body = self.post_query(build_query(kind, argument))
        try:
            response = decode_response(body)
        except ProtocolError as err:
            raise GmdProtocolError(f"bad response document: {err}") from err
        if response.status == STATUS_ERROR:
            raise GmdRemoteError(response.reason or "unspecified error")
        return list(response.services)

    # One wrapper per named query method.

    def query_service(self) -> list[ServiceRecord]:
        return self.invoke(QueryKind.ALL)

    def query_service_by_type(self, service_type: str) -> list[ServiceRecord]:
        return self.invoke(QueryKind.BY_TYPE, service_type)

    def query_service_by_host(self, host_name: str) -> list[ServiceRecord]:
        return self.invoke(QueryKind.BY_HOST, host_name)

    def query_service_by_provider(self, provider_name: str) -> list[ServiceRecord]:
        return self.invoke(QueryKind.BY_PROVIDER, provider_name)

    def query_service_contact(self, service_type: str) -> list[ServiceRecord]:
        return self.invoke(QueryKind.CONTACT_BY_TYPE, service_type)

    def query_price(self, service_name: str) -> list[ServiceRecord]:
        return self.invoke(QueryKind.PRICE_BY_NAME, service_name)
