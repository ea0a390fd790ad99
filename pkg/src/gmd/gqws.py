"""Query service: classifies incoming query messages and answers them
from the repository.

Six named query methods are supported (all services, by type, by host, by
provider, contact listing by type, price by service name); any other
constraint combination runs as a generic conjunction, matching the wire
format's extensibility. Queries never mutate the repository.
"""

from __future__ import annotations

import logging
from enum import Enum

from .model import Service, contact_record, record_from_service
from .protocol import (
    DETAIL_CONTACT,
    DETAIL_FULL,
    ProtocolError,
    QueryMessage,
    QueryResponse,
    decode_query,
    decode_query_element,
    encode_response,
)
from .repository import Repository
from .soap import unwrap_envelope_element, wrap_envelope

log = logging.getLogger(__name__)


class QueryKind(Enum):
    """The six named query methods."""

    ALL = "all"
    BY_TYPE = "by_type"
    BY_HOST = "by_host"
    BY_PROVIDER = "by_provider"
    CONTACT_BY_TYPE = "contact_by_type"
    PRICE_BY_NAME = "price_by_name"


def classify_query(query: QueryMessage) -> QueryKind | None:
    """Map a query to its named method, or None for a generic conjunction.

    Classification is a pure function of which constraints and detail level
    are present.
    """
    names = frozenset(query.constraints())
    contact = query.detail == DETAIL_CONTACT
    if not names and not contact:
        return QueryKind.ALL
    if names == {"service_type"}:
        return QueryKind.CONTACT_BY_TYPE if contact else QueryKind.BY_TYPE
    if contact:
        return None
    if names == {"host_name"}:
        return QueryKind.BY_HOST
    if names == {"provider_name"}:
        return QueryKind.BY_PROVIDER
    if names == {"service_name"}:
        return QueryKind.PRICE_BY_NAME
    return None


def build_query(kind: QueryKind, argument: str | None = None) -> QueryMessage:
    """The query message a named method sends. All kinds but ALL need an argument."""
    if kind is QueryKind.ALL:
        if argument is not None:
            raise ValueError("query for all services takes no argument")
        return QueryMessage()
    if argument is None:
        raise ValueError(f"{kind.value} query needs an argument")
    if kind is QueryKind.BY_TYPE:
        return QueryMessage(service_type=argument)
    if kind is QueryKind.CONTACT_BY_TYPE:
        return QueryMessage(service_type=argument, detail=DETAIL_CONTACT)
    if kind is QueryKind.BY_HOST:
        return QueryMessage(host_name=argument)
    if kind is QueryKind.BY_PROVIDER:
        return QueryMessage(provider_name=argument)
    return QueryMessage(service_name=argument)


class QueryEngine:
    """Answers query messages from a repository; read-only."""

    def __init__(self, repository: Repository):
        self._repository = repository

    # Named methods, one per query kind.

    def query_service(self) -> QueryResponse:
        return self.execute(build_query(QueryKind.ALL))

    def query_service_by_type(self, service_type: str) -> QueryResponse:
        return self.execute(build_query(QueryKind.BY_TYPE, service_type))

    def query_service_by_host(self, host_name: str) -> QueryResponse:
        return self.execute(build_query(QueryKind.BY_HOST, host_name))

    def query_service_by_provider(self, provider_name: str) -> QueryResponse:
        return self.execute(build_query(QueryKind.BY_PROVIDER, provider_name))

    def query_service_contact(self, service_type: str) -> QueryResponse:
        return self.execute(build_query(QueryKind.CONTACT_BY_TYPE, service_type))

    def query_price(self, service_name: str) -> QueryResponse:
        return self.execute(build_query(QueryKind.PRICE_BY_NAME, service_name))

    def execute(self, query: QueryMessage) -> QueryResponse:
        """Run any valid query message and build its response."""
        kind = classify_query(query)
        type_label = query.service_type if query.service_type is not None else "*"
        matches = self._find(query)
        if kind is QueryKind.PRICE_BY_NAME and not matches:
            # A caller asking for a specific price cannot proceed without it;
            # all set-valued queries return ok with an empty list instead.
            return QueryResponse.make_error(type_label, f"no service named {query.service_name!r}")
        project = contact_record if query.detail == DETAIL_CONTACT else record_from_service
        return QueryResponse.make_ok(type_label, [project(s) for s in matches])

    def _find(self, query: QueryMessage) -> list[Service]:
        return self._repository.find_services(
            by_type=query.service_type,
            by_provider=query.provider_name,
            by_host=query.host_name,
            by_name=query.service_name,
        )

    # Transport-facing entry point.

    def handle_query(self, body: str, envelope: str = "bare") -> tuple[int, str]:
        """Process one raw query document and return (http_status, xml).

        ``envelope`` is "bare" or "soap"; SOAP requests get SOAP responses
        with a byte-identical inner document. Never raises: protocol errors
        become HTTP 400 error responses, anything unexpected HTTP 500.
        """
        if envelope not in ("bare", "soap"):
            raise ValueError(f"envelope must be bare or soap, got {envelope!r}")
        wrap = envelope == "soap"
        try:
            if wrap:
                query = decode_query_element(unwrap_envelope_element(body))
            else:
                query = decode_query(body)
        except ProtocolError as err:
            return 400, self._render(QueryResponse.make_error("*", str(err)), wrap)
        try:
            response = self.execute(query)
            return 200, self._render(response, wrap)
        except Exception:  # pragma: no cover - defensive catch-all
            log.exception("query processing failed")
            return 500, self._render(QueryResponse.make_error("*", "internal error"), wrap)

    @staticmethod
    def _render(response: QueryResponse, wrap: bool) -> str:
        xml = encode_response(response)
        return wrap_envelope(xml) if wrap else xml
