"""Codec for the XML query and response messages of the query service.

Query documents:

    <query_service>
      <service_type>CPU service</service_type>
      <provider_name>...</provider_name>     (any subset of the four
      <host_name>...</host_name>              constraint elements, each
      <service_name>...</service_name>        at most once)
      <detail>contact</detail>               (only for contact listings)
    </query_service>

Response documents:

    <?xml version="1.0" encoding="UTF-8"?>
    <service-details type="CPU service" status="ok">
      <service>
        <name>...</name>
        <provider>...</provider>
        <price><hardware>...</hardware><software>...</software></price>
        <address>...</address>
        <description>...</description>
      </service>
      ...
    </service-details>

    <?xml version="1.0" encoding="UTF-8"?>
    <service-details type="..." status="error">
      <reason>...</reason>
    </service-details>

Writers emit one canonical form: UTF-8, entity-escaped text, no whitespace
between elements, children in the fixed order above, empty elements
collapsed to ``<name/>``. Readers tolerate insignificant whitespace and
child reordering, so the same values always encode to identical bytes while
pretty-printed input still parses. Encoding then decoding is the identity
for every valid message.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Iterator

from .model import PriceError, PriceQuote, ServiceRecord, format_price, parse_price

QUERY_ROOT = "query_service"
RESPONSE_ROOT = "service-details"

DETAIL_FULL = "full"
DETAIL_CONTACT = "contact"

STATUS_OK = "ok"
STATUS_ERROR = "error"

#: Fixed (canonical) order of the query constraint elements.
CONSTRAINT_ELEMENTS = ("service_type", "provider_name", "host_name", "service_name")

# ProtocolError kinds
MALFORMED_XML = "malformed_xml"
UNKNOWN_ROOT = "unknown_root"
UNKNOWN_ELEMENT = "unknown_element"
DUPLICATE_CONSTRAINT = "duplicate_constraint"
MISSING_STATUS = "missing_status"
BAD_PRICE = "bad_price"


class ProtocolError(Exception):
    """A message that does not follow the wire contract."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


@dataclass(frozen=True)
class QueryMessage:
    """A parsed query: a conjunction of constraints plus the detail level.

    ``detail`` is "full" or "contact"; contact responses carry only the name
    and address of each service.
    """

    service_type: str | None = None
    provider_name: str | None = None
    host_name: str | None = None
    service_name: str | None = None
    detail: str = DETAIL_FULL

    def __post_init__(self) -> None:
        if self.detail not in (DETAIL_FULL, DETAIL_CONTACT):
            raise ValueError(f"detail must be full or contact, got {self.detail!r}")

    def constraints(self) -> dict[str, str]:
        """The supplied constraints, keyed by element name."""
        present = {}
        for name in CONSTRAINT_ELEMENTS:
            value = getattr(self, name)
            if value is not None:
                present[name] = value
        return present


@dataclass(frozen=True)
class QueryResponse:
    """Query outcome: service records on success, a reason on error.

    ``type_label`` echoes the queried service type ("*" when the query had
    no type constraint).
    """

    type_label: str
    status: str
    services: tuple[ServiceRecord, ...] = ()
    reason: str | None = None

    @classmethod
    def make_ok(cls, type_label: str, services) -> "QueryResponse":
        return cls(type_label=type_label, status=STATUS_OK, services=tuple(services))

    @classmethod
    def make_error(cls, type_label: str, reason: str) -> "QueryResponse":
        return cls(type_label=type_label, status=STATUS_ERROR, reason=reason)


def escape_text(value: str) -> str:
    """Entity-escape element text (also CR, which parsers would normalize)."""
    return (
        value.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace("\r", "&#13;")
    )


def escape_attr(value: str) -> str:
    """Entity-escape an attribute value (quotes and whitespace included)."""
    return (
        escape_text(value)
        .replace('"', "&quot;")
        .replace("\n", "&#10;")
        .replace("\t", "&#9;")
    )


def _elem(name: str, text: str) -> str:
    if text == "":
        return f"<{name}/>"
    return f"<{name}>{escape_text(text)}</{name}>"


def _wrap(name: str, inner: str, attrs: str = "") -> str:
    if inner == "":
        return f"<{name}{attrs}/>"
    return f"<{name}{attrs}>{inner}</{name}>"


# -- queries


def encode_query(query: QueryMessage) -> str:
    """Render a query in canonical form (no XML declaration)."""
    parts = [_elem(name, value) for name, value in query.constraints().items()]
    if query.detail == DETAIL_CONTACT:
        parts.append(_elem("detail", DETAIL_CONTACT))
    return _wrap(QUERY_ROOT, "".join(parts))


def parse_xml(text: str) -> ET.Element:
    try:
        return ET.fromstring(text)
    except ET.ParseError as err:
        raise ProtocolError(MALFORMED_XML, f"not well-formed XML: {err}") from err


def _check_no_stray_text(elem: ET.Element) -> None:
    if elem.text is not None and elem.text.strip():
        raise ProtocolError(MALFORMED_XML, f"unexpected text content in <{elem.tag}>")
    for child in elem:
        if child.tail is not None and child.tail.strip():
            raise ProtocolError(MALFORMED_XML, f"unexpected text content in <{elem.tag}>")


def _leaf_text(elem: ET.Element) -> str:
    """Text of a leaf element, exactly as written (no trimming)."""
    if len(elem) != 0:
        raise ProtocolError(MALFORMED_XML, f"<{elem.tag}> must not contain child elements")
    return elem.text or ""


def decode_query(xml: str) -> QueryMessage:
    return decode_query_element(parse_xml(xml))


def decode_query_element(root: ET.Element) -> QueryMessage:
    """Decode a parsed query element; tolerant of whitespace and child order."""
    if root.tag != QUERY_ROOT:
        raise ProtocolError(UNKNOWN_ROOT, f"expected <{QUERY_ROOT}>, got <{root.tag}>")
    _check_no_stray_text(root)
    values: dict[str, str] = {}
    detail = DETAIL_FULL
    seen_detail = False
    for child in root:
        if child.tag in CONSTRAINT_ELEMENTS:
            if child.tag in values:
                raise ProtocolError(DUPLICATE_CONSTRAINT, f"constraint <{child.tag}> appears more than once")
            values[child.tag] = _leaf_text(child)
        elif child.tag == "detail":
            if seen_detail:
                raise ProtocolError(DUPLICATE_CONSTRAINT, "element <detail> appears more than once")
            seen_detail = True
            keyword = _leaf_text(child).strip()
            if keyword not in (DETAIL_FULL, DETAIL_CONTACT):
                raise ProtocolError(MALFORMED_XML, f"detail must be full or contact, got {keyword!r}")
            detail = keyword
        else:
            raise ProtocolError(UNKNOWN_ELEMENT, f"unknown query element <{child.tag}>")
    return QueryMessage(detail=detail, **{name: values.get(name) for name in CONSTRAINT_ELEMENTS})


# -- responses

_XML_DECL = '<?xml version="1.0" encoding="UTF-8"?>\n'

#: Fixed (canonical) order of the per-service child elements.
_RECORD_ELEMENTS = ("name", "provider", "price", "address", "description")


def _encode_record(record: ServiceRecord) -> str:
    parts = [_elem("name", record.name)]
    if record.provider is not None:
        parts.append(_elem("provider", record.provider))
    if record.price is not None:
        price_inner = _elem("hardware", format_price(record.price.hardware)) + _elem(
            "software", format_price(record.price.software)
        )
        parts.append(_wrap("price", price_inner))
    parts.append(_elem("address", record.address))
    if record.description is not None:
        parts.append(_elem("description", record.description))
    return _wrap("service", "".join(parts))


def encode_response(response: QueryResponse) -> str:
    """Render a response in canonical form, XML declaration included."""
    if response.status == STATUS_OK:
        if response.reason is not None:
            raise ValueError("ok response must not carry a reason")
        inner = "".join(_encode_record(r) for r in response.services)
    elif response.status == STATUS_ERROR:
        if response.services:
            raise ValueError("error response must not carry services")
        if response.reason is None:
            raise ValueError("error response must carry a reason")
        inner = _elem("reason", response.reason)
    else:
        raise ValueError(f"status must be ok or error, got {response.status!r}")
    attrs = f' type="{escape_attr(response.type_label)}" status="{response.status}"'
    return _XML_DECL + _wrap(RESPONSE_ROOT, inner, attrs)


def _decode_price(elem: ET.Element) -> PriceQuote:
    _check_no_stray_text(elem)
    components: dict[str, str] = {}
    for child in elem:
        if child.tag not in ("hardware", "software"):
            raise ProtocolError(BAD_PRICE, f"unknown price element <{child.tag}>")
        if child.tag in components:
            raise ProtocolError(BAD_PRICE, f"price element <{child.tag}> repeated")
        components[child.tag] = _leaf_text(child)
    for component in ("hardware", "software"):
        if component not in components:
            raise ProtocolError(BAD_PRICE, f"price is missing <{component}>")
    try:
        return PriceQuote(
            hardware=parse_price(components["hardware"]),
            software=parse_price(components["software"]),
        )
    except PriceError as err:
        raise ProtocolError(BAD_PRICE, str(err)) from err


def _decode_record(elem: ET.Element) -> ServiceRecord:
    _check_no_stray_text(elem)
    found: dict[str, object] = {}
    for child in elem:
        if child.tag not in _RECORD_ELEMENTS:
            raise ProtocolError(MALFORMED_XML, f"unknown service element <{child.tag}>")
        if child.tag in found:
            raise ProtocolError(MALFORMED_XML, f"service element <{child.tag}> repeated")
        if child.tag == "price":
            found["price"] = _decode_price(child)
        else:
            found[child.tag] = _leaf_text(child)
    for required in ("name", "address"):
        if required not in found:
            raise ProtocolError(MALFORMED_XML, f"service is missing <{required}>")
    return ServiceRecord(
        name=found["name"],  # type: ignore[arg-type]
        address=found["address"],  # type: ignore[arg-type]
        provider=found.get("provider"),  # type: ignore[arg-type]
        price=found.get("price"),  # type: ignore[arg-type]
        description=found.get("description"),  # type: ignore[arg-type]
    )


def decode_response(xml: str) -> QueryResponse:
    return decode_response_element(parse_xml(xml))


def decode_response_element(root: ET.Element) -> QueryResponse:
    """Decode a parsed response element; tolerant reader like decode_query."""
    if root.tag != RESPONSE_ROOT:
        raise ProtocolError(UNKNOWN_ROOT, f"expected <{RESPONSE_ROOT}>, got <{root.tag}>")
    status = root.get("status")
    if status is None:
        raise ProtocolError(MISSING_STATUS, "response has no status attribute")
    if status not in (STATUS_OK, STATUS_ERROR):
        raise ProtocolError(MISSING_STATUS, f"status must be ok or error, got {status!r}")
    type_label = root.get("type", "*")
    _check_no_stray_text(root)
    if status == STATUS_ERROR:
        reason: str | None = None
        for child in root:
            if child.tag != "reason" or reason is not None:
                raise ProtocolError(MALFORMED_XML, "error response must hold exactly one <reason>")
            reason = _leaf_text(child)
        if reason is None:
            raise ProtocolError(MALFORMED_XML, "error response must hold exactly one <reason>")
        return QueryResponse.make_error(type_label, reason)
    records = []
    for child in root:
        if child.tag != "service":
            raise ProtocolError(MALFORMED_XML, f"unexpected response element <{child.tag}>")
        records.append(_decode_record(child))
    return QueryResponse.make_ok(type_label, records)


# -- canonical re-rendering of parsed elements (used to unwrap envelopes)


def element_to_canonical(elem: ET.Element) -> str:
    """Serialize a parsed (namespace-free) element in the canonical style,
    preserving all text content verbatim."""
    attrs = "".join(f' {name}="{escape_attr(value)}"' for name, value in elem.attrib.items())
    inner = escape_text(elem.text or "")
    for child in elem:
        inner += element_to_canonical(child) + escape_text(child.tail or "")
    return _wrap(elem.tag, inner, attrs)


def iter_record_fields(record: ServiceRecord) -> Iterator[tuple[str, str]]:
    """(field, text) pairs in wire order, for table-style display."""
    yield "name", record.name
    if record.provider is not None:
        yield "provider", record.provider
    if record.price is not None:
        yield "hardware", format_price(record.price.hardware)
        yield "software", format_price(record.price.software)
    yield "address", record.address
    if record.description is not None:
        yield "description", record.description
