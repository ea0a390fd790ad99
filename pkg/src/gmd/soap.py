"""Minimal SOAP 1.1 envelope shim for the query transport.

Legacy callers wrap the query document in an Envelope/Body pair; the inner
document is the real contract. This module recognizes and strips that
wrapper on the way in and re-adds it on the way out. No WSDL, no SOAP
faults: errors travel as ordinary error responses inside the body.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .protocol import (
    MALFORMED_XML,
    ProtocolError,
    _XML_DECL,
    element_to_canonical,
    parse_xml,
)

SOAP_ENV_NS = "http://schemas.xmlsoap.org/soap/envelope/"

_ENVELOPE_TAG = f"{{{SOAP_ENV_NS}}}Envelope"
_BODY_TAG = f"{{{SOAP_ENV_NS}}}Body"


def is_enveloped(xml: str) -> bool:
    """True when the document's root is a SOAP 1.1 Envelope."""
    try:
        return ET.fromstring(xml).tag == _ENVELOPE_TAG
    except ET.ParseError:
        return False


def wrap_envelope(inner_xml: str) -> str:
    """Wrap a complete XML document in a canonical SOAP envelope."""
    body = inner_xml
    if body.startswith("<?xml"):
        end = body.find("?>")
        if end == -1:
            raise ValueError("unterminated XML declaration")
        body = body[end + 2 :].lstrip("\n")
    return (
        _XML_DECL
        + f'<SOAP-ENV:Envelope xmlns:SOAP-ENV="{SOAP_ENV_NS}">'
        + "<SOAP-ENV:Body>"
        + body
        + "</SOAP-ENV:Body></SOAP-ENV:Envelope>"
    )


def unwrap_envelope_element(xml: str) -> ET.Element:
    """Parse a SOAP document and return the single element inside its Body."""
    root = parse_xml(xml)
    if root.tag != _ENVELOPE_TAG:
        raise ProtocolError(MALFORMED_XML, f"expected a SOAP Envelope, got <{root.tag}>")
    bodies = [child for child in root if child.tag == _BODY_TAG]
    if len(bodies) != 1:
        raise ProtocolError(MALFORMED_XML, "SOAP Envelope must hold exactly one Body")
    children = list(bodies[0])
    if len(children) != 1:
        raise ProtocolError(MALFORMED_XML, "SOAP Body must hold exactly one element")
    inner = children[0]
    if inner.tag.startswith("{"):
        raise ProtocolError(MALFORMED_XML, f"unexpected namespaced body element <{inner.tag}>")
    return inner


def unwrap_envelope(xml: str, *, with_declaration: bool = True) -> str:
    """Extract the Body payload as a canonical document string."""
    text = element_to_canonical(unwrap_envelope_element(xml))
    return _XML_DECL + text if with_declaration else text
