"""Domain types shared by the registry: providers, services and prices.

Prices are exact decimals carried as text on the wire (at most 4 fractional
digits), so the same value always renders to the same bytes. The canonical
text form has no leading zeros (except "0.x"), no trailing fractional zeros
and no sign.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from decimal import Decimal
from typing import Any, Mapping

_PRICE_RE = re.compile(r"-?\d+(\.\d{1,4})?\Z")

EMPTY_FIELD = "empty_field"
NEGATIVE_PRICE = "negative_price"
MALFORMED_DECIMAL = "malformed_decimal"


@dataclass(frozen=True)
class Violation:
    """One violated validation rule, e.g. ``empty_field(provider_name)``."""

    code: str
    field: str

    def __str__(self) -> str:
        return f"{self.code}({self.field})"


class ValidationError(ValueError):
    """Raised with the full list of rules a candidate value violates."""

    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


class PriceError(ValueError):
    """A price component that is negative or not an exact short decimal."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def parse_price(value: Any) -> Decimal:
    """Parse one price component into an exact Decimal.

    Accepts canonical or near-canonical decimal text ("2", "2.50", "0.0001"),
    ints, and Decimal instances. Rejects floats (binary drift), text with more
    than 4 fractional digits, signs other than a plain leading minus, and any
    negative value.
    """
    if isinstance(value, bool):
        raise PriceError(MALFORMED_DECIMAL, f"not a decimal: {value!r}")
    if isinstance(value, int):
        dec = Decimal(value)
    elif isinstance(value, Decimal):
        dec = value
        if not dec.is_finite() or -dec.as_tuple().exponent > 4:
            raise PriceError(MALFORMED_DECIMAL, f"not an exact short decimal: {value}")
    elif isinstance(value, str):
        if not _PRICE_RE.match(value):
            raise PriceError(MALFORMED_DECIMAL, f"not a decimal with <=4 fractional digits: {value!r}")
        dec = Decimal(value)
    else:
        raise PriceError(MALFORMED_DECIMAL, f"not a decimal: {value!r}")
    if dec < 0:
        raise PriceError(NEGATIVE_PRICE, f"price must be >= 0: {value}")
    return dec


def format_price(value: Decimal) -> str:
    """Render a price component in canonical decimal text."""
    if value == 0:
        return "0"
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


@dataclass(frozen=True)
class PriceQuote:
    """Access price pair: per CPU-second (hardware) and per application operation (software)."""

    hardware: Decimal
    software: Decimal

    def to_json(self) -> dict[str, str]:
        return {"hardware": format_price(self.hardware), "software": format_price(self.software)}


@dataclass(frozen=True)
class Provider:
    """A registered service provider account. ``password_digest`` is a salted
    one-way digest; the plaintext password is never stored."""

    provider_name: str
    login_name: str
    password_digest: str
    contact_address: str
    extra_info: str = ""


@dataclass(frozen=True)
class ProviderInfo:
    """Public projection of a Provider, with the password material removed."""

    provider_name: str
    login_name: str
    contact_address: str
    extra_info: str = ""


@dataclass(frozen=True)
class Service:
    """A published service listing, owned by a provider."""

    service_name: str
    service_type: str
    provider_name: str
    host_name: str
    price: PriceQuote
    application_path: str = ""
    description: str = ""


@dataclass(frozen=True)
class ServiceRecord:
    """Read-only projection of a Service as returned by queries.

    ``address`` carries the host name. Optional fields are None when the
    projection omits them (contact listings carry only name and address).
    """

    name: str
    address: str
    provider: str | None = None
    price: PriceQuote | None = None
    description: str | None = None


def record_from_service(service: Service) -> ServiceRecord:
    return ServiceRecord(
        name=service.service_name,
        address=service.host_name,
        provider=service.provider_name,
        price=service.price,
        description=service.description,
    )


def contact_record(service: Service) -> ServiceRecord:
    return ServiceRecord(name=service.service_name, address=service.host_name)


def _as_mapping(candidate: Any) -> Mapping[str, Any]:
    if isinstance(candidate, Mapping):
        return candidate
    if isinstance(candidate, (Provider, Service)):
        return {f.name: getattr(candidate, f.name) for f in fields(candidate)}
    raise TypeError(f"expected a mapping or domain value, got {type(candidate).__name__}")


def _text_field(
    data: Mapping[str, Any],
    name: str,
    violations: list[Violation],
    required: bool,
) -> str:
    value = data.get(name)
    if not isinstance(value, str):
        value = ""
    value = value.strip()
    if required and not value:
        violations.append(Violation(EMPTY_FIELD, name))
    return value


def validate_provider(candidate: Any) -> Provider:
    """Normalize a provider candidate (trimming text fields) or raise
    ValidationError with every violated rule. Uniqueness is the repository's
    job; this checks shape only."""
    data = _as_mapping(candidate)
    violations: list[Violation] = []
    provider_name = _text_field(data, "provider_name", violations, required=True)
    login_name = _text_field(data, "login_name", violations, required=True)
    contact_address = _text_field(data, "contact_address", violations, required=True)
    extra_info = _text_field(data, "extra_info", violations, required=False)
    password_digest = data.get("password_digest")
    if not isinstance(password_digest, str) or not password_digest:
        violations.append(Violation(EMPTY_FIELD, "password_digest"))
        password_digest = ""
    if violations:
        raise ValidationError(violations)
    return Provider(
        provider_name=provider_name,
        login_name=login_name,
        password_digest=password_digest,
        contact_address=contact_address,
        extra_info=extra_info,
    )


def _validate_price(data: Mapping[str, Any], violations: list[Violation]) -> PriceQuote | None:
    raw = data.get("price")
    if isinstance(raw, PriceQuote):
        raw = {"hardware": raw.hardware, "software": raw.software}
    if not isinstance(raw, Mapping):
        violations.append(Violation(EMPTY_FIELD, "price"))
        return None
    components: dict[str, Decimal] = {}
    for component in ("hardware", "software"):
        try:
            components[component] = parse_price(raw.get(component))
        except PriceError as err:
            violations.append(Violation(err.code, component))
    if len(components) != 2:
        return None
    return PriceQuote(**components)


def validate_service(candidate: Any) -> Service:
    """Normalize a service candidate or raise ValidationError.

    Price components are parsed as exact decimals; the provider reference is
    checked for shape only (existence is the repository's job).
    """
    data = _as_mapping(candidate)
    violations: list[Violation] = []
    service_name = _text_field(data, "service_name", violations, required=True)
    service_type = _text_field(data, "service_type", violations, required=True)
    provider_name = _text_field(data, "provider_name", violations, required=True)
    host_name = _text_field(data, "host_name", violations, required=True)
    application_path = _text_field(data, "application_path", violations, required=False)
    description = _text_field(data, "description", violations, required=False)
    price = _validate_price(data, violations)
    if violations:
        raise ValidationError(violations)
    assert price is not None
    return Service(
        service_name=service_name,
        service_type=service_type,
        provider_name=provider_name,
        host_name=host_name,
        price=price,
        application_path=application_path,
        description=description,
    )
