"""Price-based service selection for broker programs.

Discovers the services of a type through the client and picks the cheapest
by one price component: per CPU-second (hardware) or per application
operation (software). Ties break lexicographically on (provider, name) so
selection is deterministic. The budget limit is a per-unit price cap, not
a total-cost budget.
"""

from __future__ import annotations

from decimal import Decimal
from enum import Enum

from .client import GmdClient, GmdProtocolError
from .model import ServiceRecord


class PricingMode(Enum):
    CPU_SECOND = "cpu"
    APPLICATION_OPERATION = "ao"


class NoCandidateError(Exception):
    """No service of the requested type is available within the budget."""


def price_component(record: ServiceRecord, mode: PricingMode) -> Decimal:
    if record.price is None:
        raise GmdProtocolError(f"record for {record.name!r} carries no price")
    return record.price.hardware if mode is PricingMode.CPU_SECOND else record.price.software


def rank_by_price(client: GmdClient, service_type: str, mode: PricingMode) -> list[ServiceRecord]:
    """All services of the type, cheapest first under the given mode."""
    records = client.query_service_by_type(service_type)
    return sorted(records, key=lambda r: (price_component(r, mode), r.provider or "", r.name))


def select_cheapest(
    client: GmdClient,
    service_type: str,
    mode: PricingMode,
    budget_limit: Decimal | None = None,
) -> ServiceRecord:
    """The cheapest service of the type under the given mode, optionally
    capped at a per-unit budget limit."""
    candidates = rank_by_price(client, service_type, mode)
    if budget_limit is not None:
        candidates = [r for r in candidates if price_component(r, mode) <= budget_limit]
    if not candidates:
        raise NoCandidateError(f"no {service_type!r} service available within budget")
    return candidates[0]
