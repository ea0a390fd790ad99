"""Grid market directory: a registry where providers publish priced
services and consumers discover them over an XML query protocol."""

from .broker import NoCandidateError, PricingMode, rank_by_price, select_cheapest
from .client import (
    GmdClient,
    GmdError,
    GmdProtocolError,
    GmdRemoteError,
    GmdTimeoutError,
    GmdTransportError,
)
from .gqws import QueryEngine, QueryKind, build_query, classify_query
from .model import (
    PriceError,
    PriceQuote,
    Provider,
    ProviderInfo,
    Service,
    ServiceRecord,
    ValidationError,
    Violation,
    format_price,
    parse_price,
)
from .portal import PortalService, SessionTable
from .protocol import ProtocolError, QueryMessage, QueryResponse, decode_query, decode_response, encode_query, encode_response
from .repository import Repository
from .server import GmdApp, GmdServer

__version__ = "0.1.0"

__all__ = [
    "GmdApp",
    "GmdClient",
    "GmdError",
    "GmdProtocolError",
    "GmdRemoteError",
    "GmdServer",
    "GmdTimeoutError",
    "GmdTransportError",
    "NoCandidateError",
    "PortalService",
    "PriceError",
    "PriceQuote",
    "PricingMode",
    "ProtocolError",
    "Provider",
    "ProviderInfo",
    "QueryEngine",
    "QueryKind",
    "QueryMessage",
    "QueryResponse",
    "Repository",
    "Service",
    "ServiceRecord",
    "SessionTable",
    "ValidationError",
    "Violation",
    "build_query",
    "classify_query",
    "decode_query",
    "decode_response",
    "encode_query",
    "encode_response",
    "format_price",
    "parse_price",
    "rank_by_price",
    "select_cheapest",
    "__version__",
]
