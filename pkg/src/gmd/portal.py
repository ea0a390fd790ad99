"""Provider administration and session-authenticated service management.

Browsing is public; every mutation requires a live session token. Tokens
are random 128-bit values handed out at login and deleted at logout, with
an idle expiry that refreshes on use. Passwords are stored only as salted
scrypt digests and compared in constant time, with one indistinguishable
failure for unknown users and wrong passwords.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
import threading
import time
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from .model import (
    EMPTY_FIELD,
    ProviderInfo,
    Service,
    ServiceRecord,
    ValidationError,
    Violation,
    record_from_service,
    validate_provider,
    validate_service,
)
from .repository import Repository, ServiceNotFoundError


class PortalError(Exception):
    """Base for portal-level failures."""


class AuthFailedError(PortalError):
    """Login rejected; deliberately the same for unknown user and bad password."""


class UnauthenticatedError(PortalError):
    """The request carries no live session token."""


class ForbiddenError(PortalError):
    """The session's provider may not touch the targeted service."""


# -- password digests

_DIGEST_SCHEME = "scrypt"


@dataclass(frozen=True)
class DigestParams:
    """scrypt cost parameters; defaults suit interactive logins."""

    n: int = 2**14
    r: int = 8
    p: int = 1


def hash_password(password: str, params: DigestParams = DigestParams()) -> str:
    salt = secrets.token_bytes(16)
    key = hashlib.scrypt(password.encode("utf-8"), salt=salt, n=params.n, r=params.r, p=params.p)
    return f"{_DIGEST_SCHEME}${params.n}${params.r}${params.p}${salt.hex()}${key.hex()}"


def verify_password(password: str, digest: str) -> bool:
    try:
        scheme, n, r, p, salt_hex, key_hex = digest.split("$")
        if scheme != _DIGEST_SCHEME:
            return False
        expected = bytes.fromhex(key_hex)
        key = hashlib.scrypt(
            password.encode("utf-8"),
            salt=bytes.fromhex(salt_hex),
            n=int(n),
            r=int(r),
            p=int(p),
            dklen=len(expected),
        )
    except (ValueError, TypeError):
        return False
    return hmac.compare_digest(key, expected)


# -- sessions


@dataclass
class _SessionEntry:
    login_name: str
    provider_name: str
    created_at: float
    deadline: float


class SessionTable:
    """Live session tokens with idle expiry; thread-safe."""

    def __init__(self, ttl_seconds: float = 1800.0, now: Callable[[], float] = time.monotonic):
        self._ttl = float(ttl_seconds)
        self._now = now
        self._lock = threading.Lock()
        self._entries: dict[str, _SessionEntry] = {}

    def create(self, login_name: str, provider_name: str) -> str:
        token = secrets.token_urlsafe(16)
        stamp = self._now()
        with self._lock:
            self._entries[token] = _SessionEntry(login_name, provider_name, stamp, stamp + self._ttl)
        return token

    def validate(self, token: str | None) -> _SessionEntry:
        """Return the session bound to the token, refreshing its deadline;
        raises UnauthenticatedError for missing, unknown or expired tokens."""
        if not token:
            raise UnauthenticatedError("no session token")
        stamp = self._now()
        with self._lock:
            entry = self._entries.get(token)
            if entry is None:
                raise UnauthenticatedError("unknown session token")
            if stamp > entry.deadline:
                del self._entries[token]
                raise UnauthenticatedError("session expired")
            entry.deadline = stamp + self._ttl
            return entry

    def drop(self, token: str | None) -> None:
        """Delete the token; idempotent, unknown tokens are fine."""
        if not token:
            return
        with self._lock:
            self._entries.pop(token, None)

    def drop_all_for(self, login_name: str) -> None:
        with self._lock:
            for token in [t for t, e in self._entries.items() if e.login_name == login_name]:
                del self._entries[token]


# -- browsing projections


@dataclass(frozen=True)
class BrowseGroup:
    service_type: str
    services: tuple[ServiceRecord, ...]


@dataclass(frozen=True)
class BrowseView:
    """Catalog listing grouped by service type, plus the distinct-type list
    for navigation."""

    view: str
    types: tuple[str, ...]
    groups: tuple[BrowseGroup, ...]


MANAGE_ACTIONS = ("add", "update", "remove")


class PortalService:
    """The management and browsing operations behind the portal endpoints."""

    def __init__(
        self,
        repository: Repository,
        session_ttl_seconds: float = 1800.0,
        now: Callable[[], float] = time.monotonic,
        digest_params: DigestParams = DigestParams(),
    ):
        self.repository = repository
        self.sessions = SessionTable(session_ttl_seconds, now)
        self._digest_params = digest_params
        # Verified against for unknown logins so both failure paths do the
        # same digest work.
        self._decoy_digest = hash_password(secrets.token_urlsafe(8), digest_params)

    # -- accounts

    def register_provider(self, form: Mapping[str, Any]) -> ProviderInfo:
        """Create a provider account from the registration form. The password
        is digested immediately and never stored. No session is issued."""
        password = form.get("password")
        if not isinstance(password, str) or not password:
            raise ValidationError([Violation(EMPTY_FIELD, "password")])
        candidate = {key: value for key, value in form.items() if key != "password"}
        candidate["password_digest"] = hash_password(password, self._digest_params)
        provider = validate_provider(candidate)
        self.repository.add_provider(provider)
        return ProviderInfo(
            provider_name=provider.provider_name,
            login_name=provider.login_name,
            contact_address=provider.contact_address,
            extra_info=provider.extra_info,
        )

    def login(self, login_name: str, password: str) -> str:
        provider = self.repository.get_provider_by_login(login_name)
        if provider is None:
            verify_password(password, self._decoy_digest)
            raise AuthFailedError("login failed")
        if not verify_password(password, provider.password_digest):
            raise AuthFailedError("login failed")
        return self.sessions.create(provider.login_name, provider.provider_name)

    def logout(self, token: str | None) -> None:
        self.sessions.drop(token)

    def whoami(self, token: str | None) -> str:
        """Provider name bound to the token."""
        return self.sessions.validate(token).provider_name

    def remove_own_account(self, token: str | None) -> None:
        entry = self.sessions.validate(token)
        self.repository.remove_provider(entry.provider_name)
        self.sessions.drop_all_for(entry.login_name)

    # -- service management

    def manage_service(self, token: str | None, action: str, payload: Mapping[str, Any]) -> str:
        """Apply add/update/remove to a service owned by the session's
        provider. The payload's provider_name is forced to the session's
        provider; naming another provider is refused outright."""
        if action not in MANAGE_ACTIONS:
            raise ValueError(f"action must be one of {MANAGE_ACTIONS}, got {action!r}")
        entry = self.sessions.validate(token)
        named = payload.get("provider_name")
        if isinstance(named, str) and named.strip() and named.strip() != entry.provider_name:
            raise ForbiddenError(f"session for {entry.provider_name!r} may not manage services of {named.strip()!r}")
        if action == "remove":
            name = payload.get("service_name")
            name = name.strip() if isinstance(name, str) else ""
            if not name:
                raise ValidationError([Violation(EMPTY_FIELD, "service_name")])
            self.repository.remove_service(entry.provider_name, name)
            return "removed"
        candidate = dict(payload)
        candidate["provider_name"] = entry.provider_name
        service = validate_service(candidate)
        if action == "update" and self.repository.get_service(entry.provider_name, service.service_name) is None:
            raise ServiceNotFoundError(
                f"no service {service.service_name!r} for provider {entry.provider_name!r}"
            )
        return self.repository.upsert_service(service)

    def list_own_services(self, token: str | None) -> list[Service]:
        entry = self.sessions.validate(token)
        return self.repository.find_services(by_provider=entry.provider_name)

    # -- public browsing

    def browse(self, by_type: str | None = None, by_provider: str | None = None) -> BrowseView:
        """Catalog view backed by the same lookups as the query service."""
        everything = self.repository.find_services()
        types = tuple(sorted({s.service_type for s in everything}))
        selected = [
            s
            for s in everything
            if (by_type is None or s.service_type == by_type)
            and (by_provider is None or s.provider_name == by_provider)
        ]
        groups = []
        for service_type in sorted({s.service_type for s in selected}):
            members = tuple(
                record_from_service(s) for s in selected if s.service_type == service_type
            )
            groups.append(BrowseGroup(service_type=service_type, services=members))
        view = "type" if by_type is not None else ("provider" if by_provider is not None else "all")
        return BrowseView(view=view, types=types, groups=tuple(groups))
