"""Durable provider/service store with uniqueness enforcement.

One Repository instance serves all request handlers. Mutations take a lock
and are applied atomically; when a store path is configured, every mutation
rewrites the whole store document (write temp file, fsync, rename), so a
reopened store is observationally identical to the in-memory history.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Any

from .model import (
    PriceQuote,
    Provider,
    ProviderInfo,
    Service,
    parse_price,
)


class RepositoryError(Exception):
    """Base for repository failures."""


class DuplicateLoginNameError(RepositoryError):
    pass


class DuplicateProviderNameError(RepositoryError):
    pass


class UnknownProviderError(RepositoryError):
    """A service refers to a provider that is not stored."""


class ProviderNotFoundError(RepositoryError):
    pass


class ServiceNotFoundError(RepositoryError):
    pass


class StoreFormatError(RepositoryError):
    """The store document on disk is not readable."""


def provider_to_json(provider: Provider) -> dict[str, str]:
    return {
        "provider_name": provider.provider_name,
        "login_name": provider.login_name,
        "password_digest": provider.password_digest,
        "contact_address": provider.contact_address,
        "extra_info": provider.extra_info,
    }


def service_to_json(service: Service) -> dict[str, Any]:
    return {
        "service_name": service.service_name,
        "service_type": service.service_type,
        "provider_name": service.provider_name,
        "host_name": service.host_name,
        "application_path": service.application_path,
        "price": service.price.to_json(),
        "description": service.description,
    }


def _require_str(obj: dict[str, Any], key: str, where: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise StoreFormatError(f"{where}: field {key!r} missing or not text")
    return value


def provider_from_json(obj: Any) -> Provider:
    if not isinstance(obj, dict):
        raise StoreFormatError("provider entry is not an object")
    return Provider(
        provider_name=_require_str(obj, "provider_name", "provider"),
        login_name=_require_str(obj, "login_name", "provider"),
        password_digest=_require_str(obj, "password_digest", "provider"),
        contact_address=_require_str(obj, "contact_address", "provider"),
        extra_info=obj.get("extra_info", "") or "",
    )


def service_from_json(obj: Any) -> Service:
    if not isinstance(obj, dict):
        raise StoreFormatError("service entry is not an object")
    price = obj.get("price")
    if not isinstance(price, dict):
        raise StoreFormatError("service entry has no price object")
    try:
        quote = PriceQuote(
            hardware=parse_price(price.get("hardware")),
            software=parse_price(price.get("software")),
        )
    except ValueError as err:
        raise StoreFormatError(f"service entry has a bad price: {err}") from err
    return Service(
        service_name=_require_str(obj, "service_name", "service"),
        service_type=_require_str(obj, "service_type", "service"),
        provider_name=_require_str(obj, "provider_name", "service"),
        host_name=_require_str(obj, "host_name", "service"),
        price=quote,
        application_path=obj.get("application_path", "") or "",
        description=obj.get("description", "") or "",
    )


class Repository:
    """Provider and service storage, in-memory or file-backed.

    Keys: providers by login_name (provider_name is unique too), services
    by (provider_name, service_name). Removing a provider cascades to its
    services. All list results are sorted deterministically.
    """

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.RLock()
        self._providers: dict[str, Provider] = {}
        self._services: dict[tuple[str, str], Service] = {}
        self._path = Path(path) if path is not None else None
        if self._path is not None and self._path.exists():
            self._load()

    @property
    def backend(self) -> str:
        return "in-memory" if self._path is None else "file-backed"

    # -- providers

    def add_provider(self, provider: Provider) -> None:
        with self._lock:
            if provider.login_name in self._providers:
                raise DuplicateLoginNameError(f"login name already registered: {provider.login_name!r}")
            if any(p.provider_name == provider.provider_name for p in self._providers.values()):
                raise DuplicateProviderNameError(f"provider name already registered: {provider.provider_name!r}")
            self._providers[provider.login_name] = provider
            self._persist()

    def remove_provider(self, provider_name: str) -> None:
        with self._lock:
            login = self._login_for(provider_name)
            if login is None:
                raise ProviderNotFoundError(f"no provider named {provider_name!r}")
            del self._providers[login]
            for key in [k for k in self._services if k[0] == provider_name]:
                del self._services[key]
            self._persist()

    def get_provider(self, provider_name: str) -> Provider | None:
        with self._lock:
            login = self._login_for(provider_name)
            return self._providers[login] if login is not None else None

    def get_provider_by_login(self, login_name: str) -> Provider | None:
        with self._lock:
            return self._providers.get(login_name)

    def list_providers(self) -> list[ProviderInfo]:
        with self._lock:
            infos = [
                ProviderInfo(
                    provider_name=p.provider_name,
                    login_name=p.login_name,
                    contact_address=p.contact_address,
                    extra_info=p.extra_info,
                )
                for p in self._providers.values()
            ]
        return sorted(infos, key=lambda p: p.provider_name)

    # -- services

    def upsert_service(self, service: Service) -> str:
        """Store the service under (provider_name, service_name); returns
        "created" or "updated"."""
        with self._lock:
            if self._login_for(service.provider_name) is None:
                raise UnknownProviderError(f"no provider named {service.provider_name!r}")
            key = (service.provider_name, service.service_name)
            outcome = "updated" if key in self._services else "created"
            self._services[key] = service
            self._persist()
            return outcome

    def remove_service(self, provider_name: str, service_name: str) -> None:
        with self._lock:
            key = (provider_name, service_name)
            if key not in self._services:
                raise ServiceNotFoundError(f"no service {service_name!r} for provider {provider_name!r}")
            del self._services[key]
            self._persist()

    def get_service(self, provider_name: str, service_name: str) -> Service | None:
        with self._lock:
            return self._services.get((provider_name, service_name))

    def find_services(
        self,
        *,
        by_type: str | None = None,
        by_provider: str | None = None,
        by_host: str | None = None,
        by_name: str | None = None,
    ) -> list[Service]:
        """Services satisfying the conjunction of the given constraints,
        sorted by (provider_name, service_name). Empty filter returns all."""
        with self._lock:
            candidates = list(self._services.values())
        matches = [
            s
            for s in candidates
            if (by_type is None or s.service_type == by_type)
            and (by_provider is None or s.provider_name == by_provider)
            and (by_host is None or s.host_name == by_host)
            and (by_name is None or s.service_name == by_name)
        ]
        return sorted(matches, key=lambda s: (s.provider_name, s.service_name))

    # -- persistence

    def dump_json(self) -> str:
        """The store document as text (also the on-disk format)."""
        with self._lock:
            providers = sorted(self._providers.values(), key=lambda p: p.provider_name)
            services = sorted(self._services.values(), key=lambda s: (s.provider_name, s.service_name))
            doc = {
                "providers": [provider_to_json(p) for p in providers],
                "services": [service_to_json(s) for s in services],
            }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"

    def state_digest(self) -> str:
        """Hash of the current store content, for read-only checks."""
        return hashlib.sha256(self.dump_json().encode("utf-8")).hexdigest()

    def _login_for(self, provider_name: str) -> str | None:
        for login, provider in self._providers.items():
            if provider.provider_name == provider_name:
                return login
        return None

    def _persist(self) -> None:
        if self._path is None:
            return
        text = self.dump_json()
        directory = self._path.parent
        directory.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=directory, prefix=self._path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp_name, self._path)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise

    def _load(self) -> None:
        assert self._path is not None
        try:
            doc = json.loads(self._path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as err:
            raise StoreFormatError(f"cannot read store {self._path}: {err}") from err
        if not isinstance(doc, dict):
            raise StoreFormatError("store document is not an object")
        providers = doc.get("providers", [])
        services = doc.get("services", [])
        if not isinstance(providers, list) or not isinstance(services, list):
            raise StoreFormatError("store document must hold provider and service lists")
        loaded_providers: dict[str, Provider] = {}
        for entry in providers:
            provider = provider_from_json(entry)
            if provider.login_name in loaded_providers:
                raise StoreFormatError(f"duplicate login name in store: {provider.login_name!r}")
            loaded_providers[provider.login_name] = provider
        names = [p.provider_name for p in loaded_providers.values()]
        if len(set(names)) != len(names):
            raise StoreFormatError("duplicate provider name in store")
        loaded_services: dict[tuple[str, str], Service] = {}
        for entry in services:
            service = service_from_json(entry)
            if service.provider_name not in names:
                raise StoreFormatError(f"service refers to unknown provider {service.provider_name!r}")
            key = (service.provider_name, service.service_name)
            if key in loaded_services:
                raise StoreFormatError(f"duplicate service key in store: {key!r}")
            loaded_services[key] = service
        self._providers = loaded_providers
        self._services = loaded_services
