"""Repository tests: uniqueness, cascade, lookup oracle, durable persistence."""

from __future__ import annotations

import json
import random
from decimal import Decimal

import pytest

from gmd.model import PriceQuote, Provider, Service
from gmd.repository import (
    DuplicateLoginNameError,
    DuplicateProviderNameError,
    ProviderNotFoundError,
    Repository,
    ServiceNotFoundError,
    StoreFormatError,
    UnknownProviderError,
)


def make_provider(n: int) -> Provider:
    return Provider(
        provider_name=f"provider-{n}",
        login_name=f"login{n}",
        password_digest="scrypt$x",
        contact_address=f"p{n}@example.test",
    )


def make_service(provider: str, name: str, service_type: str = "CPU service",
                 host: str = "h1.example.test", hw: str = "1", sw: str = "1") -> Service:
    return Service(
        service_name=name,
        service_type=service_type,
        provider_name=provider,
        host_name=host,
        price=PriceQuote(Decimal(hw), Decimal(sw)),
    )


def test_provider_uniqueness_both_keys(repo):
    repo.add_provider(make_provider(1))
    with pytest.raises(DuplicateLoginNameError):
        repo.add_provider(make_provider(1))
    clash = Provider("provider-1", "other-login", "scrypt$x", "a@example.test")
    with pytest.raises(DuplicateProviderNameError):
        repo.add_provider(clash)
    assert [p.provider_name for p in repo.list_providers()] == ["provider-1"]


def test_list_providers_redacts_and_sorts(repo):
    repo.add_provider(make_provider(2))
    repo.add_provider(make_provider(1))
    infos = repo.list_providers()
    assert [p.provider_name for p in infos] == ["provider-1", "provider-2"]
    assert not any(hasattr(p, "password_digest") for p in infos)


def test_upsert_requires_known_provider(repo):
    with pytest.raises(UnknownProviderError):
        repo.upsert_service(make_service("ghost", "s1"))


def test_upsert_created_then_updated(repo):
    repo.add_provider(make_provider(1))
    assert repo.upsert_service(make_service("provider-1", "s1")) == "created"
    assert repo.upsert_service(make_service("provider-1", "s1", hw="9")) == "updated"
    stored = repo.get_service("provider-1", "s1")
    assert stored is not None and stored.price.hardware == Decimal("9")


def test_same_service_name_under_two_providers(repo):
    repo.add_provider(make_provider(1))
    repo.add_provider(make_provider(2))
    assert repo.upsert_service(make_service("provider-1", "dockit")) == "created"
    assert repo.upsert_service(make_service("provider-2", "dockit")) == "created"
    assert len(repo.find_services(by_name="dockit")) == 2


def test_remove_service_and_missing(repo):
    repo.add_provider(make_provider(1))
    repo.upsert_service(make_service("provider-1", "s1"))
    repo.remove_service("provider-1", "s1")
    with pytest.raises(ServiceNotFoundError):
        repo.remove_service("provider-1", "s1")


def test_remove_provider_cascades(repo):
    repo.add_provider(make_provider(1))
    repo.add_provider(make_provider(2))
    repo.upsert_service(make_service("provider-1", "s1"))
    repo.upsert_service(make_service("provider-1", "s2"))
    repo.upsert_service(make_service("provider-2", "s1"))
    repo.remove_provider("provider-1")
    assert repo.get_provider("provider-1") is None
    assert [s.provider_name for s in repo.find_services()] == ["provider-2"]
    with pytest.raises(ProviderNotFoundError):
        repo.remove_provider("provider-1")


def _scan(services, by_type=None, by_provider=None, by_host=None, by_name=None):
    """Brute-force oracle for find_services."""
    out = [
        s
        for s in services
        if (by_type is None or s.service_type == by_type)
        and (by_provider is None or s.provider_name == by_provider)
        and (by_host is None or s.host_name == by_host)
        and (by_name is None or s.service_name == by_name)
    ]
    return sorted(out, key=lambda s: (s.provider_name, s.service_name))


def test_find_services_matches_scan_oracle(repo):
    rng = random.Random(3002)
    providers = [make_provider(i) for i in range(6)]
    for p in providers:
        repo.add_provider(p)
    types = ["CPU service", "Crash Simulation", "Molecular Docking"]
    hosts = [f"h{i}.example.test" for i in range(4)]
    everything = []
    for i in range(60):
        service = make_service(
            rng.choice(providers).provider_name,
            f"svc-{rng.randrange(20)}",
            service_type=rng.choice(types),
            host=rng.choice(hosts),
            hw=str(rng.randrange(10)),
        )
        repo.upsert_service(service)
        everything = [s for s in everything
                      if (s.provider_name, s.service_name) != (service.provider_name, service.service_name)]
        everything.append(service)
    for _ in range(300):
        kwargs = {}
        if rng.random() < 0.5:
            kwargs["by_type"] = rng.choice(types + ["missing type"])
        if rng.random() < 0.4:
            kwargs["by_provider"] = rng.choice([p.provider_name for p in providers] + ["nobody"])
        if rng.random() < 0.4:
            kwargs["by_host"] = rng.choice(hosts)
        if rng.random() < 0.3:
            kwargs["by_name"] = f"svc-{rng.randrange(25)}"
        assert repo.find_services(**kwargs) == _scan(everything, **kwargs)


def test_empty_filter_returns_all_twelve(seeded_repo):
    services = seeded_repo.find_services()
    assert len(services) == 12
    assert services == sorted(services, key=lambda s: (s.provider_name, s.service_name))


def test_persistence_reopen_is_observationally_equal(tmp_path):
    path = tmp_path / "store.json"
    first = Repository(path)
    first.add_provider(make_provider(1))
    first.upsert_service(make_service("provider-1", "s1", hw="2.5"))
    first.upsert_service(make_service("provider-1", "s2"))
    first.remove_service("provider-1", "s2")

    reopened = Repository(path)
    assert reopened.dump_json() == first.dump_json()
    assert reopened.state_digest() == first.state_digest()
    assert reopened.find_services() == first.find_services()


def test_persist_leaves_no_temp_files(tmp_path):
    path = tmp_path / "store.json"
    repository = Repository(path)
    repository.add_provider(make_provider(1))
    for i in range(5):
        repository.upsert_service(make_service("provider-1", f"s{i}"))
    assert [p.name for p in tmp_path.iterdir()] == ["store.json"]


def test_in_memory_never_writes(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    repository = Repository()
    repository.add_provider(make_provider(1))
    assert list(tmp_path.iterdir()) == []
    assert repository.backend == "in-memory"


def test_store_rejects_malformed_documents(tmp_path):
    cases = [
        "not json",
        json.dumps([1, 2]),
        json.dumps({"providers": {}, "services": []}),
        json.dumps({"providers": [{"provider_name": "p"}], "services": []}),
        json.dumps(
            {
                "providers": [
                    {"provider_name": "p", "login_name": "l", "password_digest": "d", "contact_address": "a"},
                    {"provider_name": "p2", "login_name": "l", "password_digest": "d", "contact_address": "a"},
                ],
                "services": [],
            }
        ),
        json.dumps(
            {
                "providers": [],
                "services": [
                    {
                        "service_name": "s",
                        "service_type": "t",
                        "provider_name": "ghost",
                        "host_name": "h",
                        "price": {"hardware": "1", "software": "1"},
                    }
                ],
            }
        ),
    ]
    for i, text in enumerate(cases):
        path = tmp_path / f"store{i}.json"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(StoreFormatError):
            Repository(path)


def test_store_missing_file_starts_empty(tmp_path):
    path = tmp_path / "fresh.json"
    repository = Repository(path)
    assert repository.find_services() == []
    assert not path.exists()  # nothing written until the first mutation
    repository.add_provider(make_provider(1))
    assert path.exists()
