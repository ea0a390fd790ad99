"""gmd command line: run the server, query it, administer providers and
services, seed fixtures, and run the price-based selection demo.

Exit codes: 0 success, 1 transport or local failure, 2 remote error,
3 authentication required.
"""

from __future__ import annotations

import json
import os
import signal
import sys
import threading
from decimal import Decimal
from pathlib import Path
from typing import Any

import click
import requests

from .broker import NoCandidateError, PricingMode, rank_by_price, select_cheapest
from .client import (
    GmdClient,
    GmdProtocolError,
    GmdRemoteError,
    GmdTimeoutError,
    GmdTransportError,
)
from .gqws import QueryKind, build_query
from .model import (
    PriceError,
    ServiceRecord,
    ValidationError,
    format_price,
    parse_price,
    validate_provider,
    validate_service,
)
from .protocol import STATUS_ERROR, decode_response, iter_record_fields
from .repository import Repository, StoreFormatError
from .server import GmdApp, GmdServer

EXIT_TRANSPORT = 1
EXIT_REMOTE = 2
EXIT_AUTH = 3

_endpoint_option = click.option(
    "--endpoint",
    default="http://127.0.0.1:8100",
    envvar="GMD_ENDPOINT",
    show_default=True,
    help="Base URL of the gmd server.",
)


def _fail(code: int, message: str) -> None:
    click.echo(message, err=True)
    sys.exit(code)


# -- session file


def _session_path() -> Path:
    override = os.environ.get("GMD_SESSION_FILE")
    return Path(override) if override else Path.home() / ".gmd-session"


def _save_token(token: str) -> None:
    path = _session_path()
    path.write_text(token + "\n", encoding="utf-8")
    path.chmod(0o600)


def _load_token() -> str | None:
    env_token = os.environ.get("GMD_TOKEN")
    if env_token:
        return env_token
    path = _session_path()
    if path.is_file():
        return path.read_text(encoding="utf-8").strip() or None
    return None


def _clear_token() -> None:
    _session_path().unlink(missing_ok=True)


# -- management API plumbing


def _api_request(
    method: str,
    endpoint: str,
    path: str,
    payload: dict[str, Any] | None = None,
    token: str | None = None,
) -> tuple[int, dict[str, Any]]:
    url = endpoint.rstrip("/") + path
    headers = {}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    try:
        response = requests.request(method, url, json=payload, headers=headers, timeout=10)
    except requests.RequestException as err:
        _fail(EXIT_TRANSPORT, f"cannot reach {url}: {err}")
    try:
        data = response.json()
    except ValueError:
        data = {}
    if not isinstance(data, dict):
        data = {}
    return response.status_code, data


def _expect(status: int, data: dict[str, Any], *ok_statuses: int) -> dict[str, Any]:
    if status in ok_statuses:
        return data
    if status == 401:
        _fail(EXIT_AUTH, "not logged in" if data.get("error") == "unauthenticated" else "login failed")
    detail = data.get("detail") or data.get("error") or f"HTTP {status}"
    _fail(EXIT_REMOTE, str(detail))
    raise AssertionError("unreachable")


# -- output helpers


def _print_records(records: list[ServiceRecord]) -> None:
    columns: list[str] = []
    rows = []
    for record in records:
        fields = dict(iter_record_fields(record))
        for name in fields:
            if name not in columns:
                columns.append(name)
        rows.append(fields)
    if not columns:
        columns = ["name", "address"]
    widths = {c: max(len(c), *(len(r.get(c, "")) for r in rows)) if rows else len(c) for c in columns}
    click.echo("  ".join(c.upper().ljust(widths[c]) for c in columns).rstrip())
    for row in rows:
        click.echo("  ".join(row.get(c, "").ljust(widths[c]) for c in columns).rstrip())


def _run_query(kind: QueryKind, argument: str | None, endpoint: str, fmt: str) -> None:
    client = GmdClient(endpoint=endpoint)
    try:
        if fmt == "xml":
            raw = client.post_query(build_query(kind, argument))
            click.echo(raw, nl=False)
            response = decode_response(raw)
            if response.status == STATUS_ERROR:
                sys.exit(EXIT_REMOTE)
            return
        records = client.invoke(kind, argument)
    except GmdRemoteError as err:
        _fail(EXIT_REMOTE, err.reason)
    except (GmdTransportError, GmdTimeoutError, GmdProtocolError) as err:
        _fail(EXIT_TRANSPORT, str(err))
    else:
        _print_records(records)


# -- commands


@click.group()
def main() -> None:
    """Grid market directory: publish, discover and select priced services."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True, help="Address to bind.")
@click.option("--port", default=8100, show_default=True, type=click.IntRange(0, 65535))
@click.option("--store", default="./gmd-store", show_default=True, help="Store document path.")
@click.option("--session-ttl", default=30, show_default=True, type=click.IntRange(min=1), help="Session idle expiry, minutes.")
@click.option("--assets", default=None, envvar="GMD_ASSETS", help="Directory of built portal assets to serve under /.")
def serve(host: str, port: int, store: str, session_ttl: int, assets: str | None) -> None:
    """Run the registry server."""
    try:
        repository = Repository(store)
    except StoreFormatError as err:
        _fail(EXIT_TRANSPORT, f"cannot open store: {err}")
    app = GmdApp(repository, session_ttl_seconds=session_ttl * 60.0, assets_dir=assets)
    try:
        server = GmdServer(app, host=host, port=port)
    except OSError as err:
        _fail(EXIT_TRANSPORT, f"cannot bind {host}:{port}: {err}")

    def _request_shutdown(signum: int, frame: Any) -> None:
        threading.Thread(target=server.shutdown, daemon=True).start()

    signal.signal(signal.SIGTERM, _request_shutdown)
    signal.signal(signal.SIGINT, _request_shutdown)
    click.echo(f"gmd serving on http://{host}:{server.port} (store: {store})")
    try:
        server.serve_forever()
    finally:
        server.server_close()
    click.echo("gmd server stopped")


@main.group()
def query() -> None:
    """Query the registry (no login needed)."""


_format_option = click.option(
    "--format", "fmt", type=click.Choice(["table", "xml"]), default="table", show_default=True
)


@query.command("all")
@_endpoint_option
@_format_option
def query_all(endpoint: str, fmt: str) -> None:
    """List every registered service."""
    _run_query(QueryKind.ALL, None, endpoint, fmt)


@query.command("type")
@click.argument("service_type")
@_endpoint_option
@_format_option
def query_type(service_type: str, endpoint: str, fmt: str) -> None:
    """List services of one service type."""
    _run_query(QueryKind.BY_TYPE, service_type, endpoint, fmt)


@query.command("host")
@click.argument("host_name")
@_endpoint_option
@_format_option
def query_host(host_name: str, endpoint: str, fmt: str) -> None:
    """List services offered on one host."""
    _run_query(QueryKind.BY_HOST, host_name, endpoint, fmt)


@query.command("provider")
@click.argument("provider_name")
@_endpoint_option
@_format_option
def query_provider(provider_name: str, endpoint: str, fmt: str) -> None:
    """List services of one provider."""
    _run_query(QueryKind.BY_PROVIDER, provider_name, endpoint, fmt)


@query.command("contact")
@click.argument("service_type")
@_endpoint_option
@_format_option
def query_contact(service_type: str, endpoint: str, fmt: str) -> None:
    """List name and address only for one service type."""
    _run_query(QueryKind.CONTACT_BY_TYPE, service_type, endpoint, fmt)


@query.command("price")
@click.argument("service_name")
@_endpoint_option
@_format_option
def query_price(service_name: str, endpoint: str, fmt: str) -> None:
    """Show the price of a named service."""
    _run_query(QueryKind.PRICE_BY_NAME, service_name, endpoint, fmt)


@main.command()
@click.argument("service_type")
@click.option("--mode", type=click.Choice([m.value for m in PricingMode]), required=True,
              help="Price component to minimize: cpu (per CPU-second) or ao (per application operation).")
@click.option("--max-price", default=None, help="Per-unit price cap.")
@click.option("--rank", is_flag=True, help="Print the whole ranking instead of only the winner.")
@_endpoint_option
def select(service_type: str, mode: str, max_price: str | None, rank: bool, endpoint: str) -> None:
    """Pick the cheapest service of SERVICE_TYPE by price."""
    pricing = PricingMode(mode)
    budget: Decimal | None = None
    if max_price is not None:
        try:
            budget = parse_price(max_price)
        except PriceError as err:
            raise click.BadParameter(str(err), param_hint="--max-price")
    client = GmdClient(endpoint=endpoint)
    try:
        if rank:
            _print_records(rank_by_price(client, service_type, pricing))
            return
        chosen = select_cheapest(client, service_type, pricing, budget)
    except NoCandidateError:
        click.echo("no candidate")
        return
    except GmdRemoteError as err:
        _fail(EXIT_REMOTE, err.reason)
    except (GmdTransportError, GmdTimeoutError, GmdProtocolError) as err:
        _fail(EXIT_TRANSPORT, str(err))
    else:
        assert chosen.price is not None
        click.echo(
            f"{chosen.provider}/{chosen.name}"
            f" hardware={format_price(chosen.price.hardware)}"
            f" software={format_price(chosen.price.software)}"
            f" address={chosen.address}"
        )


@main.group()
def provider() -> None:
    """Provider account administration."""


@provider.command("register")
@click.option("--name", required=True, help="Display/organisation name.")
@click.option("--login", required=True, help="Account login name.")
@click.option("--password", prompt=True, hide_input=True, confirmation_prompt=True)
@click.option("--contact", required=True, help="Contact address.")
@click.option("--extra", default="", help="Additional information.")
@_endpoint_option
def provider_register(name: str, login: str, password: str, contact: str, extra: str, endpoint: str) -> None:
    """Register a new provider account."""
    status, data = _api_request(
        "POST",
        endpoint,
        "/api/providers",
        payload={
            "provider_name": name,
            "login_name": login,
            "password": password,
            "contact_address": contact,
            "extra_info": extra,
        },
    )
    data = _expect(status, data, 201)
    click.echo(f"registered provider {data.get('provider_name', name)!r}")


@provider.command("remove")
@_endpoint_option
def provider_remove(endpoint: str) -> None:
    """Remove the logged-in provider and all of its services."""
    status, data = _api_request("DELETE", endpoint, "/api/my/account", token=_load_token())
    _expect(status, data, 200)
    _clear_token()
    click.echo("account removed")


@main.command()
@click.option("--login", required=True, help="Account login name.")
@click.option("--password", prompt=True, hide_input=True)
@_endpoint_option
def login(login: str, password: str, endpoint: str) -> None:
    """Log in and cache the session token."""
    status, data = _api_request(
        "POST", endpoint, "/api/login", payload={"login_name": login, "password": password}
    )
    data = _expect(status, data, 200)
    token = data.get("token")
    if not isinstance(token, str) or not token:
        _fail(EXIT_REMOTE, "server returned no token")
    _save_token(token)
    click.echo(f"logged in as {data.get('provider_name', login)!r}")


@main.command()
@_endpoint_option
def logout(endpoint: str) -> None:
    """End the cached session."""
    status, data = _api_request("POST", endpoint, "/api/logout", token=_load_token())
    _expect(status, data, 200)
    _clear_token()
    click.echo("logged out")


@main.group()
def service() -> None:
    """Manage the logged-in provider's services."""


_service_field_options = [
    click.option("--name", required=True, help="Service name."),
    click.option("--type", "service_type", required=True, help="Service type."),
    click.option("--host", required=True, help="Host name offering the service."),
    click.option("--app-path", default="", help="Application path on the host."),
    click.option("--hw-price", required=True, help="Price per CPU-second."),
    click.option("--sw-price", required=True, help="Price per application operation."),
    click.option("--description", default="", help="Free-text description."),
]


def _with_service_fields(command):
    for option in reversed(_service_field_options):
        command = option(command)
    return command


def _service_payload(name: str, service_type: str, host: str, app_path: str,
                     hw_price: str, sw_price: str, description: str) -> dict[str, Any]:
    return {
        "service_name": name,
        "service_type": service_type,
        "host_name": host,
        "application_path": app_path,
        "price": {"hardware": hw_price, "software": sw_price},
        "description": description,
    }


@service.command("add")
@_with_service_fields
@_endpoint_option
def service_add(name: str, service_type: str, host: str, app_path: str,
                hw_price: str, sw_price: str, description: str, endpoint: str) -> None:
    """Publish (or overwrite) one of your services."""
    payload = _service_payload(name, service_type, host, app_path, hw_price, sw_price, description)
    status, data = _api_request("POST", endpoint, "/api/my/services", payload=payload, token=_load_token())
    data = _expect(status, data, 200, 201)
    click.echo(f"{data.get('status', 'ok')}: {name}")


@service.command("update")
@_with_service_fields
@_endpoint_option
def service_update(name: str, service_type: str, host: str, app_path: str,
                   hw_price: str, sw_price: str, description: str, endpoint: str) -> None:
    """Update one of your existing services."""
    payload = _service_payload(name, service_type, host, app_path, hw_price, sw_price, description)
    status, data = _api_request(
        "PUT", endpoint, f"/api/my/services/{name}", payload=payload, token=_load_token()
    )
    data = _expect(status, data, 200)
    click.echo(f"updated: {name}")


@service.command("remove")
@click.option("--name", required=True, help="Service name.")
@_endpoint_option
def service_remove(name: str, endpoint: str) -> None:
    """Withdraw one of your services."""
    status, data = _api_request("DELETE", endpoint, f"/api/my/services/{name}", token=_load_token())
    _expect(status, data, 200)
    click.echo(f"removed: {name}")


@main.command()
@click.option("--fixture", required=True, type=click.Path(exists=False), help="Fixture document path.")
@_endpoint_option
def seed(fixture: str, endpoint: str) -> None:
    """Load a providers+services fixture into a running server.

    The whole fixture is validated before anything is sent, so a malformed
    file never leaves a provider half-seeded. Re-seeding upserts.
    """
    try:
        doc = json.loads(Path(fixture).read_text(encoding="utf-8"))
    except (OSError, ValueError) as err:
        _fail(EXIT_TRANSPORT, f"cannot read fixture: {err}")
    try:
        plan = _validate_fixture(doc)
    except ValueError as err:
        _fail(EXIT_TRANSPORT, f"malformed fixture: {err}")
    seeded_services = 0
    for entry, services in plan:
        status, data = _api_request("POST", endpoint, "/api/providers", payload=entry)
        if status not in (201, 409):
            _expect(status, data, 201, 409)
        status, data = _api_request(
            "POST",
            endpoint,
            "/api/login",
            payload={"login_name": entry["login_name"], "password": entry["password"]},
        )
        data = _expect(status, data, 200)
        token = data["token"]
        for payload in services:
            status, data = _api_request(
                "POST", endpoint, "/api/my/services", payload=payload, token=token
            )
            _expect(status, data, 200, 201)
            seeded_services += 1
        _api_request("POST", endpoint, "/api/logout", token=token)
    click.echo(f"seeded {len(plan)} providers, {seeded_services} services")


def _validate_fixture(doc: Any) -> list[tuple[dict[str, Any], list[dict[str, Any]]]]:
    """Shape-check a fixture document; returns (provider entry, services) pairs."""
    if not isinstance(doc, dict):
        raise ValueError("fixture must be a JSON object")
    providers = doc.get("providers")
    services = doc.get("services")
    if not isinstance(providers, list) or not isinstance(services, list):
        raise ValueError("fixture must hold provider and service lists")
    plan: list[tuple[dict[str, Any], list[dict[str, Any]]]] = []
    names: dict[str, list[dict[str, Any]]] = {}
    for entry in providers:
        if not isinstance(entry, dict):
            raise ValueError("provider entry is not an object")
        password = entry.get("password")
        if not isinstance(password, str) or not password:
            raise ValueError(f"provider {entry.get('provider_name')!r} has no password")
        shape = {k: v for k, v in entry.items() if k != "password"}
        shape["password_digest"] = "fixture"
        try:
            provider = validate_provider(shape)
        except ValidationError as err:
            raise ValueError(f"provider {entry.get('provider_name')!r}: {err}")
        if provider.provider_name in names:
            raise ValueError(f"duplicate provider {provider.provider_name!r}")
        names[provider.provider_name] = []
        plan.append((entry, names[provider.provider_name]))
    for entry in services:
        if not isinstance(entry, dict):
            raise ValueError("service entry is not an object")
        try:
            parsed = validate_service(entry)
        except ValidationError as err:
            raise ValueError(f"service {entry.get('service_name')!r}: {err}")
        if parsed.provider_name not in names:
            raise ValueError(f"service {parsed.service_name!r} names unknown provider {parsed.provider_name!r}")
        names[parsed.provider_name].append(entry)
    return plan


if __name__ == "__main__":
    main()
