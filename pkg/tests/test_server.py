"""HTTP server tests: route behavior, status mapping, cookies, assets."""

from __future__ import annotations

import requests

from conftest import seed_repository
from gmd.protocol import STATUS_ERROR, STATUS_OK, QueryMessage, decode_response, encode_query
from gmd.repository import Repository
from gmd.soap import is_enveloped, unwrap_envelope, wrap_envelope

REGISTRATION = {
    "provider_name": "World Wide Grid, Inc.",
    "login_name": "wwg",
    "password": "wwg-pass",
    "contact_address": "ops@wwgrid.example",
}

SERVICE_FORM = {
    "service_name": "manjra-cpu",
    "service_type": "CPU service",
    "host_name": "manjra.cs.mu.oz.au",
    "price": {"hardware": "2", "software": "0"},
}


def register_and_login(base_url: str, registration=None) -> tuple[str, requests.Response]:
    form = registration or REGISTRATION
    response = requests.post(f"{base_url}/api/providers", json=form, timeout=5)
    assert response.status_code == 201, response.text
    login = requests.post(
        f"{base_url}/api/login",
        json={"login_name": form["login_name"], "password": form["password"]},
        timeout=5,
    )
    assert login.status_code == 200, login.text
    return login.json()["token"], login


def test_healthz(live_server):
    response = requests.get(f"{live_server.base_url}/healthz", timeout=5)
    assert response.status_code == 200
    assert response.text == "ok"


def test_gqws_bare_query(live_server):
    xml = encode_query(QueryMessage(service_type="CPU service"))
    response = requests.post(f"{live_server.base_url}/gqws", data=xml.encode(), timeout=5)
    assert response.status_code == 200
    assert response.headers["Content-Type"].startswith("text/xml")
    decoded = decode_response(response.text)
    assert decoded.status == STATUS_OK
    assert len(decoded.services) == 4


def test_gqws_malformed_is_400_with_error_document(live_server):
    response = requests.post(f"{live_server.base_url}/gqws", data=b"<broken", timeout=5)
    assert response.status_code == 400
    assert decode_response(response.text).status == STATUS_ERROR


def test_gqws_envelope_sniffing(live_server):
    inner = encode_query(QueryMessage(service_type="CPU service"))
    bare = requests.post(f"{live_server.base_url}/gqws", data=inner.encode(), timeout=5)
    wrapped = requests.post(
        f"{live_server.base_url}/gqws", data=wrap_envelope(inner).encode(), timeout=5
    )
    assert wrapped.status_code == 200
    assert is_enveloped(wrapped.text)
    assert unwrap_envelope(wrapped.text) == bare.text


def test_register_login_cookie_and_manage(server_factory):
    live = server_factory()
    token, login = register_and_login(live.base_url)
    cookie = login.headers["Set-Cookie"]
    assert cookie.startswith("gmd_session=")
    assert "HttpOnly" in cookie and "SameSite=Lax" in cookie

    created = requests.post(
        f"{live.base_url}/api/my/services",
        json=SERVICE_FORM,
        headers={"Authorization": f"Bearer {token}"},
        timeout=5,
    )
    assert created.status_code == 201
    assert created.json() == {"status": "created"}

    # The cookie alone also authenticates.
    listing = requests.get(
        f"{live.base_url}/api/my/services", cookies={"gmd_session": token}, timeout=5
    )
    assert listing.status_code == 200
    assert [s["service_name"] for s in listing.json()["services"]] == ["manjra-cpu"]


def test_manage_without_token_is_401(server_factory):
    live = server_factory()
    for method, path, payload in [
        ("post", "/api/my/services", SERVICE_FORM),
        ("put", "/api/my/services/x", SERVICE_FORM),
        ("delete", "/api/my/services/x", None),
        ("get", "/api/my/services", None),
        ("delete", "/api/my/account", None),
    ]:
        response = getattr(requests, method)(f"{live.base_url}{path}", json=payload, timeout=5)
        assert response.status_code == 401, (method, path)
        assert response.json()["error"] == "unauthenticated"


def test_login_failure_is_401(server_factory):
    live = server_factory()
    requests.post(f"{live.base_url}/api/providers", json=REGISTRATION, timeout=5)
    bad = requests.post(
        f"{live.base_url}/api/login",
        json={"login_name": "wwg", "password": "wrong"},
        timeout=5,
    )
    assert bad.status_code == 401
    assert bad.json()["error"] == "auth_failed"


def test_duplicate_registration_is_409(server_factory):
    live = server_factory()
    first = requests.post(f"{live.base_url}/api/providers", json=REGISTRATION, timeout=5)
    assert first.status_code == 201
    second = requests.post(f"{live.base_url}/api/providers", json=REGISTRATION, timeout=5)
    assert second.status_code == 409
    assert second.json()["error"] == "duplicate_login_name"


def test_invalid_registration_reports_violations(server_factory):
    live = server_factory()
    response = requests.post(
        f"{live.base_url}/api/providers",
        json={"provider_name": "", "login_name": "x", "password": "p", "contact_address": ""},
        timeout=5,
    )
    assert response.status_code == 400
    violations = {(v["code"], v["field"]) for v in response.json()["violations"]}
    assert ("empty_field", "provider_name") in violations
    assert ("empty_field", "contact_address") in violations


def test_invalid_json_body_is_400(server_factory):
    live = server_factory()
    response = requests.post(
        f"{live.base_url}/api/providers", data=b"{not json", timeout=5
    )
    assert response.status_code == 400
    assert response.json()["error"] == "invalid_json"


def test_put_path_name_wins_and_update_missing_is_404(server_factory):
    live = server_factory()
    token, _ = register_and_login(live.base_url)
    headers = {"Authorization": f"Bearer {token}"}
    requests.post(f"{live.base_url}/api/my/services", json=SERVICE_FORM, headers=headers, timeout=5)

    renamed = dict(SERVICE_FORM, service_name="something-else", price={"hardware": "9", "software": "0"})
    updated = requests.put(
        f"{live.base_url}/api/my/services/manjra-cpu", json=renamed, headers=headers, timeout=5
    )
    assert updated.status_code == 200

    listing = requests.get(f"{live.base_url}/api/my/services", headers=headers, timeout=5)
    services = listing.json()["services"]
    assert [(s["service_name"], s["price"]["hardware"]) for s in services] == [("manjra-cpu", "9")]

    missing = requests.put(
        f"{live.base_url}/api/my/services/ghost", json=dict(SERVICE_FORM, service_name="ghost"),
        headers=headers, timeout=5,
    )
    assert missing.status_code == 404


def test_cross_provider_modification_is_403(server_factory):
    live = server_factory()
    token, _ = register_and_login(live.base_url)
    other = dict(REGISTRATION, provider_name="EuroSim Laboratories", login_name="eurosim")
    other_token, _ = register_and_login(live.base_url, other)
    hostile = dict(SERVICE_FORM, provider_name="World Wide Grid, Inc.")
    response = requests.post(
        f"{live.base_url}/api/my/services",
        json=hostile,
        headers={"Authorization": f"Bearer {other_token}"},
        timeout=5,
    )
    assert response.status_code == 403
    assert response.json()["error"] == "forbidden"


def test_logout_clears_cookie_and_invalidate_token(server_factory):
    live = server_factory()
    token, _ = register_and_login(live.base_url)
    headers = {"Authorization": f"Bearer {token}"}
    logout = requests.post(f"{live.base_url}/api/logout", headers=headers, timeout=5)
    assert logout.status_code == 200
    assert "Max-Age=0" in logout.headers["Set-Cookie"]
    after = requests.get(f"{live.base_url}/api/my/services", headers=headers, timeout=5)
    assert after.status_code == 401
    # Logged-out logout stays 200 (idempotent).
    again = requests.post(f"{live.base_url}/api/logout", headers=headers, timeout=5)
    assert again.status_code == 200


def test_remove_account_cascades(server_factory):
    repository = Repository()
    live = server_factory(repository=repository)
    token, _ = register_and_login(live.base_url)
    headers = {"Authorization": f"Bearer {token}"}
    requests.post(f"{live.base_url}/api/my/services", json=SERVICE_FORM, headers=headers, timeout=5)
    removed = requests.delete(f"{live.base_url}/api/my/account", headers=headers, timeout=5)
    assert removed.status_code == 200
    assert repository.list_providers() == []
    assert repository.find_services() == []


def test_browse_endpoint_shapes(live_server):
    base = live_server.base_url
    everything = requests.get(f"{base}/api/browse", timeout=5).json()
    assert everything["view"] == "all"
    assert everything["types"] == [
        "CPU service",
        "Crash Simulation",
        "Earthquake Engineering",
        "Molecular Docking",
    ]
    assert sum(len(g["services"]) for g in everything["groups"]) == 12

    one_type = requests.get(f"{base}/api/browse", params={"type": "CPU service"}, timeout=5).json()
    assert one_type["view"] == "type"
    assert [g["type"] for g in one_type["groups"]] == ["CPU service"]
    names = {s["name"] for s in one_type["groups"][0]["services"]}
    assert names == {"manjra-cpu", "hydra-cpu", "quark-cpu", "condor-cpu"}
    sample = one_type["groups"][0]["services"][0]
    assert set(sample) == {"name", "address", "provider", "price", "description"}
    assert isinstance(sample["price"]["hardware"], str)

    by_provider = requests.get(
        f"{base}/api/browse", params={"provider": "Andes Research Cloud"}, timeout=5
    ).json()
    assert by_provider["view"] == "provider"
    assert sum(len(g["services"]) for g in by_provider["groups"]) == 3


def test_unknown_api_endpoint_is_404(live_server):
    response = requests.get(f"{live_server.base_url}/api/nope", timeout=5)
    assert response.status_code == 404


def test_no_assets_configured(live_server):
    root = requests.get(f"{live_server.base_url}/", timeout=5)
    assert root.status_code == 200
    assert "no portal assets" in root.text
    other = requests.get(f"{live_server.base_url}/anything", timeout=5)
    assert other.status_code == 404


def test_static_assets_and_spa_fallback(server_factory, tmp_path):
    (tmp_path / "index.html").write_text("<html>portal</html>", encoding="utf-8")
    (tmp_path / "app.js").write_text("console.log(1)", encoding="utf-8")
    live = server_factory(assets_dir=tmp_path)
    base = live.base_url

    index = requests.get(f"{base}/", timeout=5)
    assert index.status_code == 200
    assert index.headers["Content-Type"].startswith("text/html")
    assert index.text == "<html>portal</html>"

    script = requests.get(f"{base}/app.js", timeout=5)
    assert script.status_code == 200
    assert "javascript" in script.headers["Content-Type"]

    # Client-side routes resolve to the shell; missing files do not.
    assert requests.get(f"{base}/providers/wwg", timeout=5).text == "<html>portal</html>"
    assert requests.get(f"{base}/missing.css", timeout=5).status_code == 404


def test_asset_traversal_is_rejected(server_factory, tmp_path):
    assets = tmp_path / "assets"
    assets.mkdir()
    (assets / "index.html").write_text("ok", encoding="utf-8")
    (tmp_path / "secret.txt").write_text("keep out", encoding="utf-8")
    live = server_factory(assets_dir=assets)
    response = requests.get(f"{live.base_url}/../secret.txt", timeout=5)
    assert response.status_code in (400, 404)
    escaped = requests.get(f"{live.base_url}/%2e%2e/secret.txt", timeout=5)
    assert escaped.status_code == 404
    assert "keep out" not in escaped.text


def test_server_handles_fixture_seeded_repository(server_factory):
    repository = Repository()
    seed_repository(repository)
    live = server_factory(repository=repository)
    xml = encode_query(QueryMessage())
    response = requests.post(f"{live.base_url}/gqws", data=xml.encode(), timeout=5)
    assert len(decode_response(response.text).services) == 12


def test_keep_alive_connection_survives_unread_bodies(server_factory):
    # Handlers that ignore their request body (logout, 404 fallbacks) must
    # still drain it, or the leftover bytes corrupt the next request on the
    # same connection.
    live = server_factory()
    with requests.Session() as http:
        register = http.post(f"{live.base_url}/api/providers", json=REGISTRATION, timeout=5)
        assert register.status_code == 201
        login = http.post(
            f"{live.base_url}/api/login",
            json={"login_name": "wwg", "password": "wwg-pass"},
            timeout=5,
        )
        token = login.json()["token"]
        headers = {"Authorization": f"Bearer {token}"}

        missing = http.post(f"{live.base_url}/api/unknown", json={"x": 1}, timeout=5)
        assert missing.status_code == 404

        out = http.post(f"{live.base_url}/api/logout", json={}, headers=headers, timeout=5)
        assert out.status_code == 200

        for _ in range(3):
            follow_up = http.get(f"{live.base_url}/api/browse", timeout=5)
            assert follow_up.status_code == 200
            assert follow_up.json()["view"] == "all"
