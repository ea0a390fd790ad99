"""Shared fixtures: fast password digests, a seeded repository built from
the shipping fixture file, and live servers bound to ephemeral ports."""

from __future__ import annotations

import json
import threading
from pathlib import Path

import pytest

from gmd.model import validate_service
from gmd.portal import DigestParams, hash_password
from gmd.repository import Repository, provider_from_json
from gmd.server import GmdApp, GmdServer

ROOT = Path(__file__).resolve().parent.parent
FIXTURE_PATH = ROOT / "fixtures" / "sc2002-vo.json"
CORPUS_DIR = ROOT / "protocol" / "corpus"

# One line per acceptance criterion, shown after the test summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

# Low-cost scrypt parameters; production defaults are too slow for
# thousand-step test loops.
FAST_DIGEST = DigestParams(n=2**8, r=8, p=1)


def load_fixture_doc() -> dict:
    return json.loads(FIXTURE_PATH.read_text(encoding="utf-8"))


def seed_repository(repository: Repository) -> dict[str, str]:
    """Load the shipping fixture straight into a repository (no HTTP).

    Returns login_name -> plaintext password for the seeded accounts.
    """
    doc = load_fixture_doc()
    passwords: dict[str, str] = {}
    for entry in doc["providers"]:
        passwords[entry["login_name"]] = entry["password"]
        shape = {k: v for k, v in entry.items() if k != "password"}
        shape["password_digest"] = hash_password(entry["password"], FAST_DIGEST)
        repository.add_provider(provider_from_json(shape))
    for entry in doc["services"]:
        repository.upsert_service(validate_service(entry))
    return passwords


@pytest.fixture
def repo() -> Repository:
    return Repository()


@pytest.fixture
def seeded_repo() -> Repository:
    repository = Repository()
    seed_repository(repository)
    return repository


class LiveServer:
    """A running GmdServer plus the things tests need to talk to it."""

    def __init__(self, app: GmdApp):
        self.app = app
        self.server = GmdServer(app, host="127.0.0.1", port=0)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()
        self.base_url = f"http://127.0.0.1:{self.server.port}"

    def stop(self) -> None:
        self.server.shutdown()
        self.server.server_close()
        self.thread.join(timeout=5)


@pytest.fixture
def server_factory():
    """Build live servers with arbitrary app wiring; all stopped on teardown."""
    running: list[LiveServer] = []

    def start(
        repository: Repository | None = None,
        session_ttl_seconds: float = 1800.0,
        assets_dir=None,
        now=None,
    ) -> LiveServer:
        kwargs = {"session_ttl_seconds": session_ttl_seconds, "assets_dir": assets_dir,
                  "digest_params": FAST_DIGEST}
        if now is not None:
            kwargs["now"] = now
        app = GmdApp(repository if repository is not None else Repository(), **kwargs)
        live = LiveServer(app)
        running.append(live)
        return live

    yield start
    for live in running:
        live.stop()


@pytest.fixture
def live_server(server_factory, seeded_repo) -> LiveServer:
    """A running server preloaded with the shipping fixture."""
    return server_factory(repository=seeded_repo)
