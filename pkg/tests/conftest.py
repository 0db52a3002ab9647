"""Shared fixtures: the bundled document corpus and throwaway HTTP hosts."""

from __future__ import annotations

import threading
from pathlib import Path

import pytest

from cfs.server import ServerConfig, build_server

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

SCENARIO_FIXTURES = [
    "mobility.json",
    "mobility-2x.json",
    "streaming.json",
    "datacenter.json",
    "transmission.json",
    "cycle-a.json",
    "cycle-b.json",
    "common-ground.json",
    "disjoint-co2.json",
    "disjoint-ch4.json",
]


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture()
def mobility_text() -> str:
    return (FIXTURES / "mobility.json").read_text(encoding="utf-8")


class ScenarioHost:
    """A live service instance hosting a directory of scenario documents.

    Requests are recorded so tests can assert fetch counts.
    """

    def __init__(self, directory: Path):
        self.httpd = build_server(
            ServerConfig(host="127.0.0.1", port=0, scenario_dir=directory)
        )
        self.port = self.httpd.server_address[1]
        self.requests: list[str] = []
        handler = self.httpd.RequestHandlerClass
        original_do_get = handler.do_GET
        recorded = self.requests

        def counting_do_get(handler_self):
            recorded.append(handler_self.path)
            original_do_get(handler_self)

        handler.do_GET = counting_do_get
        handler.log_message = lambda *args, **kwargs: None  # keep test output quiet
        self.thread = threading.Thread(
            target=lambda: self.httpd.serve_forever(poll_interval=0.05), daemon=True
        )
        self.thread.start()

    @property
    def base(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def url(self, identifier: str) -> str:
        return f"{self.base}/scenarios/{identifier}"

    def close(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture()
def host_factory():
    hosts: list[ScenarioHost] = []

    def make(directory: Path | str) -> ScenarioHost:
        host = ScenarioHost(Path(directory))
        hosts.append(host)
        return host

    yield make
    for host in hosts:
        host.close()


@pytest.fixture(scope="session")
def fixture_host() -> ScenarioHost:
    host = ScenarioHost(FIXTURES)
    yield host
    host.close()
