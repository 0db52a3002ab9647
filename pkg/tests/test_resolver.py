"""Recursive document resolution: dedup, cycles, budgets, distribution."""

import json
import socket
import threading
from pathlib import Path

import pytest

from cfs.resolver import (
    CycleDetectedError,
    DepthExceededError,
    DocumentBudgetExceededError,
    FetchFailedError,
    ParseFailedError,
    Resolver,
    ResolverConfig,
)
from cfs.schema import ScenarioUri, parse_scenario

LOCAL = ResolverConfig(allow_local_files=True)


def _write_doc(directory: Path, name: str, links=(), title=None) -> Path:
    """A minimal valid scenario; ``links`` are (uri, quantity|None) pairs."""
    items = [
        {
            "type": "component",
            "quantity": "1",
            "quantity_unit": "kWh",
            "source": {
                "name": "Grid",
                "type": "electricity",
                "emissions": {"co2e": {"value": "0.4", "unit": "kg", "base unit": "kWh"}},
            },
        }
    ]
    for uri, quantity in links:
        item = {"type": "link", "uri": uri}
        if quantity is not None:
            item["quantity"] = str(quantity)
        items.append(item)
    doc = {"title": title or name, "scopes": [{"level": "Scope 1", "list": items}]}
    path = directory / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def _file_uri(path: Path) -> ScenarioUri:
    return ScenarioUri(path.resolve().as_uri())


def test_linkless_document_is_depth_zero(fixtures_dir):
    tree = Resolver(LOCAL).resolve(_file_uri(fixtures_dir / "mobility.json"))
    assert tree.children == {}
    assert tree.scenario.title == "Mobility"
    assert tree.fetch_meta.source == "file"
    assert tree.fetch_meta.size > 0


def test_two_host_distribution(host_factory, tmp_path):
    """Master on host A links a scenario hosted on B."""
    dir_a, dir_b = tmp_path / "a", tmp_path / "b"
    dir_a.mkdir(), dir_b.mkdir()
    _write_doc(dir_b, "leaf.json")
    host_b = host_factory(dir_b)
    _write_doc(dir_a, "master.json", links=[(host_b.url("leaf"), None)])
    host_a = host_factory(dir_a)

    tree = Resolver().resolve(host_a.url("master"))
    assert len(tree.children) == 1
    (child,) = tree.children.values()
    assert child.scenario.title == "leaf.json"
    assert child.children == {}
    assert tree.fetch_meta.source == "network"
    assert child.fetch_meta.source == "network"
    child_uri = next(iter(tree.children))
    assert f":{host_b.port}/" in child_uri.value  # fetched from the other host


def test_relative_links_resolve_against_document(host_factory, tmp_path):
    _write_doc(tmp_path, "root.json", links=[("./leaf.json", None)])
    _write_doc(tmp_path, "leaf.json")
    host = host_factory(tmp_path)
    tree = Resolver().resolve(host.url("root"))
    child_uri = next(iter(tree.children))
    assert child_uri == ScenarioUri(host.url("leaf.json"))
    assert tree.children[child_uri].scenario.title == "leaf.json"


def test_cycle_detected_with_path(fixtures_dir):
    uri_a = _file_uri(fixtures_dir / "cycle-a.json")
    uri_b = _file_uri(fixtures_dir / "cycle-b.json")
    with pytest.raises(CycleDetectedError) as excinfo:
        Resolver(LOCAL).resolve(uri_a)
    assert excinfo.value.path == [uri_a, uri_b, uri_a]


def test_self_link_is_a_cycle(tmp_path):
    _write_doc(tmp_path, "self.json", links=[("./self.json", None)])
    uri = _file_uri(tmp_path / "self.json")
    with pytest.raises(CycleDetectedError) as excinfo:
        Resolver(LOCAL).resolve(uri)
    assert excinfo.value.path == [uri, uri]


def test_duplicate_links_fetch_once(host_factory, tmp_path):
    _write_doc(tmp_path, "leaf.json")
    _write_doc(
        tmp_path, "root.json", links=[("./leaf.json", 1), ("./leaf.json", 2)]
    )
    host = host_factory(tmp_path)
    tree = Resolver(ResolverConfig(cache_ttl=0)).resolve(host.url("root"))
    assert len(tree.children) == 1
    leaf_fetches = [p for p in host.requests if p == "/scenarios/leaf.json"]
    assert len(leaf_fetches) == 1


def test_diamond_is_shared_not_cyclic(host_factory, tmp_path):
    _write_doc(tmp_path, "d.json")
    _write_doc(tmp_path, "b.json", links=[("./d.json", None)])
    _write_doc(tmp_path, "c.json", links=[("./d.json", None)])
    _write_doc(tmp_path, "a.json", links=[("./b.json", None), ("./c.json", None)])
    host = host_factory(tmp_path)
    tree = Resolver(ResolverConfig(cache_ttl=0)).resolve(host.url("a"))
    b_tree, c_tree = tree.children.values()
    assert len(b_tree.children) == 1 and len(c_tree.children) == 1
    d_fetches = [p for p in host.requests if p == "/scenarios/d.json"]
    assert len(d_fetches) == 1  # fetched once, appears under both referrers
    d_under_b = next(iter(b_tree.children.values()))
    d_under_c = next(iter(c_tree.children.values()))
    assert d_under_b.scenario == d_under_c.scenario


def test_depth_limit(tmp_path):
    _write_doc(tmp_path, "c2.json")
    _write_doc(tmp_path, "c1.json", links=[("./c2.json", None)])
    _write_doc(tmp_path, "c0.json", links=[("./c1.json", None)])
    uri = _file_uri(tmp_path / "c0.json")
    config = ResolverConfig(max_depth=1, allow_local_files=True)
    with pytest.raises(DepthExceededError):
        Resolver(config).resolve(uri)
    deep_enough = ResolverConfig(max_depth=2, allow_local_files=True)
    assert Resolver(deep_enough).resolve(uri).children


def test_document_budget(tmp_path):
    for i in range(4):
        links = [(f"./c{i + 1}.json", None)] if i < 3 else []
        _write_doc(tmp_path, f"c{i}.json", links=links)
    config = ResolverConfig(max_documents=2, allow_local_files=True)
    with pytest.raises(DocumentBudgetExceededError):
        Resolver(config).resolve(_file_uri(tmp_path / "c0.json"))


def test_local_files_require_opt_in(fixtures_dir):
    uri = _file_uri(fixtures_dir / "mobility.json")
    with pytest.raises(FetchFailedError) as excinfo:
        Resolver().resolve(uri)
    assert "disabled" in str(excinfo.value)


def test_missing_file(tmp_path):
    with pytest.raises(FetchFailedError):
        Resolver(LOCAL).resolve(_file_uri(tmp_path / "absent.json"))


def test_http_404(fixture_host):
    with pytest.raises(FetchFailedError) as excinfo:
        Resolver().resolve(fixture_host.url("no-such-scenario"))
    assert "404" in str(excinfo.value)


def test_unsupported_scheme():
    with pytest.raises(FetchFailedError):
        Resolver().resolve(ScenarioUri("ftp://example.org/x.json"))
    with pytest.raises(FetchFailedError):
        Resolver().resolve(ScenarioUri("./relative.json"))


def test_invalid_document_reports_violations(host_factory, tmp_path):
    (tmp_path / "broken.json").write_text('{"title": "X", "scopes": []}')
    host = host_factory(tmp_path)
    with pytest.raises(ParseFailedError) as excinfo:
        Resolver().resolve(host.url("broken"))
    assert any(v.path == "$.scopes" for v in excinfo.value.violations)


def test_fetch_timeout():
    listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    listener.bind(("127.0.0.1", 0))
    listener.listen(1)
    port = listener.getsockname()[1]
    accepted = []

    def accept_and_stall():
        try:
            conn, _ = listener.accept()
            accepted.append(conn)  # accept, then never answer
        except OSError:
            pass

    thread = threading.Thread(target=accept_and_stall, daemon=True)
    thread.start()
    config = ResolverConfig(timeout_per_fetch=0.2)
    try:
        with pytest.raises(FetchFailedError) as excinfo:
            Resolver(config).resolve(f"http://127.0.0.1:{port}/scenarios/slow")
        assert excinfo.value.timeout is True
    finally:
        for conn in accepted:
            conn.close()
        listener.close()


def test_cache_serves_repeat_resolves(host_factory, tmp_path):
    _write_doc(tmp_path, "doc.json")
    host = host_factory(tmp_path)
    resolver = Resolver()
    first = resolver.resolve(host.url("doc"))
    second = resolver.resolve(host.url("doc"))
    assert first.scenario == second.scenario
    assert second.fetch_meta.source == "cache"
    assert len([p for p in host.requests if p == "/scenarios/doc"]) == 1


def test_cache_disabled(host_factory, tmp_path):
    _write_doc(tmp_path, "doc.json")
    host = host_factory(tmp_path)
    resolver = Resolver(ResolverConfig(cache_ttl=0))
    resolver.resolve(host.url("doc"))
    resolver.resolve(host.url("doc"))
    assert len([p for p in host.requests if p == "/scenarios/doc"]) == 2


def test_resolution_is_deterministic(host_factory, tmp_path):
    _write_doc(tmp_path, "leaf.json")
    _write_doc(tmp_path, "root.json", links=[("./leaf.json", 2)])
    host = host_factory(tmp_path)
    resolver = Resolver()

    def shape(tree):
        return (
            tree.scenario,
            {uri: shape(child) for uri, child in tree.children.items()},
        )

    assert shape(resolver.resolve(host.url("root"))) == shape(
        resolver.resolve(host.url("root"))
    )


# ---------------------------------------------------------------------------
# resolve_inline


def test_inline_linkless(mobility_text):
    scenario = parse_scenario(mobility_text, "https://example.org/mobility.json")
    tree = Resolver().resolve_inline(scenario)
    assert tree.children == {}
    assert tree.fetch_meta.source == "inline"
    assert tree.fetch_meta.size > 0


def test_inline_matches_resolve_below_root(host_factory, tmp_path):
    _write_doc(tmp_path, "leaf.json")
    _write_doc(tmp_path, "root.json", links=[("./leaf.json", None)])
    host = host_factory(tmp_path)
    resolver = Resolver()
    fetched = resolver.resolve(host.url("root"))
    inline = resolver.resolve_inline(
        fetched.scenario, base=ScenarioUri(host.url("root"))
    )
    assert inline.children.keys() == fetched.children.keys()
    (a,), (b,) = inline.children.values(), fetched.children.values()
    assert a.scenario == b.scenario


def test_inline_relative_base(host_factory, tmp_path):
    _write_doc(tmp_path, "leaf.json")
    host = host_factory(tmp_path)
    inline_doc = json.dumps(
        {
            "title": "Inline",
            "scopes": [{"level": "Scope 1", "list": [{"type": "link", "uri": "./leaf.json"}]}],
        }
    )
    scenario = parse_scenario(inline_doc, "inline:data")
    tree = Resolver().resolve_inline(scenario, base=host.url("root"))
    assert next(iter(tree.children)) == ScenarioUri(host.url("leaf.json"))


def test_config_validation():
    with pytest.raises(Exception):
        ResolverConfig(max_depth=0)
    with pytest.raises(Exception):
        ResolverConfig(timeout_per_fetch=0)
    with pytest.raises(Exception):
        ResolverConfig(max_documents=0)
