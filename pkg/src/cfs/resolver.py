"""Recursive retrieval of scenario documents across distributed hosts.

Documents link to each other by URI and may live on different servers;
resolution walks the link closure, parsing and validating every document,
deduplicating fetches, and refusing cycles.  Diamonds are fine (a shared
target is fetched once and its subtree appears under every referrer);
only repetition along a single root-to-leaf path is a cycle, because a
cyclic scenario has no well-defined total.
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Mapping
from urllib.parse import urlsplit
from urllib.request import url2pathname

import requests

from cfs.errors import CfsError
from cfs.schema import (
    JsonSyntaxError,
    Link,
    Scenario,
    ScenarioUri,
    SchemaViolationError,
    Violation,
    canonical_json,
    parse_scenario,
)
from cfs.units import DEFAULT_REGISTRY, UnitRegistry

__all__ = [
    "CycleDetectedError",
    "DepthExceededError",
    "DocumentBudgetExceededError",
    "FetchFailedError",
    "FetchMeta",
    "ParseFailedError",
    "ResolvedScenario",
    "Resolver",
    "ResolverConfig",
    "resolve",
    "resolve_inline",
]

_MAX_FANOUT = 8  # simultaneous fetches per resolve call; be polite to small hosts

log = logging.getLogger("cfs.resolver")


class FetchFailedError(CfsError):
    def __init__(self, uri: ScenarioUri, cause: str, *, timeout: bool = False):
        self.uri = uri
        self.cause = cause
        self.timeout = timeout
        super().__init__(f"failed to fetch {uri}: {cause}")


class ParseFailedError(CfsError):
    def __init__(self, uri: ScenarioUri, violations: list[Violation], message: str):
        self.uri = uri
        self.violations = violations
        super().__init__(f"failed to parse {uri}: {message}")


class CycleDetectedError(CfsError):
    def __init__(self, path: list[ScenarioUri]):
        self.path = path
        chain = " -> ".join(str(u) for u in path)
        super().__init__(f"cycle: {chain}")


class DepthExceededError(CfsError):
    def __init__(self, max_depth: int, uri: ScenarioUri):
        self.max_depth = max_depth
        self.uri = uri
        super().__init__(f"link depth exceeds {max_depth} at {uri}")


class DocumentBudgetExceededError(CfsError):
    def __init__(self, max_documents: int):
        self.max_documents = max_documents
        super().__init__(f"resolution would load more than {max_documents} documents")


@dataclass(frozen=True)
class ResolverConfig:
    max_depth: int = 16
    max_documents: int = 256
    timeout_per_fetch: float = 10.0  # seconds
    allow_local_files: bool = False
    cache_ttl: float = 300.0  # seconds; 0 disables caching

    def __post_init__(self):
        if self.max_depth < 1 or self.max_documents < 1:
            raise CfsError("resolver limits must be at least 1")
        if self.timeout_per_fetch <= 0:
            raise CfsError("fetch timeout must be positive")
        if self.cache_ttl < 0:
            raise CfsError("cache TTL must not be negative")


@dataclass(frozen=True)
class FetchMeta:
    source: str  # "network" | "file" | "cache" | "inline"
    elapsed: float
    size: int


@dataclass(frozen=True)
class ResolvedScenario:
    """One node of the resolved link-closure tree.

    ``children`` holds the direct link targets only (keyed by absolute
    URI); grandchildren nest inside.  No URI repeats along any
    root-to-leaf path.
    """

    scenario: Scenario
    children: Mapping[ScenarioUri, "ResolvedScenario"]
    fetch_meta: FetchMeta

    def child_for(self, link: Link) -> "ResolvedScenario":
        return self.children[self.scenario.uri.resolve(link.uri)]


class _Resolution:
    """Per-call state: fetch dedup via futures, document budget, executor."""

    def __init__(self, resolver: "Resolver", config: ResolverConfig, executor: ThreadPoolExecutor):
        self.resolver = resolver
        self.config = config
        self.executor = executor
        self.lock = threading.Lock()
        self.futures: dict[str, Future] = {}
        self.documents = 0

    def fetch(self, uri: ScenarioUri) -> Future:
        key = uri.normalized()
        with self.lock:
            future = self.futures.get(key)
            if future is None:
                future = self.executor.submit(self.resolver._load, self, uri)
                self.futures[key] = future
        return future


class Resolver:
    """Resolves link closures; the document cache is shared across calls
    and internally synchronized, so one instance can serve many threads."""

    def __init__(
        self,
        config: ResolverConfig | None = None,
        *,
        registry: UnitRegistry = DEFAULT_REGISTRY,
    ):
        self.config = config or ResolverConfig()
        self.registry = registry
        self._cache: dict[str, tuple[float, str]] = {}
        self._cache_lock = threading.Lock()
        self._session = requests.Session()
        self._session.max_redirects = 5
        self._session.headers["Accept"] = "application/json"

    def resolve(self, uri: ScenarioUri | str, config: ResolverConfig | None = None) -> ResolvedScenario:
        """Fetch ``uri`` and the full closure of its links.

        Each distinct URI is fetched at most once per call; sibling links
        are fetched concurrently (bounded fan-out).
        """
        if isinstance(uri, str):
            uri = ScenarioUri(uri)
        config = config or self.config
        if not uri.is_absolute:
            raise FetchFailedError(uri, "root URI must be absolute")
        with ThreadPoolExecutor(max_workers=_MAX_FANOUT, thread_name_prefix="cfs-fetch") as pool:
            state = _Resolution(self, config, pool)
            return self._build(state, uri, ())

    def resolve_inline(
        self,
        scenario: Scenario,
        base: ScenarioUri | str | None = None,
        config: ResolverConfig | None = None,
    ) -> ResolvedScenario:
        """Resolve links of a scenario that exists only in memory
        (URL-decoded or edited); relative link URIs resolve against
        ``base``, which becomes the root's URI."""
        config = config or self.config
        if base is not None:
            base_uri = ScenarioUri(base) if isinstance(base, str) else base
            scenario = replace(scenario, uri=base_uri)
        meta = FetchMeta("inline", 0.0, len(canonical_json(scenario).encode("utf-8")))
        with ThreadPoolExecutor(max_workers=_MAX_FANOUT, thread_name_prefix="cfs-fetch") as pool:
            state = _Resolution(self, config, pool)
            return self._expand(state, scenario, meta, ())

    # -- tree construction ------------------------------------------------

    def _build(
        self, state: _Resolution, uri: ScenarioUri, ancestors: tuple[ScenarioUri, ...]
    ) -> ResolvedScenario:
        if uri in ancestors:
            start = ancestors.index(uri)
            raise CycleDetectedError([*ancestors[start:], uri])
        if len(ancestors) > state.config.max_depth:
            raise DepthExceededError(state.config.max_depth, uri)
        scenario, meta = state.fetch(uri).result()
        return self._expand(state, scenario, meta, ancestors)

    def _expand(
        self,
        state: _Resolution,
        scenario: Scenario,
        meta: FetchMeta,
        ancestors: tuple[ScenarioUri, ...],
    ) -> ResolvedScenario:
        uri = scenario.uri
        targets: list[ScenarioUri] = []
        for scope in scenario.scopes:
            for item in scope.items:
                if isinstance(item, Link):
                    target = uri.resolve(item.uri)
                    if target not in targets:
                        targets.append(target)
        # Prefetch siblings; cycles resolve to ancestor URIs already in the
        # memo, so this never fetches a document the recursion would refuse.
        for target in targets:
            if target not in ancestors and target != uri:
                state.fetch(target)
        children = {
            target: self._build(state, target, (*ancestors, uri)) for target in targets
        }
        return ResolvedScenario(scenario=scenario, children=children, fetch_meta=meta)

    # -- document loading --------------------------------------------------

    def _load(self, state: _Resolution, uri: ScenarioUri) -> tuple[Scenario, FetchMeta]:
        with state.lock:
            state.documents += 1
            if state.documents > state.config.max_documents:
                raise DocumentBudgetExceededError(state.config.max_documents)
        key = uri.normalized()
        ttl = state.config.cache_ttl
        if ttl > 0:
            with self._cache_lock:
                hit = self._cache.get(key)
                if hit is not None and hit[0] > time.monotonic():
                    text = hit[1]
                    return self._parse(uri, text, FetchMeta("cache", 0.0, len(text.encode("utf-8"))))
        text, meta = self._fetch_text(state.config, uri)
        if ttl > 0:
            with self._cache_lock:
                self._cache[key] = (time.monotonic() + ttl, text)
        return self._parse(uri, text, meta)

    def _parse(self, uri: ScenarioUri, text: str, meta: FetchMeta) -> tuple[Scenario, FetchMeta]:
        try:
            scenario = parse_scenario(text, uri, registry=self.registry)
        except SchemaViolationError as exc:
            raise ParseFailedError(uri, exc.violations, str(exc)) from exc
        except JsonSyntaxError as exc:
            raise ParseFailedError(uri, [], str(exc)) from exc
        return scenario, meta

    def _fetch_text(self, config: ResolverConfig, uri: ScenarioUri) -> tuple[str, FetchMeta]:
        scheme = uri.scheme
        started = time.monotonic()
        if scheme in ("http", "https"):
            if not urlsplit(uri.value).netloc:
                raise FetchFailedError(uri, "URI has no host")
            try:
                response = self._session.get(uri.value, timeout=config.timeout_per_fetch)
            except requests.Timeout as exc:
                raise FetchFailedError(
                    uri, f"timed out after {config.timeout_per_fetch}s", timeout=True
                ) from exc
            except requests.RequestException as exc:
                raise FetchFailedError(uri, str(exc)) from exc
            if not 200 <= response.status_code < 300:
                raise FetchFailedError(uri, f"HTTP status {response.status_code}")
            content_type = response.headers.get("Content-Type", "")
            if "json" not in content_type.lower():
                log.warning("%s served Content-Type %r, expected JSON", uri, content_type)
            body = response.content
            elapsed = time.monotonic() - started
            log.debug("fetched %s: network, %d bytes, %.3fs", uri, len(body), elapsed)
            return body.decode("utf-8"), FetchMeta("network", elapsed, len(body))
        if scheme == "file":
            if not config.allow_local_files:
                raise FetchFailedError(uri, "local file access is disabled")
            path = url2pathname(urlsplit(uri.value).path)
            try:
                with open(path, "rb") as handle:
                    body = handle.read()
            except OSError as exc:
                raise FetchFailedError(uri, str(exc)) from exc
            elapsed = time.monotonic() - started
            log.debug("fetched %s: file, %d bytes, %.3fs", uri, len(body), elapsed)
            return body.decode("utf-8"), FetchMeta("file", elapsed, len(body))
        raise FetchFailedError(uri, f"unsupported scheme {scheme!r}")


def resolve(uri: ScenarioUri | str, config: ResolverConfig | None = None) -> ResolvedScenario:
    return Resolver(config).resolve(uri)


def resolve_inline(
    scenario: Scenario,
    base: ScenarioUri | str | None = None,
    config: ResolverConfig | None = None,
) -> ResolvedScenario:
    return Resolver(config).resolve_inline(scenario, base)
