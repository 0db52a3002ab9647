"""Emission computation: per-element and per-scope aggregation, common
emission-type detection, what-if edits, and benchmarking.

All amounts are reduced to kilograms through the unit registry.  For a
component the chain runs quantity -> (optional consumer consumption) ->
emission factor -> kg; for a link the linked scenario's grand total is
scaled by the link quantity and folds into the enclosing scope.  The
"common ground" is the set of emission keys reported by every leaf
component in the closure: only those totals are complete, everything
else is kept but flagged.

Everything here is a pure function over immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import Decimal
from typing import Any, Mapping, Union

from cfs.errors import CfsError
from cfs.resolver import ResolvedScenario
from cfs.schema import (
    Component,
    Consumer,
    Link,
    Scenario,
    ScenarioUri,
    ScopeLevel,
    SchemaViolationError,
    Source,
    canonical_emission_key,
    check_correspondence,
    validate,
)
from cfs.units import DEFAULT_REGISTRY, IncompatibleDimensionsError, UnitRegistry

__all__ = [
    "BenchmarkFailure",
    "BenchmarkResult",
    "ComputationFailedError",
    "CorrespondenceBrokenError",
    "EditCommand",
    "ElementResult",
    "EmissionAmount",
    "EmissionReport",
    "InsufficientScenariosError",
    "InvalidQuantityError",
    "NoCommonKeysError",
    "PathNotFoundError",
    "ReplaceConsumer",
    "ReplaceSource",
    "SetLinkQuantity",
    "SetQuantity",
    "UnitChainBrokenError",
    "apply_edit",
    "benchmark",
    "compute",
    "compute_component",
]

CANONICAL_MASS_UNIT = "kg"


class UnitChainBrokenError(CfsError):
    """One hop of the quantity->consumption->factor->kg chain failed."""

    def __init__(self, stage: str, from_unit: str, to_unit: str):
        self.stage = stage
        self.from_unit = from_unit
        self.to_unit = to_unit
        super().__init__(f"unit chain broken at {stage}: {from_unit!r} -> {to_unit!r}")


class ComputationFailedError(CfsError):
    def __init__(self, path: tuple[int, ...], cause: Exception):
        self.path = path
        self.cause = cause
        super().__init__(f"element {list(path)}: {cause}")


class PathNotFoundError(CfsError):
    pass


class CorrespondenceBrokenError(CfsError):
    pass


class InvalidQuantityError(CfsError):
    pass


class InsufficientScenariosError(CfsError):
    pass


class NoCommonKeysError(CfsError):
    """Benchmark comparison impossible; per-scenario reports are attached."""

    def __init__(self, reports: tuple["EmissionReport", ...]):
        self.reports = reports
        key_sets = "; ".join(
            f"{r.scenario_uri}: {{{', '.join(sorted(r.grand_total))}}}" for r in reports
        )
        super().__init__(f"scenarios share no emission key ({key_sets})")


@dataclass(frozen=True)
class EmissionAmount:
    key: str  # canonical emission key
    mass: Decimal  # kilograms


@dataclass(frozen=True)
class ElementResult:
    """Computed contribution of one scope item.

    ``path`` positions the element: scope index, item index, repeating
    into linked scenarios.  ``children`` is non-empty only for links and
    holds the linked scenario's own elements (unscaled, in the child's
    frame); the link's ``per_key`` already applies the link quantity.
    """

    path: tuple[int, ...]
    kind: str  # "component" | "link"
    label: str
    per_key: Mapping[str, EmissionAmount]
    children: tuple["ElementResult", ...] = ()


@dataclass(frozen=True)
class EmissionReport:
    scenario_uri: ScenarioUri
    title: str
    per_scope: Mapping[ScopeLevel, Mapping[str, EmissionAmount]]
    grand_total: Mapping[str, EmissionAmount]
    common_keys: frozenset[str]
    elements: tuple[ElementResult, ...]
    warnings: tuple[str, ...]

    def to_json_obj(self) -> dict[str, Any]:
        """Stable JSON shape consumed by the CLI, the HTTP API, and the
        web UI (amounts are kg as decimal strings)."""
        return {
            "scenario_uri": str(self.scenario_uri),
            "title": self.title,
            "per_scope": {
                level.value: _amounts_obj(totals) for level, totals in self.per_scope.items()
            },
            "grand_total": _amounts_obj(self.grand_total),
            "common_keys": sorted(self.common_keys),
            "elements": [_element_obj(e) for e in self.elements],
            "warnings": list(self.warnings),
        }


def _clean(value: Decimal) -> Decimal:
    """Drop insignificant trailing zeros from a computed amount."""
    normalized = value.normalize()
    if normalized.as_tuple().exponent > 0:
        normalized = normalized.quantize(Decimal(1))
    return normalized


def _amounts_obj(per_key: Mapping[str, EmissionAmount]) -> dict[str, str]:
    return {key: str(_clean(per_key[key].mass)) for key in sorted(per_key)}


def _element_obj(element: ElementResult) -> dict[str, Any]:
    return {
        "path": list(element.path),
        "kind": element.kind,
        "label": element.label,
        "per_key": _amounts_obj(element.per_key),
        "children": [_element_obj(c) for c in element.children],
    }


# ---------------------------------------------------------------------------
# Component arithmetic


def _convert(
    value: Decimal, from_unit: str, to_unit: str, stage: str, registry: UnitRegistry
) -> Decimal:
    try:
        return registry.convert(value, from_unit, to_unit)
    except IncompatibleDimensionsError as exc:
        raise UnitChainBrokenError(stage, from_unit, to_unit) from exc


def compute_component(
    component: Component, registry: UnitRegistry = DEFAULT_REGISTRY
) -> dict[str, Decimal]:
    """Kilograms emitted per canonical emission key for one component.

    With a consumer the activity quantity first becomes an energy amount
    through the consumption matching the source's energy type; without
    one the quantity feeds the emission factors directly.
    """
    source = component.source
    if component.consumer is not None:
        consumption = component.consumer.consumptions.get(source.energy_type)
        if consumption is None:
            raise CorrespondenceBrokenError(
                f"consumer {component.consumer.name!r} has no consumption for "
                f"energy type {source.energy_type!r}"
            )
        base_quantity = _convert(
            component.quantity,
            component.quantity_unit,
            consumption.base_unit,
            "quantity->consumption-base",
            registry,
        )
        energy = base_quantity * consumption.value  # in consumption.unit
        energy_unit = consumption.unit
        stage_to_factor = "consumption->factor-base"
    else:
        energy = component.quantity
        energy_unit = component.quantity_unit
        stage_to_factor = "quantity->factor-base"

    totals: dict[str, Decimal] = {}
    for key, factor in source.emissions.items():
        amount = (
            _convert(energy, energy_unit, factor.base_unit, stage_to_factor, registry)
            * factor.value
        )
        mass = _convert(amount, factor.unit, CANONICAL_MASS_UNIT, "factor-unit->kg", registry)
        canonical = canonical_emission_key(key)
        totals[canonical] = totals.get(canonical, Decimal(0)) + mass
    return totals


# ---------------------------------------------------------------------------
# Tree aggregation


def compute(tree: ResolvedScenario, registry: UnitRegistry = DEFAULT_REGISTRY) -> EmissionReport:
    """Aggregate a resolved tree per element and per scope.

    Computation is all-or-nothing: the first failing element aborts with
    its path, so a report never carries silently partial sums.  Keys
    missing from some leaf are still totalled but excluded from
    ``common_keys`` and called out in ``warnings``.
    """
    leaves: list[tuple[tuple[int, ...], str, frozenset[str]]] = []
    per_scope: dict[ScopeLevel, dict[str, Decimal]] = {}
    elements: list[ElementResult] = []
    for si, scope in enumerate(tree.scenario.scopes):
        totals = per_scope.setdefault(scope.level, {})
        for ii, item in enumerate(scope.items):
            element = _element(tree, item, (si, ii), registry, leaves)
            elements.append(element)
            for key, amount in element.per_key.items():
                totals[key] = totals.get(key, Decimal(0)) + amount.mass

    grand: dict[str, Decimal] = {}
    for totals in per_scope.values():
        for key, mass in totals.items():
            grand[key] = grand.get(key, Decimal(0)) + mass

    common: frozenset[str] = (
        frozenset.intersection(*(keys for _, _, keys in leaves)) if leaves else frozenset()
    )
    warnings = []
    for key in sorted(set(grand) - common):
        for path, label, keys in leaves:
            if key not in keys:
                warnings.append(
                    f"total for '{key}' is partial: element {list(path)} ({label}) "
                    f"reports no '{key}'"
                )

    return EmissionReport(
        scenario_uri=tree.scenario.uri,
        title=tree.scenario.title,
        per_scope={level: _wrap(totals) for level, totals in per_scope.items()},
        grand_total=_wrap(grand),
        common_keys=common,
        elements=tuple(elements),
        warnings=tuple(warnings),
    )


def _wrap(totals: Mapping[str, Decimal]) -> dict[str, EmissionAmount]:
    return {key: EmissionAmount(key, mass) for key, mass in totals.items()}


def _element(
    tree: ResolvedScenario,
    item: Component | Link,
    path: tuple[int, ...],
    registry: UnitRegistry,
    leaves: list,
) -> ElementResult:
    if isinstance(item, Component):
        try:
            totals = compute_component(item, registry)
        except (UnitChainBrokenError, CorrespondenceBrokenError) as exc:
            raise ComputationFailedError(path, exc) from exc
        label = item.consumer.name if item.consumer is not None else item.source.name
        leaves.append((path, label, frozenset(totals)))
        return ElementResult(path, "component", label, _wrap(totals))

    try:
        child = tree.child_for(item)
    except KeyError as exc:  # resolver guarantees presence; defensive
        raise ComputationFailedError(path, CfsError(f"unresolved link {item.uri}")) from exc
    child_elements = []
    child_grand: dict[str, Decimal] = {}
    for csi, cscope in enumerate(child.scenario.scopes):
        for cii, citem in enumerate(cscope.items):
            element = _element(child, citem, (*path, csi, cii), registry, leaves)
            child_elements.append(element)
            for key, amount in element.per_key.items():
                child_grand[key] = child_grand.get(key, Decimal(0)) + amount.mass
    quantity = item.effective_quantity
    scaled = {key: mass * quantity for key, mass in child_grand.items()}
    return ElementResult(
        path, "link", child.scenario.title, _wrap(scaled), tuple(child_elements)
    )


# ---------------------------------------------------------------------------
# What-if edits


@dataclass(frozen=True)
class SetQuantity:
    path: tuple[int, int]
    quantity: Decimal


@dataclass(frozen=True)
class ReplaceSource:
    path: tuple[int, int]
    source: Source


@dataclass(frozen=True)
class ReplaceConsumer:
    path: tuple[int, int]
    consumer: Consumer | None


@dataclass(frozen=True)
class SetLinkQuantity:
    path: tuple[int, int]
    quantity: Decimal


EditCommand = Union[SetQuantity, ReplaceSource, ReplaceConsumer, SetLinkQuantity]


def _require_positive(quantity: Decimal) -> Decimal:
    if not isinstance(quantity, Decimal):
        quantity = Decimal(str(quantity))
    if not quantity.is_finite() or quantity <= 0:
        raise InvalidQuantityError(f"quantity must be positive and finite, got {quantity}")
    return quantity


def apply_edit(scenario: Scenario, command: EditCommand) -> Scenario:
    """Return a new scenario differing only at the addressed element.

    Edits address the root document only; editing a linked scenario means
    editing its own document.  The result still satisfies every schema
    invariant, or the edit is rejected.
    """
    path = tuple(command.path)
    if len(path) != 2:
        raise PathNotFoundError(f"edit path must be (scope, item), got {list(path)}")
    si, ii = path
    if not 0 <= si < len(scenario.scopes):
        raise PathNotFoundError(f"no scope at index {si}")
    scope = scenario.scopes[si]
    if not 0 <= ii < len(scope.items):
        raise PathNotFoundError(f"no item at index {ii} in scope {si}")
    item = scope.items[ii]

    if isinstance(command, SetQuantity):
        if not isinstance(item, Component):
            raise PathNotFoundError(f"element {list(path)} is not a component")
        new_item: Component | Link = replace(item, quantity=_require_positive(command.quantity))
    elif isinstance(command, SetLinkQuantity):
        if not isinstance(item, Link):
            raise PathNotFoundError(f"element {list(path)} is not a link")
        new_item = replace(item, quantity=_require_positive(command.quantity))
    elif isinstance(command, ReplaceSource):
        if not isinstance(item, Component):
            raise PathNotFoundError(f"element {list(path)} is not a component")
        new_item = replace(item, source=command.source)
        if not check_correspondence(new_item):
            raise CorrespondenceBrokenError(
                f"source type {command.source.energy_type!r} has no matching consumption"
            )
    elif isinstance(command, ReplaceConsumer):
        if not isinstance(item, Component):
            raise PathNotFoundError(f"element {list(path)} is not a component")
        new_item = replace(item, consumer=command.consumer)
        if not check_correspondence(new_item):
            assert command.consumer is not None
            raise CorrespondenceBrokenError(
                f"consumer {command.consumer.name!r} has no consumption for "
                f"{item.source.energy_type!r}"
            )
    else:
        raise PathNotFoundError(f"unknown edit command {type(command).__name__}")

    items = tuple(new_item if k == ii else existing for k, existing in enumerate(scope.items))
    scopes = tuple(
        replace(scope, items=items) if k == si else existing
        for k, existing in enumerate(scenario.scopes)
    )
    edited = replace(scenario, scopes=scopes)
    errors = [v for v in validate(edited) if v.severity == "error"]
    if errors:
        raise SchemaViolationError(errors)
    return edited


# ---------------------------------------------------------------------------
# Benchmarking


@dataclass(frozen=True)
class BenchmarkFailure:
    index: int
    uri: str
    error: str


@dataclass(frozen=True)
class BenchmarkResult:
    """Reports in input order plus a comparison restricted to the keys
    every scenario has complete; ratios are relative to the first."""

    reports: tuple[EmissionReport, ...]
    common_keys: frozenset[str]
    table: Mapping[str, tuple[Decimal, ...]]
    ratios: Mapping[str, tuple[Decimal, ...]]
    failures: tuple[BenchmarkFailure, ...] = ()

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "scenarios": [r.to_json_obj() for r in self.reports],
            "common_keys": sorted(self.common_keys),
            "table": {
                key: [str(_clean(m)) for m in self.table[key]] for key in sorted(self.table)
            },
            "ratios": {
                key: [str(_clean(r)) for r in self.ratios[key]] for key in sorted(self.ratios)
            },
            "failures": [
                {"index": f.index, "uri": f.uri, "error": f.error} for f in self.failures
            ],
        }


def benchmark(
    trees: list[ResolvedScenario], registry: UnitRegistry = DEFAULT_REGISTRY
) -> BenchmarkResult:
    """Compare two or more resolved scenarios.

    A scenario whose computation fails is excluded (and reported) as long
    as at least two others remain; otherwise the failure propagates.
    """
    if len(trees) < 2:
        raise InsufficientScenariosError(
            f"benchmark needs at least 2 scenarios, got {len(trees)}"
        )
    reports: list[EmissionReport] = []
    failures: list[BenchmarkFailure] = []
    errors: list[Exception] = []
    for index, tree in enumerate(trees):
        try:
            reports.append(compute(tree, registry))
        except ComputationFailedError as exc:
            failures.append(BenchmarkFailure(index, str(tree.scenario.uri), str(exc)))
            errors.append(exc)
    if len(reports) < 2:
        if errors:
            raise errors[0]
        raise InsufficientScenariosError("fewer than 2 scenarios computed successfully")

    common = frozenset.intersection(*(r.common_keys for r in reports))
    report_tuple = tuple(reports)
    if not common:
        raise NoCommonKeysError(report_tuple)

    table: dict[str, tuple[Decimal, ...]] = {}
    ratios: dict[str, tuple[Decimal, ...]] = {}
    for key in sorted(common):
        masses = tuple(r.grand_total[key].mass for r in reports)
        table[key] = masses
        baseline = masses[0]
        if baseline == 0:
            raise CfsError(f"baseline scenario reports zero '{key}'; ratios undefined")
        ratios[key] = tuple(m / baseline for m in masses)
    return BenchmarkResult(
        reports=report_tuple,
        common_keys=common,
        table=table,
        ratios=ratios,
        failures=tuple(failures),
    )
