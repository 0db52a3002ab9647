"""Domain model for carbon footprint scenario documents.

A scenario is a JSON document: a title plus one to three GHG-Protocol
scope blocks, each holding components (quantified emitters) and links
(by-reference inclusions of other scenarios).  This module parses,
validates, and canonically re-serializes that wire format.

Numeric fields travel as JSON strings in the reference documents
("quantity": "10000"), so all values are held as ``decimal.Decimal``
and re-emitted as strings exactly as stored.  Native JSON numbers are
accepted on input and produce equal values.

All types are immutable after construction; parsing is a pure function.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Any, Mapping, Union
from urllib.parse import urljoin, urlsplit, urlunsplit

from cfs.errors import CfsError
from cfs.units import DEFAULT_REGISTRY, Dimension, UnitRegistry

__all__ = [
    "CANONICAL_EMISSION_KEYS",
    "Component",
    "Consumer",
    "Consumption",
    "EmissionFactor",
    "JsonSyntaxError",
    "Link",
    "Scenario",
    "ScenarioUri",
    "SchemaViolationError",
    "ScopeBlock",
    "ScopeItem",
    "ScopeLevel",
    "Source",
    "UnknownEmissionKeyError",
    "Violation",
    "canonical_emission_key",
    "canonical_json",
    "check_correspondence",
    "parse_scenario",
    "serialize_scenario",
    "validate",
]

# The eight GHG-Protocol gases.  "nf33" appears in circulating documents
# as a misspelling of nf3 and is accepted as an alias.
CANONICAL_EMISSION_KEYS = frozenset(
    {"co2e", "co2", "ch4", "n2o", "hfc", "pfc", "sf6", "nf3"}
)
_EMISSION_KEY_ALIASES = {"nf33": "nf3"}


def canonical_emission_key(key: str) -> str:
    """Normalize an emission key for aggregation and common-ground checks.

    The stored document keeps the author's spelling; only comparisons and
    totals use the canonical form.
    """
    k = key.strip().lower()
    return _EMISSION_KEY_ALIASES.get(k, k)


class JsonSyntaxError(CfsError):
    """Input is not well-formed JSON."""

    def __init__(self, offset: int, message: str):
        self.offset = offset
        self.message = message
        super().__init__(f"JSON syntax error at byte {offset}: {message}")


@dataclass(frozen=True)
class Violation:
    """One broken rule, addressed by JSON path (``$.scopes[0].list[1].quantity``)."""

    path: str
    rule: str
    message: str
    severity: str = "error"  # "error" | "warning"

    def __str__(self) -> str:
        return f"{self.severity}: {self.path}: {self.message} [{self.rule}]"


class SchemaViolationError(CfsError):
    """The document parsed as JSON but breaks the scenario schema."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        head = violations[0] if violations else None
        extra = f" (+{len(violations) - 1} more)" if len(violations) > 1 else ""
        super().__init__(f"{head}{extra}" if head else "schema violation")


class UnknownEmissionKeyError(SchemaViolationError):
    """Strict mode rejected an emission key outside the canonical set."""


@dataclass(frozen=True, eq=False)
class ScenarioUri:
    """Identity of a scenario document.

    Holds the string as given (possibly relative, for link targets);
    equality and hashing lowercase the scheme and host so that
    ``HTTP://Host/x`` and ``http://host/x`` name the same document.
    """

    value: str

    def __post_init__(self):
        if not self.value or not self.value.strip():
            raise CfsError("scenario URI must be non-empty")

    @property
    def scheme(self) -> str:
        return urlsplit(self.value).scheme.lower()

    @property
    def is_absolute(self) -> bool:
        return bool(self.scheme)

    @property
    def is_local(self) -> bool:
        return self.scheme == "file"

    def normalized(self) -> str:
        parts = urlsplit(self.value)
        return urlunsplit(
            (parts.scheme.lower(), parts.netloc.lower(), parts.path, parts.query, parts.fragment)
        )

    def resolve(self, ref: "ScenarioUri | str") -> "ScenarioUri":
        """Resolve ``ref`` (possibly relative) against this URI, RFC 3986 style."""
        return ScenarioUri(urljoin(self.value, str(ref)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScenarioUri):
            return NotImplemented
        return self.normalized() == other.normalized()

    def __hash__(self) -> int:
        return hash(self.normalized())

    def __str__(self) -> str:
        return self.value


class ScopeLevel(Enum):
    SCOPE_1 = "Scope 1"
    SCOPE_2 = "Scope 2"
    SCOPE_3 = "Scope 3"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class EmissionFactor:
    """Mass of one gas emitted per base unit of the source (e.g. kg per l)."""

    value: Decimal
    unit: str
    base_unit: str
    reference_url: str | None = None
    extras: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Consumption:
    """Energy drawn per base unit of activity (e.g. l per km)."""

    value: Decimal
    unit: str
    base_unit: str
    reference_url: str | None = None
    extras: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Source:
    """An energy carrier with one or more emission factors, keyed by gas."""

    name: str
    energy_type: str  # serialized as "type"
    emissions: Mapping[str, EmissionFactor]
    description: str | None = None
    extras: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Consumer:
    """An energy-using device; consumptions are keyed by energy type."""

    name: str
    consumptions: Mapping[str, Consumption]
    description: str | None = None
    extras: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Component:
    """A quantified emitter: quantity routed through an optional consumer
    into a source's emission factors."""

    quantity: Decimal
    quantity_unit: str
    source: Source
    consumer: Consumer | None = None
    category: str | None = None
    extras: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Link:
    """By-reference inclusion of another scenario, optionally scaled."""

    uri: ScenarioUri
    quantity: Decimal | None = None
    extras: Mapping[str, Any] = field(default_factory=dict)

    @property
    def effective_quantity(self) -> Decimal:
        return self.quantity if self.quantity is not None else Decimal(1)


ScopeItem = Union[Component, Link]


@dataclass(frozen=True)
class ScopeBlock:
    level: ScopeLevel
    items: tuple[ScopeItem, ...]
    description: str | None = None
    extras: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    """Root document.

    The URI is assigned by the loader, not stored in the document body,
    so equality compares document content only: the same document parsed
    from two hosts (or decoded from a share URL) is the same scenario.
    """

    uri: ScenarioUri = field(compare=False)
    title: str
    scopes: tuple[ScopeBlock, ...]
    reference_url: str | None = None
    extras: Mapping[str, Any] = field(default_factory=dict)


def check_correspondence(component: Component) -> bool:
    """True iff the component has no consumer, or the consumer declares a
    consumption for the source's energy type."""
    if component.consumer is None:
        return True
    return component.source.energy_type in component.consumer.consumptions


# ---------------------------------------------------------------------------
# Parsing


def _reject_constant(name: str) -> None:
    raise ValueError(f"non-finite JSON constant {name!r} not allowed")


class _Builder:
    """Recursive-descent builder over decoded JSON, accumulating violations.

    Structural problems (wrong JSON types, missing required fields, bad
    discriminators, unparseable numbers) are collected here; value-level
    rules live in :func:`validate` so hand-built scenarios can be checked
    through the same code path.
    """

    def __init__(self):
        self.violations: list[Violation] = []

    def error(self, path: str, rule: str, message: str) -> None:
        self.violations.append(Violation(path, rule, message, "error"))

    def _string(self, obj: dict, key: str, path: str, required: bool) -> str | None:
        if key not in obj:
            if required:
                self.error(f"{path}.{key}", "missing-field", f"required field {key!r} is missing")
            return None
        raw = obj[key]
        if not isinstance(raw, str):
            self.error(f"{path}.{key}", "invalid-type", f"{key!r} must be a string")
            return None
        return raw

    def _decimal(self, raw: Any, path: str) -> Decimal | None:
        if isinstance(raw, bool):
            self.error(path, "invalid-type", "expected a number, got a boolean")
            return None
        if isinstance(raw, Decimal):
            return raw
        if isinstance(raw, int):
            return Decimal(raw)
        if isinstance(raw, str):
            try:
                return Decimal(raw.strip())
            except InvalidOperation:
                self.error(path, "invalid-number", f"not a decimal number: {raw!r}")
                return None
        self.error(path, "invalid-type", "expected a number or numeric string")
        return None

    def _extras(self, obj: dict, known: tuple[str, ...]) -> dict[str, Any]:
        return {k: v for k, v in obj.items() if k not in known}

    def scenario(self, doc: Any, origin: ScenarioUri) -> Scenario | None:
        path = "$"
        if not isinstance(doc, dict):
            self.error(path, "invalid-type", "scenario document must be a JSON object")
            return None
        title = self._string(doc, "title", path, required=True)
        reference_url = self._string(doc, "reference_url", path, required=False)
        scopes: tuple[ScopeBlock, ...] = ()
        if "scopes" not in doc:
            self.error("$.scopes", "missing-field", "required field 'scopes' is missing")
        elif not isinstance(doc["scopes"], list):
            self.error("$.scopes", "invalid-type", "'scopes' must be an array")
        else:
            built = [
                self.scope(raw, f"$.scopes[{i}]") for i, raw in enumerate(doc["scopes"])
            ]
            scopes = tuple(b for b in built if b is not None)
        if title is None:
            return None
        return Scenario(
            uri=origin,
            title=title,
            scopes=scopes,
            reference_url=reference_url,
            extras=self._extras(doc, ("title", "reference_url", "scopes")),
        )

    def scope(self, raw: Any, path: str) -> ScopeBlock | None:
        if not isinstance(raw, dict):
            self.error(path, "invalid-type", "scope must be a JSON object")
            return None
        level_raw = self._string(raw, "level", path, required=True)
        level: ScopeLevel | None = None
        if level_raw is not None:
            try:
                level = ScopeLevel(level_raw)
            except ValueError:
                allowed = ", ".join(repr(v.value) for v in ScopeLevel)
                self.error(
                    f"{path}.level",
                    "invalid-scope-level",
                    f"{level_raw!r} is not one of {allowed}",
                )
        description = self._string(raw, "description", path, required=False)
        items: tuple[ScopeItem, ...] = ()
        if "list" not in raw:
            self.error(f"{path}.list", "missing-field", "required field 'list' is missing")
        elif not isinstance(raw["list"], list):
            self.error(f"{path}.list", "invalid-type", "'list' must be an array")
        else:
            built = [
                self.item(entry, f"{path}.list[{i}]") for i, entry in enumerate(raw["list"])
            ]
            items = tuple(b for b in built if b is not None)
        if level is None:
            return None
        return ScopeBlock(
            level=level,
            items=items,
            description=description,
            extras=self._extras(raw, ("level", "description", "list")),
        )

    def item(self, raw: Any, path: str) -> ScopeItem | None:
        if not isinstance(raw, dict):
            self.error(path, "invalid-type", "scope item must be a JSON object")
            return None
        kind = raw.get("type")
        if kind == "component":
            return self.component(raw, path)
        if kind == "link":
            return self.link(raw, path)
        self.error(
            f"{path}.type",
            "invalid-discriminator",
            f"item 'type' must be 'component' or 'link', got {kind!r}",
        )
        return None

    def component(self, raw: dict, path: str) -> Component | None:
        quantity = None
        if "quantity" not in raw:
            self.error(f"{path}.quantity", "missing-field", "component requires 'quantity'")
        else:
            quantity = self._decimal(raw["quantity"], f"{path}.quantity")
        quantity_unit = self._string(raw, "quantity_unit", path, required=True)
        category = self._string(raw, "category", path, required=False)
        source = None
        if "source" not in raw:
            self.error(f"{path}.source", "missing-field", "component requires a 'source'")
        else:
            source = self.source(raw["source"], f"{path}.source")
        consumer = None
        if "consumer" in raw:
            consumer = self.consumer(raw["consumer"], f"{path}.consumer")
            if consumer is None:
                return None
        if quantity is None or quantity_unit is None or source is None:
            return None
        return Component(
            quantity=quantity,
            quantity_unit=quantity_unit,
            source=source,
            consumer=consumer,
            category=category,
            extras=self._extras(
                raw, ("type", "consumer", "quantity", "quantity_unit", "category", "source")
            ),
        )

    def link(self, raw: dict, path: str) -> Link | None:
        uri_raw = self._string(raw, "uri", path, required=True)
        quantity = None
        if "quantity" in raw:
            quantity = self._decimal(raw["quantity"], f"{path}.quantity")
            if quantity is None:
                return None
        if uri_raw is None or not uri_raw.strip():
            if uri_raw is not None:
                self.error(f"{path}.uri", "empty-uri", "link 'uri' must be non-empty")
            return None
        return Link(
            uri=ScenarioUri(uri_raw),
            quantity=quantity,
            extras=self._extras(raw, ("type", "uri", "quantity")),
        )

    def source(self, raw: Any, path: str) -> Source | None:
        if not isinstance(raw, dict):
            self.error(path, "invalid-type", "source must be a JSON object")
            return None
        name = self._string(raw, "name", path, required=True)
        energy_type = self._string(raw, "type", path, required=True)
        description = self._string(raw, "description", path, required=False)
        emissions = self.rate_map(
            raw, "emissions", path, EmissionFactor, required=True
        )
        if name is None or energy_type is None or emissions is None:
            return None
        return Source(
            name=name,
            energy_type=energy_type,
            emissions=emissions,
            description=description,
            extras=self._extras(raw, ("name", "type", "description", "emissions")),
        )

    def consumer(self, raw: Any, path: str) -> Consumer | None:
        if not isinstance(raw, dict):
            self.error(path, "invalid-type", "consumer must be a JSON object")
            return None
        name = self._string(raw, "name", path, required=True)
        description = self._string(raw, "description", path, required=False)
        consumptions = self.rate_map(
            raw, "consumptions", path, Consumption, required=True
        )
        if name is None or consumptions is None:
            return None
        return Consumer(
            name=name,
            consumptions=consumptions,
            description=description,
            extras=self._extras(raw, ("name", "description", "consumptions")),
        )

    def rate_map(
        self, obj: dict, key: str, path: str, cls: type, required: bool
    ) -> dict | None:
        if key not in obj:
            if required:
                self.error(f"{path}.{key}", "missing-field", f"required field {key!r} is missing")
            return None
        raw = obj[key]
        if not isinstance(raw, dict):
            self.error(f"{path}.{key}", "invalid-type", f"{key!r} must be an object")
            return None
        out = {}
        ok = True
        for entry_key, entry in raw.items():
            built = self.rate_entry(entry, f"{path}.{key}.{entry_key}", cls)
            if built is None:
                ok = False
            else:
                out[entry_key] = built
        return out if ok else None

    def rate_entry(self, raw: Any, path: str, cls: type):
        # cls is EmissionFactor or Consumption; both share value/unit/"base unit".
        if not isinstance(raw, dict):
            self.error(path, "invalid-type", "entry must be a JSON object")
            return None
        value = None
        if "value" not in raw:
            self.error(f"{path}.value", "missing-field", "entry requires 'value'")
        else:
            value = self._decimal(raw["value"], f"{path}.value")
        unit = self._string(raw, "unit", path, required=True)
        base_unit = self._string(raw, "base unit", path, required=True)
        reference_url = self._string(raw, "reference_url", path, required=False)
        if value is None or unit is None or base_unit is None:
            return None
        return cls(
            value=value,
            unit=unit,
            base_unit=base_unit,
            reference_url=reference_url,
            extras=self._extras(raw, ("value", "unit", "base unit", "reference_url")),
        )


def parse_scenario(
    text: str | bytes,
    origin: ScenarioUri | str,
    *,
    strict: bool = False,
    registry: UnitRegistry = DEFAULT_REGISTRY,
) -> Scenario:
    """Parse and validate one scenario document.

    ``origin`` becomes the scenario's URI (documents do not embed their
    own identity).  Permissive mode (the default) keeps unknown fields in
    per-entity extras bags and downgrades unknown emission keys to
    warnings; ``strict=True`` turns both into errors.
    """
    if isinstance(origin, str):
        origin = ScenarioUri(origin)
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise JsonSyntaxError(exc.start, "input is not valid UTF-8") from exc
    try:
        doc = json.loads(text, parse_float=Decimal, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise JsonSyntaxError(exc.pos, exc.msg) from exc
    except ValueError as exc:
        raise JsonSyntaxError(0, str(exc)) from exc

    builder = _Builder()
    scenario = builder.scenario(doc, origin)
    if scenario is None or builder.violations:
        raise SchemaViolationError(builder.violations)

    violations = validate(scenario, registry=registry)
    errors = [v for v in violations if v.severity == "error"]
    if errors:
        raise SchemaViolationError(errors)
    if strict and violations:
        if any(v.rule == "unknown-emission-key" for v in violations):
            raise UnknownEmissionKeyError(violations)
        raise SchemaViolationError(violations)
    return scenario


# ---------------------------------------------------------------------------
# Validation

_WHITESPACE = re.compile(r"\s")


def _check_unit_symbol(unit: str, path: str, out: list[Violation]) -> None:
    if not unit or unit != unit.strip() or _WHITESPACE.search(unit):
        out.append(
            Violation(path, "invalid-unit", f"unit symbol {unit!r} must be non-empty without whitespace")
        )


def _check_positive(value: Decimal, path: str, out: list[Violation], rule: str = "invalid-quantity") -> None:
    if not value.is_finite() or value <= 0:
        out.append(Violation(path, rule, f"value must be a positive finite number, got {value}"))


def _warn_extras(extras: Mapping[str, Any], path: str, out: list[Violation]) -> None:
    for key in extras:
        out.append(
            Violation(f"{path}.{key}", "unknown-field", f"field {key!r} is not part of the schema", "warning")
        )


def validate(
    scenario: Scenario, *, registry: UnitRegistry = DEFAULT_REGISTRY
) -> list[Violation]:
    """All rule checks over a constructed scenario.

    Returns an empty list iff every invariant holds; warnings (unknown
    fields, non-canonical emission keys) are included with severity
    "warning".
    """
    out: list[Violation] = []
    if not scenario.title.strip():
        out.append(Violation("$.title", "empty-title", "title must be non-empty"))
    if not 1 <= len(scenario.scopes) <= 3:
        out.append(
            Violation(
                "$.scopes",
                "cardinality-scopes",
                f"a scenario covers 1 to 3 scopes, got {len(scenario.scopes)}",
            )
        )
    seen_levels: set[ScopeLevel] = set()
    for i, scope in enumerate(scenario.scopes):
        spath = f"$.scopes[{i}]"
        if scope.level in seen_levels:
            out.append(
                Violation(
                    "$.scopes",
                    "duplicate-scope-level",
                    f"scope level {scope.level.value!r} appears more than once",
                )
            )
        seen_levels.add(scope.level)
        if not scope.items:
            out.append(
                Violation(
                    f"{spath}.list",
                    "cardinality-items",
                    "a scope includes 1 or more components or links",
                )
            )
        for j, item in enumerate(scope.items):
            ipath = f"{spath}.list[{j}]"
            if isinstance(item, Component):
                _validate_component(item, ipath, registry, out)
            else:
                if item.quantity is not None:
                    _check_positive(item.quantity, f"{ipath}.quantity", out)
                _warn_extras(item.extras, ipath, out)
        _warn_extras(scope.extras, spath, out)
    _warn_extras(scenario.extras, "$", out)
    return out


def _validate_component(
    component: Component, path: str, registry: UnitRegistry, out: list[Violation]
) -> None:
    _check_positive(component.quantity, f"{path}.quantity", out)
    _check_unit_symbol(component.quantity_unit, f"{path}.quantity_unit", out)

    source = component.source
    spath = f"{path}.source"
    if not source.name.strip():
        out.append(Violation(f"{spath}.name", "empty-name", "source name must be non-empty"))
    if not source.energy_type.strip():
        out.append(Violation(f"{spath}.type", "empty-energy-type", "source type must be non-empty"))
    if not source.emissions:
        out.append(
            Violation(
                f"{spath}.emissions",
                "cardinality-emissions",
                "a source includes 1 or more emissions",
            )
        )
    for key, factor in source.emissions.items():
        epath = f"{spath}.emissions.{key}"
        _check_positive(factor.value, f"{epath}.value", out, rule="invalid-value")
        _check_unit_symbol(factor.unit, f"{epath}.unit", out)
        _check_unit_symbol(factor.base_unit, f"{epath}.base unit", out)
        if registry.dimension_of(factor.unit) is not Dimension.MASS:
            out.append(
                Violation(
                    f"{epath}.unit",
                    "factor-unit-not-mass",
                    f"emission unit {factor.unit!r} is not a mass unit",
                )
            )
        if canonical_emission_key(key) not in CANONICAL_EMISSION_KEYS:
            out.append(
                Violation(
                    epath,
                    "unknown-emission-key",
                    f"emission key {key!r} is outside the canonical set",
                    "warning",
                )
            )
        _warn_extras(factor.extras, epath, out)
    _warn_extras(source.extras, spath, out)

    if component.consumer is not None:
        consumer = component.consumer
        cpath = f"{path}.consumer"
        if not consumer.name.strip():
            out.append(Violation(f"{cpath}.name", "empty-name", "consumer name must be non-empty"))
        if not consumer.consumptions:
            out.append(
                Violation(
                    f"{cpath}.consumptions",
                    "cardinality-consumptions",
                    "a consumer includes 1 or more consumptions",
                )
            )
        for key, consumption in consumer.consumptions.items():
            kpath = f"{cpath}.consumptions.{key}"
            _check_positive(consumption.value, f"{kpath}.value", out, rule="invalid-value")
            _check_unit_symbol(consumption.unit, f"{kpath}.unit", out)
            _check_unit_symbol(consumption.base_unit, f"{kpath}.base unit", out)
            _warn_extras(consumption.extras, kpath, out)
        _warn_extras(consumer.extras, cpath, out)
        if not check_correspondence(component):
            out.append(
                Violation(
                    f"{cpath}.consumptions",
                    "key-correspondence",
                    f"no consumption matches the source energy type "
                    f"{component.source.energy_type!r}",
                )
            )
    _warn_extras(component.extras, path, out)


# ---------------------------------------------------------------------------
# Serialization

_KNOWN_RATE = ("value", "unit", "base unit", "reference_url")


def _rate_obj(entry: EmissionFactor | Consumption) -> dict[str, Any]:
    obj: dict[str, Any] = {"value": str(entry.value), "unit": entry.unit, "base unit": entry.base_unit}
    if entry.reference_url is not None:
        obj["reference_url"] = entry.reference_url
    obj.update(entry.extras)
    return obj


def _item_obj(item: ScopeItem) -> dict[str, Any]:
    if isinstance(item, Link):
        obj: dict[str, Any] = {"type": "link", "uri": item.uri.value}
        if item.quantity is not None:
            obj["quantity"] = str(item.quantity)
        obj.update(item.extras)
        return obj
    obj = {"type": "component"}
    if item.consumer is not None:
        consumer: dict[str, Any] = {"name": item.consumer.name}
        if item.consumer.description is not None:
            consumer["description"] = item.consumer.description
        consumer["consumptions"] = {
            k: _rate_obj(v) for k, v in item.consumer.consumptions.items()
        }
        consumer.update(item.consumer.extras)
        obj["consumer"] = consumer
    obj["quantity"] = str(item.quantity)
    obj["quantity_unit"] = item.quantity_unit
    if item.category is not None:
        obj["category"] = item.category
    source: dict[str, Any] = {"name": item.source.name, "type": item.source.energy_type}
    if item.source.description is not None:
        source["description"] = item.source.description
    source["emissions"] = {k: _rate_obj(v) for k, v in item.source.emissions.items()}
    source.update(item.source.extras)
    obj["source"] = source
    obj.update(item.extras)
    return obj


def _scenario_obj(scenario: Scenario) -> dict[str, Any]:
    obj: dict[str, Any] = {"title": scenario.title}
    if scenario.reference_url is not None:
        obj["reference_url"] = scenario.reference_url
    scopes = []
    for scope in scenario.scopes:
        sobj: dict[str, Any] = {"level": scope.level.value}
        if scope.description is not None:
            sobj["description"] = scope.description
        sobj["list"] = [_item_obj(item) for item in scope.items]
        sobj.update(scope.extras)
        scopes.append(sobj)
    obj["scopes"] = scopes
    obj.update(scenario.extras)
    return obj


def _emit(value: Any, parts: list[str], indent: int | None, depth: int) -> None:
    # Decimal emits its raw token so extras round-trip digit-for-digit.
    if isinstance(value, str):
        parts.append(json.dumps(value, ensure_ascii=False))
    elif value is None:
        parts.append("null")
    elif isinstance(value, bool):
        parts.append("true" if value else "false")
    elif isinstance(value, Decimal):
        parts.append(str(value))
    elif isinstance(value, (int, float)):
        parts.append(json.dumps(value))
    elif isinstance(value, (list, tuple)):
        if not value:
            parts.append("[]")
            return
        open_, close, sep, pad = _separators(indent, depth, "[", "]")
        parts.append(open_)
        for i, entry in enumerate(value):
            if i:
                parts.append(sep)
            parts.append(pad)
            _emit(entry, parts, indent, depth + 1)
        parts.append(close)
    elif isinstance(value, dict):
        if not value:
            parts.append("{}")
            return
        open_, close, sep, pad = _separators(indent, depth, "{", "}")
        parts.append(open_)
        for i, (key, entry) in enumerate(value.items()):
            if i:
                parts.append(sep)
            parts.append(pad)
            parts.append(json.dumps(str(key), ensure_ascii=False))
            parts.append(": " if indent is not None else ":")
            _emit(entry, parts, indent, depth + 1)
        parts.append(close)
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def _separators(indent: int | None, depth: int, open_: str, close: str):
    if indent is None:
        return open_, close, ",", ""
    inner = "\n" + " " * (indent * (depth + 1))
    outer = "\n" + " " * (indent * depth)
    return open_, outer + close, ",", inner


def serialize_scenario(scenario: Scenario, *, indent: int | None = 2) -> str:
    """Serialize back to the wire format.

    Field order follows the reference document layout; numeric fields are
    emitted as decimal strings exactly as stored, and any preserved
    unknown fields follow the known ones.  The output re-parses to an
    equal scenario.
    """
    parts: list[str] = []
    _emit(_scenario_obj(scenario), parts, indent, 0)
    return "".join(parts)


def canonical_json(scenario: Scenario) -> str:
    """Compact canonical form: same field order, no insignificant
    whitespace.  Serializing the same scenario twice yields identical
    bytes, which makes this the payload format for sharing."""
    return serialize_scenario(scenario, indent=None)
