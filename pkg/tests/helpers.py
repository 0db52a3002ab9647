"""Small shared test utilities: tolerance checks and object builders."""

from __future__ import annotations

from decimal import Decimal

from cfs.schema import (
    Component,
    Consumer,
    Consumption,
    EmissionFactor,
    Scenario,
    ScenarioUri,
    ScopeBlock,
    ScopeLevel,
    Source,
)


def rel_close(a: Decimal, b: Decimal, tol: str = "1e-12") -> bool:
    if a == b:
        return True
    return abs(a - b) <= Decimal(tol) * max(abs(a), abs(b))


def make_source(
    factor: str = "0.5",
    unit: str = "kg",
    base_unit: str = "kWh",
    energy_type: str = "electricity",
    name: str = "Grid electricity",
    key: str = "co2e",
    emissions: dict | None = None,
) -> Source:
    if emissions is None:
        emissions = {key: EmissionFactor(Decimal(factor), unit, base_unit)}
    return Source(name=name, energy_type=energy_type, emissions=emissions)


def make_component(
    quantity: str = "2",
    quantity_unit: str = "kWh",
    source: Source | None = None,
    consumer: Consumer | None = None,
) -> Component:
    return Component(
        quantity=Decimal(quantity),
        quantity_unit=quantity_unit,
        source=source or make_source(),
        consumer=consumer,
    )


def make_consumer(
    rate: str = "0.1",
    unit: str = "kWh",
    base_unit: str = "km",
    energy_type: str = "electricity",
    name: str = "Test device",
) -> Consumer:
    return Consumer(
        name=name,
        consumptions={energy_type: Consumption(Decimal(rate), unit, base_unit)},
    )


def make_scenario(
    *items,
    level: ScopeLevel = ScopeLevel.SCOPE_1,
    title: str = "Test scenario",
    uri: str = "https://example.org/test.json",
) -> Scenario:
    if not items:
        items = (make_component(),)
    return Scenario(
        uri=ScenarioUri(uri),
        title=title,
        scopes=(ScopeBlock(level=level, items=tuple(items)),),
    )
