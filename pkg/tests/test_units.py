"""Unit registry and conversion behavior."""

from decimal import Decimal

import hypothesis.strategies as st
import pytest
from hypothesis import given

from cfs.errors import CfsError
from cfs.units import (
    DEFAULT_REGISTRY,
    Dimension,
    IncompatibleDimensionsError,
    UnitRedefinitionError,
    UnitRegistry,
    convert,
    dimension_of,
)
from helpers import rel_close
from strategies import ALL_UNITS, DIMENSION_UNITS

values = st.decimals(
    min_value=Decimal("1e-9"),
    max_value=Decimal("1e9"),
    allow_nan=False,
    allow_infinity=False,
    places=6,
)


@st.composite
def same_dimension_units(draw, count=2):
    units = draw(st.sampled_from(list(DIMENSION_UNITS.values())))
    return [draw(st.sampled_from(units)) for _ in range(count)]


@pytest.mark.parametrize(
    "value,from_unit,to_unit,expected",
    [
        ("1", "t", "kg", "1000"),
        ("500", "g", "kg", "0.5"),
        ("30", "min", "h", "0.5"),
        ("1", "kWh", "Wh", "1000"),
        ("2", "d", "h", "48"),
        ("1500", "m", "km", "1.5"),
        ("250", "MB", "GB", "0.25"),
        ("3", "MWh", "kWh", "3000"),
        ("1", "l", "l", "1"),
        ("7", "pcs", "pcs", "7"),
    ],
)
def test_conversion_table(value, from_unit, to_unit, expected):
    assert convert(Decimal(value), from_unit, to_unit) == Decimal(expected)


def test_dimension_of():
    assert dimension_of("kg") is Dimension.MASS
    assert dimension_of("pcs") is Dimension.COUNT
    assert dimension_of("kWh") is Dimension.ENERGY
    assert dimension_of("furlong") is Dimension.UNKNOWN


@pytest.mark.parametrize(
    "from_unit,to_unit",
    [("kg", "kWh"), ("km", "h"), ("furlong", "km"), ("kg", "furlong"), ("furlong", "rod")],
)
def test_incompatible_dimensions(from_unit, to_unit):
    with pytest.raises(IncompatibleDimensionsError):
        convert(Decimal(1), from_unit, to_unit)


def test_unknown_unit_identity_is_exact():
    value = Decimal("123.456")
    assert convert(value, "furlong", "furlong") is value


@given(values, same_dimension_units())
def test_round_trip(value, units):
    a, b = units
    there_and_back = convert(convert(value, a, b), b, a)
    assert rel_close(there_and_back, value)


@given(values, same_dimension_units(count=3))
def test_transitivity(value, units):
    a, b, c = units
    direct = convert(value, a, c)
    stepped = convert(convert(value, a, b), b, c)
    assert rel_close(direct, stepped)


@given(values, st.sampled_from(ALL_UNITS + ["furlong", "email"]))
def test_identity(value, unit):
    assert convert(value, unit, unit) == value


@given(values, same_dimension_units())
def test_positivity_preserved(value, units):
    assert convert(value, units[0], units[1]) > 0


def test_extension_file(fixtures_dir):
    registry = UnitRegistry.with_extensions(fixtures_dir / "extras" / "units-ext.json")
    assert registry.dimension_of("mi") is Dimension.DISTANCE
    assert registry.convert(Decimal(1), "mi", "km") == Decimal("1.609344")
    assert registry.convert(Decimal(2), "TB", "GB") == Decimal(2000)
    # built-ins still intact
    assert registry.convert(Decimal(1), "t", "kg") == Decimal(1000)
    # default registry unaffected
    assert DEFAULT_REGISTRY.dimension_of("mi") is Dimension.UNKNOWN


def test_extension_may_not_redefine_builtin():
    with pytest.raises(UnitRedefinitionError):
        UnitRegistry.with_extensions({"kg": {"dimension": "mass", "factor": 2}})


@pytest.mark.parametrize(
    "entry",
    [
        {"mi": {"dimension": "length", "factor": 1.6}},  # unknown dimension name
        {"mi": {"factor": 1.6}},  # missing dimension
        {"mi": {"dimension": "distance"}},  # missing factor
        {"mi": {"dimension": "distance", "factor": 0}},  # non-positive factor
        {"mi": {"dimension": "unknown", "factor": 1}},  # reserved dimension
    ],
)
def test_extension_rejects_bad_entries(entry):
    with pytest.raises(CfsError):
        UnitRegistry.with_extensions(entry)
