"""Dimensional unit registry and conversion for emission arithmetic.

Every registered symbol belongs to exactly one dimension and carries a
factor to that dimension's base unit (kg, kWh, l, km, h, pcs, GB).
Unregistered symbols degrade to identity-only conversion: they convert
to themselves and nothing else, so documents using exotic units still
compute as long as their units line up exactly.
"""

from __future__ import annotations

import json
from decimal import Decimal, InvalidOperation
from enum import Enum
from fractions import Fraction
from pathlib import Path

from cfs.errors import CfsError

__all__ = [
    "Dimension",
    "UnitRegistry",
    "DEFAULT_REGISTRY",
    "IncompatibleDimensionsError",
    "UnitRedefinitionError",
    "convert",
    "dimension_of",
]


class Dimension(Enum):
    MASS = "mass"
    ENERGY = "energy"
    VOLUME = "volume"
    DISTANCE = "distance"
    TIME = "time"
    COUNT = "count"
    DATA = "data"
    UNKNOWN = "unknown"


class IncompatibleDimensionsError(CfsError):
    """Conversion between units of different (or unknown) dimensions."""

    def __init__(self, from_unit: str, to_unit: str):
        self.from_unit = from_unit
        self.to_unit = to_unit
        super().__init__(f"cannot convert {from_unit!r} to {to_unit!r}")


class UnitRedefinitionError(CfsError):
    """An extension file tried to redefine a built-in unit."""


# Factor maps each symbol to the dimension base unit (factor 1 entries
# are the base units themselves).  Factors are exact rationals so that a
# conversion whose true result terminates in decimal comes out exact
# (30 min -> 0.5 h, not 0.500...01 h); rounding happens only once, at the
# final division.
_BUILTINS: dict[str, tuple[Dimension, Fraction]] = {
    "g": (Dimension.MASS, Fraction(1, 1000)),
    "kg": (Dimension.MASS, Fraction(1)),
    "t": (Dimension.MASS, Fraction(1000)),
    "Wh": (Dimension.ENERGY, Fraction(1, 1000)),
    "kWh": (Dimension.ENERGY, Fraction(1)),
    "MWh": (Dimension.ENERGY, Fraction(1000)),
    "l": (Dimension.VOLUME, Fraction(1)),
    "m": (Dimension.DISTANCE, Fraction(1, 1000)),
    "km": (Dimension.DISTANCE, Fraction(1)),
    "min": (Dimension.TIME, Fraction(1, 60)),
    "h": (Dimension.TIME, Fraction(1)),
    "d": (Dimension.TIME, Fraction(24)),
    "pcs": (Dimension.COUNT, Fraction(1)),
    "MB": (Dimension.DATA, Fraction(1, 1000)),
    "GB": (Dimension.DATA, Fraction(1)),
}


class UnitRegistry:
    """Immutable symbol table; build once, share freely across threads."""

    def __init__(self, extra: dict[str, tuple[Dimension, Decimal | Fraction | int]] | None = None):
        table = dict(_BUILTINS)
        for symbol, (dim, factor) in (extra or {}).items():
            if symbol in _BUILTINS:
                raise UnitRedefinitionError(
                    f"extension may not redefine built-in unit {symbol!r}"
                )
            if isinstance(factor, Decimal) and not factor.is_finite():
                raise CfsError(f"unit {symbol!r}: factor must be a positive finite number")
            factor = Fraction(factor)
            if factor <= 0:
                raise CfsError(f"unit {symbol!r}: factor must be a positive finite number")
            table[symbol] = (dim, factor)
        self._table = table

    @classmethod
    def with_extensions(cls, source: str | Path | dict) -> UnitRegistry:
        """Build a registry from an extension mapping or a JSON file.

        The file format is ``{symbol: {"dimension": name, "factor": number}}``.
        Extensions may add units but never redefine built-ins.
        """
        if isinstance(source, (str, Path)):
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        else:
            raw = source
        extra: dict[str, tuple[Dimension, Decimal]] = {}
        for symbol, entry in raw.items():
            if not isinstance(entry, dict) or "dimension" not in entry or "factor" not in entry:
                raise CfsError(
                    f"unit {symbol!r}: entry must carry 'dimension' and 'factor'"
                )
            try:
                dim = Dimension(str(entry["dimension"]).lower())
            except ValueError:
                names = ", ".join(d.value for d in Dimension if d is not Dimension.UNKNOWN)
                raise CfsError(
                    f"unit {symbol!r}: unknown dimension {entry['dimension']!r} (one of: {names})"
                ) from None
            if dim is Dimension.UNKNOWN:
                raise CfsError(f"unit {symbol!r}: cannot register into the unknown dimension")
            try:
                factor = Fraction(Decimal(str(entry["factor"])))
            except (InvalidOperation, ValueError) as exc:
                raise CfsError(f"unit {symbol!r}: factor is not a number") from exc
            extra[symbol] = (dim, factor)
        return cls(extra)

    def dimension_of(self, unit: str) -> Dimension:
        """Dimension of a symbol; UNKNOWN for anything unregistered."""
        entry = self._table.get(unit)
        return entry[0] if entry else Dimension.UNKNOWN

    def factor_of(self, unit: str) -> Fraction | None:
        entry = self._table.get(unit)
        return entry[1] if entry else None

    def symbols(self, dimension: Dimension | None = None) -> list[str]:
        if dimension is None:
            return list(self._table)
        return [s for s, (d, _) in self._table.items() if d is dimension]

    def convert(self, value: Decimal, from_unit: str, to_unit: str) -> Decimal:
        """Convert ``value`` between two symbols of the same dimension.

        Identity conversions are exact and work for any symbol, registered
        or not.  Raises IncompatibleDimensionsError otherwise.
        """
        if from_unit == to_unit:
            return value
        src = self._table.get(from_unit)
        dst = self._table.get(to_unit)
        if src is None or dst is None or src[0] is not dst[0]:
            raise IncompatibleDimensionsError(from_unit, to_unit)
        exact = Fraction(value) * src[1] / dst[1]
        return Decimal(exact.numerator) / Decimal(exact.denominator)


DEFAULT_REGISTRY = UnitRegistry()


def dimension_of(unit: str, registry: UnitRegistry = DEFAULT_REGISTRY) -> Dimension:
    return registry.dimension_of(unit)


def convert(
    value: Decimal,
    from_unit: str,
    to_unit: str,
    registry: UnitRegistry = DEFAULT_REGISTRY,
) -> Decimal:
    return registry.convert(value, from_unit, to_unit)
