"""Unit-tagged physical scalars.

Everything downstream works in canonical units: time in ps, angular
frequency in rad/ps, dispersion in ps^2.  Hz-family units are ordinary
frequency and pick up a factor 2*pi on the way in.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

__all__ = [
    "Quantity",
    "UnitError",
    "ParameterError",
    "UNITS",
    "parse_quantity",
    "convert",
]

TIME = "time"
ANGULAR_FREQUENCY = "angular-frequency"
DISPERSION = "dispersion"
DIMENSIONLESS = "dimensionless"
DECIBEL = "decibel"

DIMENSIONS = (TIME, ANGULAR_FREQUENCY, DISPERSION, DIMENSIONLESS, DECIBEL)


class UnitError(ValueError):
    """Unparseable quantity, unknown unit or dimension mismatch."""


class ParameterError(ValueError):
    """A physical parameter lies outside its admissible range."""


# unit -> (dimension, factor to canonical)
UNITS: dict[str, tuple[str, float]] = {
    "fs": (TIME, 1e-3),
    "ps": (TIME, 1.0),
    "ns": (TIME, 1e3),
    "us": (TIME, 1e6),
    "s": (TIME, 1e12),
    "THz": (ANGULAR_FREQUENCY, 2.0 * math.pi),
    "GHz": (ANGULAR_FREQUENCY, 2.0 * math.pi * 1e-3),
    "rad/ps": (ANGULAR_FREQUENCY, 1.0),
    "ps^2": (DISPERSION, 1.0),
    "fs^2": (DISPERSION, 1e-6),
    "dB": (DECIBEL, 1.0),
    "": (DIMENSIONLESS, 1.0),
}

_CANONICAL = {
    TIME: "ps",
    ANGULAR_FREQUENCY: "rad/ps",
    DISPERSION: "ps^2",
    DIMENSIONLESS: "",
    DECIBEL: "dB",
}

_QUANTITY_RE = re.compile(
    r"^\s*(?P<number>[-+]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|inf(?:inity)?|nan))"
    r"\s*(?P<unit>\S*)\s*$",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class Quantity:
    value: float
    dimension: str

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise UnitError(f"unknown dimension {self.dimension!r}")
        if not math.isfinite(self.value):
            raise UnitError(f"non-finite value {self.value!r}")

    @property
    def unit(self) -> str:
        """Canonical unit string of this quantity's dimension."""
        return _CANONICAL[self.dimension]

    def __str__(self) -> str:
        return f"{self.value:g} {self.unit}".rstrip()


def parse_quantity(text: str) -> Quantity:
    """Parse ``"<number> <unit>"`` into a canonical-unit :class:`Quantity`.

    A bare number is dimensionless.  ``"1 THz"`` becomes ``2*pi`` rad/ps.
    """
    if text is None or not text.strip():
        raise UnitError("empty quantity string")
    m = _QUANTITY_RE.match(text)
    if m is None:
        raise UnitError(f"cannot parse quantity {text!r}")
    number, unit = m.group("number"), m.group("unit") or ""
    try:
        value = float(number)
    except ValueError:
        raise UnitError(f"bad number {number!r} in {text!r}") from None
    if not math.isfinite(value):
        raise UnitError(f"non-finite number {number!r} in {text!r}")
    if unit not in UNITS:
        raise UnitError(f"unknown unit {unit!r} in {text!r}")
    dimension, factor = UNITS[unit]
    return Quantity(value * factor, dimension)


def convert(q: Quantity, unit: str) -> float:
    """Express ``q`` in ``unit``; the unit must share q's dimension."""
    if unit not in UNITS:
        raise UnitError(f"unknown unit {unit!r}")
    dimension, factor = UNITS[unit]
    if dimension != q.dimension:
        raise UnitError(f"cannot convert {q.dimension} to {unit!r} ({dimension})")
    return q.value / factor
