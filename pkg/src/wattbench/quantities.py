"""Units-safe scalar types for energy, power, time, tokens and emissions.

Canonical internal units are watt-hours, watts, seconds, integer tokens and
integer grams. Every type validates its domain at construction and is
immutable afterwards, so values can be shared freely across threads.
Arithmetic is only defined where it is dimensionally meaningful; anything
else raises :class:`~wattbench.errors.DimensionError` (or ``TypeError`` via
Python's normal protocol).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionError, QuantityError

__all__ = [
    "EnergyWh",
    "PowerW",
    "DurationS",
    "TokenCount",
    "EnergyPerTokenWh",
    "GramsCO2e",
    "convert",
    "UNITS",
]


def _check_nonneg(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise QuantityError(f"{what} must be finite, got {value!r}")
    if value < 0:
        raise QuantityError(f"{what} must be >= 0, got {value!r}")
    return float(value)


@dataclass(frozen=True, order=True)
class EnergyWh:
    """An amount of energy in watt-hours."""

    value: float

    def __post_init__(self):
        _check_nonneg(self.value, "energy (Wh)")
        object.__setattr__(self, "value", float(self.value))

    @property
    def kwh(self) -> float:
        return self.value / 1000.0

    @property
    def watt_seconds(self) -> float:
        return self.value * 3600.0

    def __add__(self, other: EnergyWh) -> EnergyWh:
        if not isinstance(other, EnergyWh):
            raise DimensionError(f"cannot add EnergyWh and {type(other).__name__}")
        return EnergyWh(self.value + other.value)

    def __mul__(self, factor: float) -> EnergyWh:
        if isinstance(factor, (int, float)):
            return EnergyWh(self.value * factor)
        raise DimensionError(f"cannot multiply EnergyWh by {type(factor).__name__}")

    __rmul__ = __mul__


@dataclass(frozen=True, order=True)
class PowerW:
    """Instantaneous power in watts. Negative readings are rejected: a
    negative sample signals sensor corruption, not a valid value."""

    value: float

    def __post_init__(self):
        _check_nonneg(self.value, "power (W)")
        object.__setattr__(self, "value", float(self.value))

    def __mul__(self, other):
        if isinstance(other, DurationS):
            return EnergyWh(self.value * other.value / 3600.0)
        if isinstance(other, (int, float)):
            return PowerW(self.value * other)
        raise DimensionError(f"cannot multiply PowerW by {type(other).__name__}")

    __rmul__ = __mul__


@dataclass(frozen=True, order=True)
class DurationS:
    """A duration in seconds."""

    value: float

    def __post_init__(self):
        _check_nonneg(self.value, "duration (s)")
        object.__setattr__(self, "value", float(self.value))

    @property
    def minutes(self) -> float:
        return self.value / 60.0

    def __add__(self, other: DurationS) -> DurationS:
        if not isinstance(other, DurationS):
            raise DimensionError(f"cannot add DurationS and {type(other).__name__}")
        return DurationS(self.value + other.value)

    def __mul__(self, other):
        if isinstance(other, PowerW):
            return other * self
        if isinstance(other, (int, float)):
            return DurationS(self.value * other)
        raise DimensionError(f"cannot multiply DurationS by {type(other).__name__}")

    __rmul__ = __mul__


class TokenCount(int):
    """A non-negative token count with exact integer arithmetic.

    Construction rejects negatives and non-integral floats instead of
    silently rounding.
    """

    def __new__(cls, value) -> TokenCount:
        if isinstance(value, float):
            if not value.is_integer():
                raise QuantityError(f"token count must be integral, got {value!r}")
            value = int(value)
        value = int(value)
        if value < 0:
            raise QuantityError(f"token count must be >= 0, got {value!r}")
        return super().__new__(cls, value)


@dataclass(frozen=True)
class EnergyPerTokenWh:
    """Mean and standard deviation of energy per token, in Wh/token."""

    mean: float
    std: float

    def __post_init__(self):
        _check_nonneg(self.mean, "energy per token mean (Wh)")
        _check_nonneg(self.std, "energy per token std (Wh)")

    @property
    def mean_kwh(self) -> float:
        return self.mean / 1000.0

    @property
    def std_kwh(self) -> float:
        return self.std / 1000.0


class GramsCO2e(int):
    """A non-negative integer amount of CO2-equivalent, in grams."""

    def __new__(cls, value) -> GramsCO2e:
        if isinstance(value, float):
            if not value.is_integer():
                raise QuantityError(f"grams CO2e must be integral, got {value!r} "
                                    "(apply a rounding policy first)")
            value = int(value)
        value = int(value)
        if value < 0:
            raise QuantityError(f"grams CO2e must be >= 0, got {value!r}")
        return super().__new__(cls, value)


# Unit tags, as (dimension, scale-to-canonical). Scales are exact rationals so
# conversions compile to one float multiply and one divide, keeping round
# trips within one ulp and integer-ratio conversions exact.
UNITS: dict[str, tuple[str, Fraction]] = {
    "wh": ("energy", Fraction(1)),
    "kwh": ("energy", Fraction(1000)),
    "ws": ("energy", Fraction(1, 3600)),
    "j": ("energy", Fraction(1, 3600)),
    "s": ("time", Fraction(1)),
    "min": ("time", Fraction(60)),
    "h": ("time", Fraction(3600)),
    "w": ("power", Fraction(1)),
    "kw": ("power", Fraction(1000)),
}

_CANONICAL = {EnergyWh: "wh", PowerW: "w", DurationS: "s"}


def convert(value, to_unit: str, from_unit: str | None = None) -> float:
    """Convert ``value`` between compatible unit tags.

    ``value`` may be a bare number (``from_unit`` required) or one of the
    quantity types, whose canonical unit is implied. Returns a plain float
    expressed in ``to_unit``. Incompatible dimensions are rejected.
    """
    if isinstance(value, (EnergyWh, PowerW, DurationS)):
        implied = _CANONICAL[type(value)]
        if from_unit is not None and from_unit.lower() != implied:
            raise DimensionError(f"{type(value).__name__} is in {implied!r}, not {from_unit!r}")
        from_unit = implied
        value = value.value
    if from_unit is None:
        raise DimensionError("from_unit is required for bare numbers")
    try:
        dim_src, scale_src = UNITS[from_unit.lower()]
        dim_dst, scale_dst = UNITS[to_unit.lower()]
    except KeyError as exc:
        raise DimensionError(f"unknown unit tag {exc.args[0]!r}") from None
    if dim_src != dim_dst:
        raise DimensionError(f"cannot convert {from_unit!r} ({dim_src}) to {to_unit!r} ({dim_dst})")
    ratio = scale_src / scale_dst
    return float(value) * ratio.numerator / ratio.denominator
