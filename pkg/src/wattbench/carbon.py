"""Energy to CO2-equivalent conversion and lay equivalences.

Grams are ``energy_kwh * grid_intensity`` under an explicit rounding policy.
The default policy is ``floor``: it is the policy consistent with every
verifiable cell of the reference results this toolkit reproduces (validated
cell-by-cell in the acceptance suite); ``nearest`` is offered for users who
object to truncation. The two differ by at most one gram.

The car-distance equivalence translates grams into kilometers driven by an
average passenger car, a tangible proxy for end users.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_FLOOR, ROUND_HALF_UP, Decimal
from typing import Mapping

from .catalog import EmissionFactor
from .errors import SchemaError
from .quantities import EnergyWh, GramsCO2e
from .report import ReportTable

__all__ = [
    "ROUNDING_POLICIES",
    "DEFAULT_CAR_G_PER_KM",
    "EquivalenceSpec",
    "CarbonResult",
    "co2_grams",
    "car_distance_km",
    "format_car_km",
    "carbon_table",
]

ROUNDING_POLICIES = ("floor", "nearest")

#: Grams of CO2 emitted per kilometer by an average passenger car.
DEFAULT_CAR_G_PER_KM = 248.55


@dataclass(frozen=True)
class EquivalenceSpec:
    """Constants for lay-audience equivalences."""

    car_g_per_km: float = DEFAULT_CAR_G_PER_KM

    def __post_init__(self):
        if self.car_g_per_km <= 0:
            raise SchemaError(f"car_g_per_km must be > 0, got {self.car_g_per_km}")


@dataclass(frozen=True)
class CarbonResult:
    """Emissions of one energy amount under one regional grid intensity."""

    energy: EnergyWh
    region: str
    grams: GramsCO2e
    car_km: float

    def __post_init__(self):
        if self.car_km < 0:
            raise SchemaError(f"car_km must be >= 0, got {self.car_km}")


def co2_grams(energy: EnergyWh, factor: EmissionFactor, rounding: str = "floor") -> GramsCO2e:
    """Convert energy to grams CO2-equivalent under a grid intensity.

    ``rounding`` chooses how the fractional gram is resolved: ``floor``
    truncates, ``nearest`` rounds half away from zero. The product is taken
    in decimal arithmetic so that values that are exact in decimal (catalog
    intensities times published kWh figures) never straddle an integer
    boundary through binary rounding noise.
    """
    if rounding not in ROUNDING_POLICIES:
        raise SchemaError(f"rounding must be one of {ROUNDING_POLICIES}, got {rounding!r}")
    exact = Decimal(str(energy.kwh)) * Decimal(str(factor.g_per_kwh))
    mode = ROUND_FLOOR if rounding == "floor" else ROUND_HALF_UP
    return GramsCO2e(int(exact.quantize(Decimal(1), rounding=mode)))


def car_distance_km(grams: GramsCO2e, eq: EquivalenceSpec = EquivalenceSpec()) -> float:
    """Kilometers an average car drives to emit ``grams`` of CO2."""
    return float(grams) / eq.car_g_per_km


def format_car_km(km: float) -> str:
    """Display rule for car distances: one decimal below 10 km, whole above.

    A sub-10 value that lands on a whole number drops the trailing ".0".
    """
    if km < 0:
        raise SchemaError(f"car distance must be >= 0, got {km}")
    if km < 10.0:
        s = f"{km:.1f}"
        return s[:-2] if s.endswith(".0") else s
    return f"{round(km):.0f}"


def carbon_result(energy: EnergyWh, factor: EmissionFactor, rounding: str = "floor",
                  eq: EquivalenceSpec = EquivalenceSpec()) -> CarbonResult:
    grams = co2_grams(energy, factor, rounding)
    return CarbonResult(energy=energy, region=factor.region, grams=grams,
                        car_km=car_distance_km(grams, eq))


def carbon_table(energies: Mapping[str, EnergyWh],
                 factors: list[EmissionFactor],
                 estimated: Mapping[str, EnergyWh] | None = None,
                 rounding: str = "floor") -> ReportTable:
    """Emissions of each agent under each regional energy mix.

    ``energies`` holds benchmarked agents; ``estimated`` (optional) holds
    analytically estimated ones, listed after the benchmarked block and
    labelled in the method column so the two are visually separated.
    """
    if not energies and not estimated:
        raise SchemaError("carbon table needs at least one agent")
    if not factors:
        raise SchemaError("carbon table needs at least one emission factor")

    columns = [("method", ""), ("agent", ""), ("energy", "kWh")]
    columns += [(f.region, "gCO2e") for f in factors]
    rows = []
    for method, table in (("benchmarked", energies), ("estimated", estimated or {})):
        for agent, energy in table.items():
            cells = [method, agent, f"{energy.kwh:g}"]
            cells += [str(int(co2_grams(energy, f, rounding))) for f in factors]
            rows.append(cells)
    intensities = ", ".join(f"{f.region} {f.g_per_kwh:g} g/kWh" for f in factors)
    return ReportTable(
        title="CO2-equivalent emissions per agent and energy mix",
        columns=columns, rows=rows,
        footnotes=[f"grid intensities: {intensities}; rounding policy: {rounding}"])
