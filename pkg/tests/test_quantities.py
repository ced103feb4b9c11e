import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wattbench.errors import DimensionError, QuantityError
from wattbench.quantities import (
    UNITS,
    DurationS,
    EnergyPerTokenWh,
    EnergyWh,
    GramsCO2e,
    PowerW,
    TokenCount,
    convert,
)


class TestConstruction:
    @pytest.mark.parametrize("cls", [EnergyWh, PowerW, DurationS])
    def test_negative_rejected(self, cls):
        with pytest.raises(QuantityError):
            cls(-1.0)

    @pytest.mark.parametrize("cls", [EnergyWh, PowerW, DurationS])
    def test_non_finite_rejected(self, cls):
        with pytest.raises(QuantityError):
            cls(float("nan"))
        with pytest.raises(QuantityError):
            cls(float("inf"))

    def test_token_count_rejects_negative_and_fractional(self):
        with pytest.raises(QuantityError):
            TokenCount(-1)
        with pytest.raises(QuantityError):
            TokenCount(1.5)
        assert TokenCount(3.0) == 3  # integral floats are fine

    def test_token_count_is_exact_int(self):
        assert TokenCount(10) + TokenCount(7) == 17
        assert isinstance(TokenCount(10) + 7, int)

    def test_grams_rejects_unrounded(self):
        with pytest.raises(QuantityError):
            GramsCO2e(34.8)
        assert GramsCO2e(34) == 34

    def test_energy_per_token_nonnegative(self):
        with pytest.raises(QuantityError):
            EnergyPerTokenWh(mean=-1e-9, std=0.0)
        with pytest.raises(QuantityError):
            EnergyPerTokenWh(mean=1e-9, std=-1e-9)

    def test_immutable(self):
        e = EnergyWh(1.0)
        with pytest.raises(AttributeError):
            e.value = 2.0


class TestArithmetic:
    def test_energy_addition(self):
        assert (EnergyWh(1.5) + EnergyWh(2.5)).value == 4.0

    def test_power_times_duration_is_energy(self):
        e = PowerW(1000.0) * DurationS(3600.0)
        assert isinstance(e, EnergyWh)
        assert e.value == 1000.0

    def test_incompatible_dimensions_rejected(self):
        with pytest.raises((DimensionError, TypeError)):
            EnergyWh(1.0) + PowerW(1.0)
        with pytest.raises((DimensionError, TypeError)):
            EnergyWh(1.0) + 1.0
        with pytest.raises((DimensionError, TypeError)):
            PowerW(1.0) * EnergyWh(1.0)

    def test_kwh_display_is_exact_scale(self):
        assert EnergyWh(2110.0).kwh == 2.11
        assert EnergyWh(0.0).kwh == 0.0


class TestConvert:
    def test_ws_to_wh_reference_value(self):
        # 0.222 Ws / 3600 = 6.1667e-5 Wh; 6.17e-5 at three significant figures
        from wattbench.report import format_sig
        wh = convert(0.222, "wh", "ws")
        assert wh == 0.222 / 3600
        assert format_sig(wh * 1e5, 3) == "6.17"

    def test_zero_wh_to_kwh(self):
        assert convert(0.0, "kwh", "wh") == 0.0

    def test_watt_hour_definition(self):
        assert convert(3600.0, "wh", "ws") == 1.0

    def test_minutes(self):
        assert convert(90.0, "min", "s") == 1.5
        assert convert(1.5, "s", "min") == 90.0

    def test_quantity_argument_implies_unit(self):
        assert convert(EnergyWh(1000.0), "kwh") == 1.0
        with pytest.raises(DimensionError):
            convert(EnergyWh(1.0), "kwh", "s")

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            convert(1.0, "s", "wh")
        with pytest.raises(DimensionError):
            convert(1.0, "parsec", "wh")

    def test_bare_number_needs_unit(self):
        with pytest.raises(DimensionError):
            convert(1.0, "wh")

    @given(
        value=st.floats(min_value=1e-12, max_value=1e12,
                        allow_nan=False, allow_infinity=False),
        pair=st.sampled_from([(a, b) for a in UNITS for b in UNITS
                              if UNITS[a][0] == UNITS[b][0]]),
    )
    def test_round_trip_within_one_ulp(self, value, pair):
        src, dst = pair
        back = convert(convert(value, dst, src), src, dst)
        assert abs(back - value) <= math.ulp(value)
