import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wattbench.errors import TraceError
from wattbench.trace import (
    PowerSample,
    PowerTrace,
    TraceBundle,
    TraceGapWarning,
    bundle_energy,
    integrate_trace,
    load_bundle,
    parse_trace,
)


# randomized traces legitimately contain large gaps; the warning has its own tests
pytestmark = pytest.mark.filterwarnings("ignore::wattbench.trace.TraceGapWarning")


def trace_of(points, device="gpu0"):
    return PowerTrace(device_id=device,
                      samples=tuple(PowerSample.of(t, p) for t, p in points))


def riemann_oracle(points, density=1000):
    """Independent energy oracle: midpoint-rectangle sum over the
    piecewise-linear interpolant, `density` rectangles per interval. Returns
    joules."""
    total = 0.0
    for (t0, p0), (t1, p1) in zip(points, points[1:]):
        if t1 == t0:
            continue
        h = (t1 - t0) / density
        mids = t0 + (np.arange(density) + 0.5) * h
        pm = p0 + (p1 - p0) * (mids - t0) / (t1 - t0)
        total += float(np.sum(pm) * h)
    return total


class TestParse:
    def test_header_only_gives_empty_trace(self):
        t = parse_trace(b"t_s,power_w\n")
        assert len(t) == 0
        assert integrate_trace(t).value == 0.0

    def test_two_rows(self):
        t = parse_trace(b"t_s,power_w\n0,100\n10,100\n")
        assert len(t) == 2
        assert t.samples[1].p.value == 100.0

    def test_crlf_and_text_input(self):
        t = parse_trace("t_s,power_w\r\n0,1\r\n1,2\r\n")
        assert len(t) == 2

    def test_negative_power_names_line(self):
        with pytest.raises(TraceError, match="line 3"):
            parse_trace(b"t_s,power_w\n0,100\n10,-5\n")

    def test_decreasing_timestamp_rejected(self):
        with pytest.raises(TraceError, match="line 3.*decreases"):
            parse_trace(b"t_s,power_w\n10,1\n5,1\n")

    def test_malformed_row_names_line(self):
        with pytest.raises(TraceError, match="line 2"):
            parse_trace(b"t_s,power_w\nnot,a number\n")
        with pytest.raises(TraceError, match="line 4"):
            parse_trace(b"t_s,power_w\n0,1\n1,1\n2,1,9\n")

    def test_missing_header_rejected(self):
        with pytest.raises(TraceError, match="header"):
            parse_trace(b"0,100\n10,100\n")

    def test_unsupported_format(self):
        with pytest.raises(TraceError):
            parse_trace(b"", format="parquet")

    def test_duplicate_timestamps_allowed(self):
        t = parse_trace(b"t_s,power_w\n0,100\n0,200\n1,100\n")
        assert len(t) == 3


class TestIntegrate:
    def test_constant_power(self):
        t = trace_of([(0, 1000), (3600, 1000)])
        assert integrate_trace(t).value == 1000.0

    @pytest.mark.parametrize("points", [[], [(0, 500)]])
    def test_degenerate_traces_are_zero(self, points):
        assert integrate_trace(trace_of(points)).value == 0.0

    def test_linear_ramp_closed_form(self):
        # 0 -> 100 W over 100 s sampled each second: integral is the triangle
        # area 0.5 * 100 W * 100 s = 5000 J
        t = trace_of([(i, i) for i in range(101)])
        expected_wh = 5000.0 / 3600.0
        assert integrate_trace(t).value == pytest.approx(expected_wh, abs=1e-6)
        assert expected_wh == pytest.approx(1.3889, abs=1e-4)

    def test_zero_width_interval_contributes_nothing(self):
        base = trace_of([(0, 100), (10, 100)])
        with_dup = trace_of([(0, 100), (10, 100), (10, 5000)])
        assert integrate_trace(with_dup).value == integrate_trace(base).value

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.floats(0.01, 100.0), st.floats(0.0, 5000.0)),
                    min_size=1, max_size=20))
    def test_matches_riemann_oracle(self, deltas):
        # randomized piecewise-linear trace; timestamps built from positive gaps
        points, t = [], 0.0
        points.append((0.0, deltas[0][1]))
        for dt, p in deltas:
            t += dt
            points.append((t, p))
        got = integrate_trace(trace_of(points)).value
        want = riemann_oracle(points) / 3600.0
        assert got == pytest.approx(want, rel=1e-9, abs=1e-15)

    def test_gap_warning(self):
        points = [(float(i), 100.0) for i in range(10)] + [(500.0, 100.0)]
        with pytest.warns(TraceGapWarning):
            integrate_trace(trace_of(points))

    def test_no_gap_warning_for_regular_sampling(self):
        import warnings
        points = [(float(i), 100.0) for i in range(10)]
        with warnings.catch_warnings():
            warnings.simplefilter("error", TraceGapWarning)
            integrate_trace(trace_of(points))

    def test_gap_threshold_configurable(self):
        import warnings
        # intervals [1, 1, 6]: the 6 s gap is 6x the median interval
        points = [(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (8.0, 1.0)]
        with pytest.warns(TraceGapWarning):
            integrate_trace(trace_of(points), gap_warn_ratio=2.0)
        with warnings.catch_warnings():
            warnings.simplefilter("error", TraceGapWarning)
            integrate_trace(trace_of(points), gap_warn_ratio=10.0)


# strategies generating exactly-representable traces: integer timestamps and
# dyadic powers keep every trapezoid term exact in binary floating point
exact_powers = st.integers(min_value=0, max_value=2 ** 20).map(float)
exact_gaps = st.integers(min_value=1, max_value=1024).map(float)


def build_points(first_power, gap_power_pairs):
    points, t = [(0.0, first_power)], 0.0
    for gap, p in gap_power_pairs:
        t += gap
        points.append((t, p))
    return points


class TestProperties:
    @settings(max_examples=100, deadline=None)
    @given(first=exact_powers,
           rest=st.lists(st.tuples(exact_gaps, exact_powers), min_size=1, max_size=30),
           cut=st.integers(0, 30))
    def test_splitting_is_additive(self, first, rest, cut):
        points = build_points(first, rest)
        cut = min(cut, len(points) - 1)
        a, b = points[:cut + 1], points[cut:]
        whole = integrate_trace(trace_of(points)).value
        if len(a) < 2:
            parts = integrate_trace(trace_of(b)).value
        elif len(b) < 2:
            parts = integrate_trace(trace_of(a)).value
        else:
            parts = integrate_trace(trace_of(a)).value + integrate_trace(trace_of(b)).value
        # additivity is exact in joules; the single final joule->Wh division
        # costs at most one ulp between the two evaluation orders
        assert abs(whole - parts) <= math.ulp(max(whole, parts))

    @settings(max_examples=100, deadline=None)
    @given(first=exact_powers,
           rest=st.lists(st.tuples(exact_gaps, exact_powers), min_size=1, max_size=30),
           offset=st.integers(0, 10 ** 6).map(float))
    def test_translation_invariance(self, first, rest, offset):
        points = build_points(first, rest)
        shifted = [(t + offset, p) for t, p in points]
        assert integrate_trace(trace_of(points)).value \
            == integrate_trace(trace_of(shifted)).value

    @settings(max_examples=100, deadline=None)
    @given(first=exact_powers,
           rest=st.lists(st.tuples(exact_gaps, exact_powers), min_size=1, max_size=30),
           exponent=st.integers(-6, 6))
    def test_power_scaling_is_exact(self, first, rest, exponent):
        k = 2.0 ** exponent
        points = build_points(first, rest)
        scaled = [(t, p * k) for t, p in points]
        assert integrate_trace(trace_of(scaled)).value \
            == integrate_trace(trace_of(points)).value * k

    @settings(max_examples=100, deadline=None)
    @given(first=exact_powers,
           rest=st.lists(st.tuples(exact_gaps, exact_powers), min_size=1, max_size=30),
           extra_gap=exact_gaps, extra_power=exact_powers)
    def test_appending_a_sample_never_decreases_energy(self, first, rest,
                                                       extra_gap, extra_power):
        points = build_points(first, rest)
        extended = points + [(points[-1][0] + extra_gap, extra_power)]
        assert integrate_trace(trace_of(extended)).value \
            >= integrate_trace(trace_of(points)).value


class TestBundle:
    def test_two_identical_traces_double(self):
        t = [(0, 1000), (3600, 1000)]
        bundle = TraceBundle(run_id="r", traces=(trace_of(t, "gpu0"), trace_of(t, "gpu1")))
        assert bundle_energy(bundle).value == 2000.0

    def test_empty_bundle(self):
        assert bundle_energy(TraceBundle(run_id="r")).value == 0.0

    def test_sum_matches_per_device_oracle(self):
        a = trace_of([(0, 500), (3600, 500)], "gpu0")      # 500 Wh
        b = trace_of([(0, 720), (3600, 720)], "gpu1")      # 720 Wh
        bundle = TraceBundle(run_id="r", traces=(a, b))
        per_device = integrate_trace(a).value + integrate_trace(b).value
        assert bundle_energy(bundle).value == per_device == 1220.0

    def test_duplicate_device_rejected(self):
        t = trace_of([(0, 1)], "gpu0")
        with pytest.raises(TraceError, match="duplicate device_id"):
            TraceBundle(run_id="r", traces=(t, t))


class TestManifest:
    def test_load_bundle(self, tmp_path):
        (tmp_path / "a.csv").write_text("t_s,power_w\n0,1000\n3600,1000\n")
        (tmp_path / "b.csv").write_text("t_s,power_w\n0,500\n3600,500\n")
        manifest = tmp_path / "bundle.json"
        manifest.write_text(json.dumps({
            "run_id": "run-1",
            "traces": [{"device_id": "gpu0", "path": "a.csv"},
                       {"device_id": "gpu1", "path": "b.csv"}],
        }))
        bundle = load_bundle(manifest)
        assert bundle.run_id == "run-1"
        assert bundle_energy(bundle).value == 1500.0

    def test_missing_trace_file_names_path(self, tmp_path):
        manifest = tmp_path / "bundle.json"
        manifest.write_text(json.dumps({
            "run_id": "r", "traces": [{"device_id": "gpu0", "path": "nope.csv"}]}))
        with pytest.raises(TraceError, match="nope.csv"):
            load_bundle(manifest)

    def test_bad_entry_rejected(self, tmp_path):
        manifest = tmp_path / "bundle.json"
        manifest.write_text(json.dumps({
            "run_id": "r", "traces": [{"device_id": "gpu0"}]}))
        with pytest.raises(TraceError, match="device_id and path"):
            load_bundle(manifest)
