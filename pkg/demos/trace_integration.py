"""Integrating GPU power traces into energy totals.

Builds a synthetic two-device run, integrates each trace with the
trapezoidal rule and sums the bundle, then demonstrates the sampling-gap
warning on a pathological trace.
"""

import warnings

from wattbench.trace import (
    PowerSample,
    PowerTrace,
    TraceBundle,
    TraceGapWarning,
    bundle_energy,
    integrate_trace,
    parse_trace,
)


def ramp_trace(device, peak_w, duration_s, step_s=1.0):
    samples = []
    t = 0.0
    while t <= duration_s:
        frac = t / duration_s
        samples.append(PowerSample.of(t, peak_w * min(1.0, 4 * frac * (1 - frac) + 0.2)))
        t += step_s
    return PowerTrace(device_id=device, samples=tuple(samples))


def main():
    gpu0 = ramp_trace("gpu0", peak_w=700.0, duration_s=600.0)
    gpu1 = ramp_trace("gpu1", peak_w=350.0, duration_s=600.0)
    for trace in (gpu0, gpu1):
        wh = integrate_trace(trace)
        print(f"{trace.device_id}: {len(trace)} samples over "
              f"{trace.duration.value:.0f} s -> {wh.value:.2f} Wh")

    run = TraceBundle(run_id="demo-run", traces=(gpu0, gpu1))
    print(f"bundle total: {bundle_energy(run).value:.2f} Wh")

    # the same trace serialized through the CSV wire format
    csv_blob = "t_s,power_w\n" + "".join(
        f"{s.t.value},{s.p.value}\n" for s in gpu0.samples)
    reparsed = parse_trace(csv_blob, device_id="gpu0")
    print(f"round-trip through CSV: {integrate_trace(reparsed).value:.2f} Wh")

    # telemetry with a long silence: integrated as a straight line, but flagged
    gappy = PowerTrace(device_id="gpu2", samples=tuple(
        PowerSample.of(t, 300.0) for t in [0, 1, 2, 3, 4, 5, 290, 291]))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        wh = integrate_trace(gappy)
    print(f"gappy trace: {wh.value:.2f} Wh, warnings: "
          f"{[str(w.message) for w in caught if w.category is TraceGapWarning]}")


if __name__ == "__main__":
    main()
