"""GPU power-trace ingestion and energy integration.

A trace is the sequence of power samples one device emitted between the
measurement start and end flags of a benchmark run. Traces are parsed from
CSV (header ``t_s,power_w``), validated, and integrated with the trapezoidal
rule into watt-hours. Energy here means GPU energy only: CPU and DRAM draw
are not part of any trace and are therefore never included in a total.

Parsing and integration share no state, so independent files may be
processed concurrently.
"""

from __future__ import annotations

import io
import json
import math
import statistics
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import TraceError
from .quantities import DurationS, EnergyWh, PowerW

__all__ = [
    "PowerSample",
    "PowerTrace",
    "TraceBundle",
    "TraceGapWarning",
    "parse_trace",
    "integrate_trace",
    "bundle_energy",
    "load_bundle",
]

CSV_HEADER = "t_s,power_w"

#: An interval longer than this multiple of the median sampling interval is
#: integrated as a straight line but flagged, since silent extrapolation over
#: long gaps distorts totals.
DEFAULT_GAP_WARN_RATIO = 10.0


class TraceGapWarning(UserWarning):
    """A sampling gap much longer than the trace's typical interval."""


@dataclass(frozen=True)
class PowerSample:
    """One telemetry reading: time offset from trace start, and power."""

    t: DurationS
    p: PowerW

    @classmethod
    def of(cls, t_s: float, power_w: float) -> PowerSample:
        return cls(DurationS(t_s), PowerW(power_w))


@dataclass(frozen=True)
class PowerTrace:
    """All samples recorded for one device during one run.

    Timestamps must be non-decreasing; duplicates are allowed (real telemetry
    emits bursts) and contribute zero-width intervals. An empty trace is
    valid and integrates to zero.
    """

    device_id: str
    samples: tuple[PowerSample, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        prev = None
        for i, s in enumerate(self.samples):
            if prev is not None and s.t.value < prev:
                raise TraceError(
                    f"device {self.device_id!r}: timestamp {s.t.value} at sample {i} "
                    f"decreases from {prev}")
            prev = s.t.value

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> DurationS:
        if len(self.samples) < 2:
            return DurationS(0.0)
        return DurationS(self.samples[-1].t.value - self.samples[0].t.value)


@dataclass(frozen=True)
class TraceBundle:
    """The traces of every device attached during one run."""

    run_id: str
    traces: tuple[PowerTrace, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "traces", tuple(self.traces))
        seen = set()
        for t in self.traces:
            if t.device_id in seen:
                raise TraceError(f"bundle {self.run_id!r}: duplicate device_id {t.device_id!r}")
            seen.add(t.device_id)


def parse_trace(source, device_id: str = "gpu0", format: str = "csv") -> PowerTrace:
    """Parse a power trace from a byte or text stream.

    Accepts bytes, str, a binary/text file object, or a path. The only
    supported format is the documented CSV schema: header ``t_s,power_w``,
    one sample per row, ``.`` decimal point, UTF-8, LF or CRLF line ends.
    Malformed rows, decreasing timestamps and negative powers are rejected
    with the offending line number.
    """
    if format != "csv":
        raise TraceError(f"unsupported trace format {format!r}")
    text = _read_text(source)
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise TraceError(f"expected header {CSV_HEADER!r}", line=1)

    samples: list[PowerSample] = []
    prev_t: float | None = None
    for lineno, raw in enumerate(lines[1:], start=2):
        row = raw.strip()
        if not row:
            continue
        parts = row.split(",")
        if len(parts) != 2:
            raise TraceError(f"expected 2 fields, got {len(parts)}: {row!r}", line=lineno)
        try:
            t_s, power_w = float(parts[0]), float(parts[1])
        except ValueError:
            raise TraceError(f"non-numeric field in {row!r}", line=lineno) from None
        if not (math.isfinite(t_s) and math.isfinite(power_w)):
            raise TraceError(f"non-finite value in {row!r}", line=lineno)
        if t_s < 0:
            raise TraceError(f"negative timestamp {t_s}", line=lineno)
        if power_w < 0:
            raise TraceError(f"negative power {power_w}", line=lineno)
        if prev_t is not None and t_s < prev_t:
            raise TraceError(f"timestamp {t_s} decreases from {prev_t}", line=lineno)
        prev_t = t_s
        samples.append(PowerSample.of(t_s, power_w))
    return PowerTrace(device_id=device_id, samples=tuple(samples))


def integrate_trace(trace: PowerTrace,
                    gap_warn_ratio: float = DEFAULT_GAP_WARN_RATIO) -> EnergyWh:
    """Integrate a trace's power over time with the trapezoidal rule.

    Returns the energy in watt-hours; traces with fewer than two samples
    integrate to zero. Gaps are integrated as straight lines, with a
    :class:`TraceGapWarning` once any interval exceeds ``gap_warn_ratio``
    times the median interval.
    """
    n = len(trace.samples)
    if n < 2:
        return EnergyWh(0.0)
    dts = [trace.samples[i + 1].t.value - trace.samples[i].t.value for i in range(n - 1)]
    _warn_on_gaps(trace, dts, gap_warn_ratio)
    joules = math.fsum(
        0.5 * (trace.samples[i].p.value + trace.samples[i + 1].p.value) * dts[i]
        for i in range(n - 1))
    return EnergyWh(joules / 3600.0)


def _warn_on_gaps(trace: PowerTrace, dts: list[float], ratio: float) -> None:
    positive = [dt for dt in dts if dt > 0]
    if not positive or ratio <= 0:
        return
    median = statistics.median(positive)
    worst = max(positive)
    if median > 0 and worst > ratio * median:
        warnings.warn(
            f"device {trace.device_id!r}: sampling gap of {worst:g}s exceeds "
            f"{ratio:g}x the median interval ({median:g}s); the gap is integrated "
            "as a straight line",
            TraceGapWarning, stacklevel=3)


def bundle_energy(bundle: TraceBundle,
                  gap_warn_ratio: float = DEFAULT_GAP_WARN_RATIO) -> EnergyWh:
    """Total energy of a run: the sum of every device's integrated trace."""
    total = EnergyWh(0.0)
    for t in bundle.traces:
        total = total + integrate_trace(t, gap_warn_ratio=gap_warn_ratio)
    return total


def load_bundle(manifest_path: str | Path) -> TraceBundle:
    """Load a bundle manifest: JSON ``{run_id, traces: [{device_id, path}]}``.

    Trace paths are resolved relative to the manifest's directory. Extra
    top-level keys are tolerated (callers may attach run metadata) but each
    trace entry must have exactly ``device_id`` and ``path``.
    """
    manifest_path = Path(manifest_path)
    try:
        doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise TraceError(f"manifest not found: {manifest_path}") from None
    except json.JSONDecodeError as exc:
        raise TraceError(f"manifest {manifest_path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "run_id" not in doc or "traces" not in doc:
        raise TraceError(f"manifest {manifest_path} must be an object with run_id and traces")
    traces = []
    for entry in doc["traces"]:
        if set(entry) != {"device_id", "path"}:
            raise TraceError(f"trace entry must have exactly device_id and path, got {sorted(entry)}")
        path = manifest_path.parent / entry["path"]
        if not path.exists():
            raise TraceError(f"trace file not found: {path}")
        with open(path, "rb") as fh:
            traces.append(parse_trace(fh, device_id=entry["device_id"]))
    return TraceBundle(run_id=str(doc["run_id"]), traces=tuple(traces))


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, io.TextIOBase):
        return source.read()
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data
