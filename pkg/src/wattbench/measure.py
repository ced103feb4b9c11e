"""Empirical metrics over benchmark runs.

Turns repeat measurements into mean +/- std aggregates, derives the
energy-per-token metric, and builds the agent-vs-SSR efficiency table.
Everything here is a pure function over immutable inputs; grouping by
(agent, gpu, split) can be parallelized freely.

The standard deviation is the sample estimator (n-1 denominator), the usual
choice for small repeat counts. Step success rate is always ingested from a
results file: computing it would require running the agents themselves,
which this toolkit deliberately does not do.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MeasureError, SchemaError
from .quantities import DurationS, EnergyPerTokenWh, EnergyWh, TokenCount
from .report import ReportTable

__all__ = [
    "RunRecord",
    "AggregateStat",
    "AgentResult",
    "aggregate_runs",
    "energy_per_token",
    "build_efficiency_table",
    "read_run_records",
    "read_ssr_file",
    "RUN_CSV_HEADER",
]

RUN_CSV_HEADER = ["agent", "gpu", "split", "run_index", "energy_wh", "duration_s"]


@dataclass(frozen=True)
class RunRecord:
    """One benchmark execution of one agent on one GPU and split."""

    agent: str
    gpu: str
    split: str
    run_index: int
    energy: EnergyWh
    duration: DurationS

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.agent, self.gpu, self.split)


@dataclass(frozen=True)
class AggregateStat:
    """Mean and sample standard deviation over n repeat runs."""

    mean: float
    std: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise MeasureError(f"aggregate needs n >= 1, got {self.n}")
        if self.std < 0:
            raise MeasureError(f"std must be >= 0, got {self.std}")
        if self.n == 1 and self.std != 0:
            raise MeasureError("a single run has no spread; std must be 0 when n=1")

    def scaled(self, factor: float) -> AggregateStat:
        return AggregateStat(self.mean * factor, self.std * abs(factor), self.n)


@dataclass(frozen=True)
class AgentResult:
    """One efficiency-table row: reported SSR plus measured cost.

    ``avg_ssr`` is in percent and comes from the agent's published results;
    ``energy`` is in kWh and ``time`` in minutes.
    """

    agent: str
    gpu: str
    avg_ssr: float
    energy: AggregateStat
    time: AggregateStat

    def __post_init__(self):
        if not 0.0 <= self.avg_ssr <= 100.0:
            raise MeasureError(f"agent {self.agent!r}: avg_ssr must be in [0, 100], "
                               f"got {self.avg_ssr}")


def aggregate_runs(records: list[RunRecord]) -> AggregateStat:
    """Aggregate the energies of repeat runs sharing one (agent, gpu, split).

    Returns the arithmetic mean and sample standard deviation in watt-hours.
    Empty input and mixed grouping keys are rejected.
    """
    if not records:
        raise MeasureError("cannot aggregate zero runs")
    keys = {r.key for r in records}
    if len(keys) > 1:
        raise MeasureError(f"records mix (agent, gpu, split) keys: {sorted(keys)}")
    indexes = [r.run_index for r in records]
    if len(indexes) != len(set(indexes)):
        raise MeasureError(f"duplicate run_index within group {keys.pop()}")
    values = np.array([r.energy.value for r in records], dtype=float)
    mean = float(values.mean())
    std = 0.0 if len(values) == 1 else float(values.std(ddof=1))
    return AggregateStat(mean=mean, std=std, n=len(values))


def aggregate_values(values: list[float]) -> AggregateStat:
    """aggregate_runs for bare numbers (used for durations and derived series)."""
    if not values:
        raise MeasureError("cannot aggregate zero values")
    arr = np.asarray(values, dtype=float)
    std = 0.0 if arr.size == 1 else float(arr.std(ddof=1))
    return AggregateStat(mean=float(arr.mean()), std=std, n=int(arr.size))


def energy_per_token(energy: AggregateStat, tokens: TokenCount) -> EnergyPerTokenWh:
    """Energy per input token, in Wh/token.

    ``energy`` is in Wh; the token total is treated as exact (zero variance),
    so both mean and std divide straight through. A zero token count has no
    defined per-token cost and is rejected.
    """
    tokens = TokenCount(tokens)
    if tokens == 0:
        raise MeasureError("energy per token is undefined for 0 tokens")
    return EnergyPerTokenWh(mean=energy.mean / tokens, std=energy.std / tokens)


def build_efficiency_table(results: list[AgentResult]) -> ReportTable:
    """The efficiency table: agents ranked by SSR, with energy and time.

    Rows are sorted by descending SSR; agents tied on SSR rank the lower
    energy first, rewarding efficiency. One row per agent (duplicates are
    rejected), all rows on the same GPU.
    """
    if not results:
        raise MeasureError("efficiency table needs at least one result")
    agents = [r.agent for r in results]
    if len(agents) != len(set(agents)):
        raise MeasureError(f"duplicate agent in efficiency table: {sorted(agents)}")
    gpus = {r.gpu for r in results}
    if len(gpus) > 1:
        raise MeasureError(f"efficiency table mixes GPUs: {sorted(gpus)}")

    ordered = sorted(results, key=lambda r: (-r.avg_ssr, r.energy.mean))
    rows = []
    for r in ordered:
        rows.append([
            r.agent,
            f"{r.avg_ssr:.2f}",
            _fixed_pm(r.energy.mean, r.energy.std, 2),
            _fixed_pm(r.time.mean, r.time.std, 1),
        ])
    return ReportTable(
        title=f"Web-agent efficiency on {gpus.pop()}",
        columns=[("agent", ""), ("avg_ssr", "%"), ("energy", "kWh"), ("time", "min")],
        rows=rows,
        footnotes=["rows sorted by descending SSR; ties broken by ascending energy"],
    )


def _fixed_pm(mean: float, std: float, decimals: int) -> str:
    if std == 0:
        return f"{mean:.{decimals}f}"
    return f"{mean:.{decimals}f} ± {std:.{decimals}f}"


def read_run_records(source) -> list[RunRecord]:
    """Read run records from CSV ``agent,gpu,split,run_index,energy_wh,duration_s``."""
    text = _read_text(source)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("run-record file is empty") from None
    if [h.strip() for h in header] != RUN_CSV_HEADER:
        raise SchemaError(f"run-record header must be {','.join(RUN_CSV_HEADER)!r}, "
                          f"got {','.join(header)!r}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 6:
            raise SchemaError(f"line {lineno}: expected 6 fields, got {len(row)}")
        agent, gpu, split, run_index, energy_wh, duration_s = row
        try:
            records.append(RunRecord(
                agent=agent.strip(), gpu=gpu.strip(), split=split.strip(),
                run_index=int(run_index),
                energy=EnergyWh(float(energy_wh)),
                duration=DurationS(float(duration_s))))
        except ValueError as exc:
            raise SchemaError(f"line {lineno}: {exc}") from None
    return records


def read_ssr_file(source) -> dict[str, float]:
    """Read reported step success rates from CSV ``agent,avg_ssr``."""
    text = _read_text(source)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("SSR file is empty") from None
    if [h.strip() for h in header] != ["agent", "avg_ssr"]:
        raise SchemaError(f"SSR header must be 'agent,avg_ssr', got {','.join(header)!r}")
    out: dict[str, float] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise SchemaError(f"line {lineno}: expected 2 fields, got {len(row)}")
        agent, ssr = row[0].strip(), float(row[1])
        if not 0.0 <= ssr <= 100.0:
            raise SchemaError(f"line {lineno}: avg_ssr must be in [0, 100], got {ssr}")
        if agent in out:
            raise SchemaError(f"line {lineno}: duplicate agent {agent!r}")
        out[agent] = ssr
    return out


def group_records(records: list[RunRecord]) -> dict[tuple[str, str, str], list[RunRecord]]:
    """Index records by their (agent, gpu, split) key, preserving order."""
    groups: dict[tuple[str, str, str], list[RunRecord]] = {}
    for r in records:
        groups.setdefault(r.key, []).append(r)
    return groups


def _read_text(source) -> str:
    """Paths are read from disk; file-like objects are read as-is."""
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    return Path(source).read_text(encoding="utf-8")
