"""Analytical energy estimators for web agents.

Two estimation routes are supported:

* **pipeline**: the agent's per-action inference structure is known (stages,
  calls per action, tokens per call) and each stage's energy per token has
  been measured, so the per-action energy is a sum of per-stage products.
* **flop**: the agent's model cannot be measured, so its per-token energy is
  derived from first principles: active parameters -> FLOP per token ->
  compute time on a given accelerator -> energy at an effective per-GPU
  power. The effective power folds data-center overhead and utilization
  derating into the server's nameplate rating.

Per-token energy derived this way is cluster-size invariant: running on k
GPUs draws k times the power for 1/k of the time.

Every estimate carries a non-empty list of the assumptions that produced it;
there is no assumption-free estimate. The ``rounding`` mode controls whether
intermediate values are kept exact or rounded the way the published
reference estimates rounded them (per-GPU power to one significant figure).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import BenchmarkSpec, Catalog, ModelSpec, active_params
from .errors import SchemaError
from .quantities import DurationS, EnergyWh, PowerW, TokenCount

__all__ = [
    "PipelineStage",
    "PipelineSpec",
    "PowerModel",
    "FlopEnergyModel",
    "EstimateResult",
    "ROUNDING_MODES",
    "flops_per_token",
    "token_compute_time",
    "effective_gpu_power",
    "flop_energy_per_token",
    "action_energy",
    "benchmark_energy",
    "estimate",
    "load_scenario",
    "run_scenario",
]

ROUNDING_MODES = ("exact", "paper")


@dataclass(frozen=True)
class PipelineStage:
    """One inference stage of an agent's per-action pipeline.

    ``tokens_per_call`` is the mean context size fed to the stage's model,
    ``calls_per_action`` how often the stage runs per action, and
    ``energy_per_token`` the stage's measured cost in Wh/token.
    """

    label: str
    model: str
    tokens_per_call: TokenCount
    calls_per_action: int
    energy_per_token: float

    def __post_init__(self):
        object.__setattr__(self, "tokens_per_call", TokenCount(self.tokens_per_call))
        if self.tokens_per_call <= 0:
            raise SchemaError(f"stage {self.label!r}: tokens_per_call must be > 0")
        if self.calls_per_action < 1:
            raise SchemaError(f"stage {self.label!r}: calls_per_action must be >= 1")
        if self.energy_per_token <= 0:
            raise SchemaError(f"stage {self.label!r}: energy_per_token must be > 0")

    @property
    def energy(self) -> EnergyWh:
        """Wh this stage contributes to one action."""
        return EnergyWh(self.tokens_per_call * self.calls_per_action * self.energy_per_token)


@dataclass(frozen=True)
class PipelineSpec:
    """An agent's ordered inference stages."""

    agent: str
    stages: tuple[PipelineStage, ...]

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise SchemaError(f"pipeline for {self.agent!r} needs at least one stage")


@dataclass(frozen=True)
class PowerModel:
    """Effective per-GPU power during inference, from server nameplate data.

    ``overhead_fraction`` is non-GPU facility energy (cooling, power
    distribution) added on top of IT power; ``utilization_fraction`` derates
    the nameplate to the draw actually observed during inference.
    """

    server_power: PowerW
    gpus_per_server: int
    overhead_fraction: float
    utilization_fraction: float

    def __post_init__(self):
        if not isinstance(self.server_power, PowerW):
            object.__setattr__(self, "server_power", PowerW(self.server_power))
        if self.gpus_per_server < 1:
            raise SchemaError(f"gpus_per_server must be >= 1, got {self.gpus_per_server}")
        if not 0.0 <= self.overhead_fraction <= 1.0:
            raise SchemaError(f"overhead_fraction must be in [0, 1], got {self.overhead_fraction}")
        if not 0.0 < self.utilization_fraction <= 1.0:
            raise SchemaError(f"utilization_fraction must be in (0, 1], got {self.utilization_fraction}")


@dataclass(frozen=True)
class FlopEnergyModel:
    """Everything needed to derive Wh/token from model size and hardware.

    ``flop_multiplier`` is the FLOP per active parameter of one forward pass
    (2 under the standard multiply-accumulate estimate; configurable for
    sensitivity analysis). ``gpu_throughput`` is the dense tensor peak in
    FLOP/s of the accelerator assumed to serve the model.
    """

    model: ModelSpec
    gpu_throughput: float
    power_model: PowerModel
    flop_multiplier: float = 2.0
    paper_rounding: bool = False

    def __post_init__(self):
        if self.gpu_throughput <= 0:
            raise SchemaError(f"gpu_throughput must be > 0, got {self.gpu_throughput}")
        if self.flop_multiplier <= 0:
            raise SchemaError(f"flop_multiplier must be > 0, got {self.flop_multiplier}")


@dataclass(frozen=True)
class EstimateResult:
    """An agent's estimated per-action and whole-benchmark energy.

    ``assumptions`` records every input that shaped the estimate (token
    counts, power model, rounding mode, per-stage contributions) so results
    are traceable; it is never empty.
    """

    agent: str
    energy_per_action: EnergyWh
    energy_total: EnergyWh
    benchmark: str
    task_count: int
    avg_actions_per_task: float
    assumptions: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "assumptions", tuple(self.assumptions))
        if not self.assumptions:
            raise SchemaError("an estimate must record its assumptions")
        expected = self.energy_per_action.value * self.avg_actions_per_task * self.task_count
        if not math.isclose(self.energy_total.value, expected, rel_tol=1e-12, abs_tol=1e-12):
            raise SchemaError(
                f"energy_total {self.energy_total.value} != per-action x actions x tasks "
                f"({expected})")


def flops_per_token(m: FlopEnergyModel) -> float:
    """FLOP needed to push one token through one forward pass."""
    return m.flop_multiplier * active_params(m.model)


def token_compute_time(flops: float, throughput: float) -> DurationS:
    """Seconds to execute ``flops`` at ``throughput`` FLOP/s."""
    if throughput <= 0:
        raise SchemaError(f"throughput must be > 0, got {throughput}")
    return DurationS(flops / throughput)


def effective_gpu_power(p: PowerModel, paper_rounding: bool = False) -> PowerW:
    """Per-GPU power during inference.

    Nameplate server power is split across its GPUs, inflated by the
    facility overhead, then derated to inference utilization. With
    ``paper_rounding`` the result is rounded to one significant figure,
    matching the rounding used by the published reference estimates.
    """
    per_gpu = (p.server_power.value / p.gpus_per_server) \
        * (1.0 + p.overhead_fraction) * p.utilization_fraction
    if paper_rounding:
        per_gpu = _round_sig(per_gpu, 1)
    return PowerW(per_gpu)


def flop_energy_per_token(m: FlopEnergyModel) -> float:
    """Wh consumed per token: compute time times effective power."""
    t = token_compute_time(flops_per_token(m), m.gpu_throughput)
    p = effective_gpu_power(m.power_model, m.paper_rounding)
    return (p * t).value


def action_energy(p: PipelineSpec) -> EnergyWh:
    """Wh per agent action: the sum of all stage contributions."""
    total = EnergyWh(0.0)
    for stage in p.stages:
        total = total + stage.energy
    return total


def benchmark_energy(per_action: EnergyWh, b: BenchmarkSpec) -> EnergyWh:
    """Wh to run a whole benchmark at ``per_action`` Wh per action."""
    return EnergyWh(per_action.value * b.avg_actions_per_task * b.task_count)


def estimate(*, agent: str,
             benchmark: BenchmarkSpec,
             pipeline: PipelineSpec | None = None,
             flop_model: FlopEnergyModel | None = None,
             tokens_per_action: TokenCount | None = None,
             rounding: str = "exact",
             notes: tuple[str, ...] = ()) -> EstimateResult:
    """Estimate an agent's energy via exactly one of the two routes.

    Pipeline mode takes a :class:`PipelineSpec`; flop mode takes a
    :class:`FlopEnergyModel` plus the tokens processed per action. ``notes``
    carries caller-declared assumptions (token-count upper bounds and the
    like) into the result's assumptions list.
    """
    if rounding not in ROUNDING_MODES:
        raise SchemaError(f"rounding must be one of {ROUNDING_MODES}, got {rounding!r}")
    if (pipeline is None) == (flop_model is None):
        raise SchemaError("exactly one of pipeline or flop_model must be given")

    assumptions = [f"rounding mode: {rounding}",
                   f"benchmark: {benchmark.name} = {benchmark.task_count} tasks x "
                   f"{benchmark.avg_actions_per_task} actions/task"]
    assumptions += list(notes)

    if pipeline is not None:
        per_action = action_energy(pipeline)
        for s in pipeline.stages:
            assumptions.append(
                f"stage {s.label!r} ({s.model}): {int(s.tokens_per_call)} tokens/call x "
                f"{s.calls_per_action} calls x {s.energy_per_token:.6e} Wh/token "
                f"= {s.energy.value:.6f} Wh")
    else:
        if tokens_per_action is None:
            raise SchemaError("flop mode requires tokens_per_action")
        tokens_per_action = TokenCount(tokens_per_action)
        if tokens_per_action <= 0:
            raise SchemaError("tokens_per_action must be > 0")
        flop_model = dataclasses.replace(flop_model, paper_rounding=(rounding == "paper"))
        n_active = active_params(flop_model.model)
        flops = flops_per_token(flop_model)
        t = token_compute_time(flops, flop_model.gpu_throughput)
        power = effective_gpu_power(flop_model.power_model, flop_model.paper_rounding)
        e_token = flop_energy_per_token(flop_model)
        per_action = EnergyWh(tokens_per_action * e_token)
        pm = flop_model.power_model
        assumptions += [
            f"model {flop_model.model.name}: {n_active:.4g} active parameters "
            f"({flop_model.model.kind})",
            f"forward-pass cost: {flop_model.flop_multiplier:g} FLOP/parameter -> "
            f"{flops:.4g} FLOP/token",
            f"accelerator throughput: {flop_model.gpu_throughput:.4g} FLOP/s -> "
            f"{t.value:.4g} s/token",
            f"power model: {pm.server_power.value:g} W / {pm.gpus_per_server} GPUs, "
            f"overhead {pm.overhead_fraction:g}, utilization {pm.utilization_fraction:g} "
            f"-> {power.value:g} W effective",
            f"energy per token: {e_token:.6e} Wh",
            f"tokens per action: {int(tokens_per_action)}",
        ]

    total = benchmark_energy(per_action, benchmark)
    return EstimateResult(
        agent=agent, energy_per_action=per_action, energy_total=total,
        benchmark=benchmark.name, task_count=benchmark.task_count,
        avg_actions_per_task=benchmark.avg_actions_per_task,
        assumptions=tuple(assumptions))


def _round_sig(x: float, sig: int) -> float:
    if x == 0:
        return 0.0
    exponent = math.floor(math.log10(abs(x)))
    return round(x, sig - 1 - exponent)


# ---------------------------------------------------------------------------
# Scenario files: JSON descriptions of one estimation, resolved via a catalog.

_SCENARIO_KEYS = {"agent", "mode", "stages", "flop", "tokens_per_action", "benchmark",
                  "rounding", "notes"}
_STAGE_KEYS = {"label", "model", "tokens_per_call", "calls_per_action", "energy_per_token_wh"}
_FLOP_KEYS = {"model", "gpu", "power_model", "flop_multiplier"}
_POWER_KEYS = {"server_power_w", "gpus_per_server", "overhead_fraction", "utilization_fraction"}


@dataclass(frozen=True)
class Scenario:
    agent: str
    mode: str
    benchmark: BenchmarkSpec
    rounding: str = "exact"
    pipeline: PipelineSpec | None = None
    flop_model: FlopEnergyModel | None = None
    tokens_per_action: TokenCount | None = None
    notes: tuple[str, ...] = ()  # scenario-declared assumptions, e.g. upper bounds


def load_scenario(path: str | Path, catalog: Catalog) -> Scenario:
    """Load an estimation scenario JSON, resolving names through the catalog."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SchemaError(f"scenario file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"scenario {path} is not valid JSON: {exc}") from None

    unknown = set(doc) - _SCENARIO_KEYS
    if unknown:
        raise SchemaError(f"scenario {path}: unknown keys {sorted(unknown)}")
    for req in ("agent", "mode", "benchmark"):
        if req not in doc:
            raise SchemaError(f"scenario {path}: missing key {req!r}")
    mode = doc["mode"]
    if mode not in ("pipeline", "flop"):
        raise SchemaError(f"scenario {path}: mode must be pipeline or flop, got {mode!r}")
    rounding = doc.get("rounding", "exact")
    if rounding not in ROUNDING_MODES:
        raise SchemaError(f"scenario {path}: rounding must be one of {ROUNDING_MODES}")
    notes = doc.get("notes", [])
    if not isinstance(notes, list) or not all(isinstance(n, str) for n in notes):
        raise SchemaError(f"scenario {path}: notes must be a list of strings")
    notes = tuple(notes)
    benchmark = catalog.benchmark(doc["benchmark"])

    if mode == "pipeline":
        stages_doc = doc.get("stages", [])
        if not stages_doc:
            raise SchemaError(f"scenario {path}: pipeline mode needs at least one stage")
        stages = []
        for s in stages_doc:
            unknown = set(s) - _STAGE_KEYS
            if unknown:
                raise SchemaError(f"scenario {path}: unknown stage keys {sorted(unknown)}")
            stages.append(PipelineStage(
                label=s["label"], model=s.get("model", ""),
                tokens_per_call=TokenCount(s["tokens_per_call"]),
                calls_per_action=int(s["calls_per_action"]),
                energy_per_token=float(s["energy_per_token_wh"])))
        return Scenario(agent=doc["agent"], mode=mode, benchmark=benchmark, rounding=rounding,
                        pipeline=PipelineSpec(agent=doc["agent"], stages=tuple(stages)),
                        notes=notes)

    flop_doc = doc.get("flop")
    if not flop_doc:
        raise SchemaError(f"scenario {path}: flop mode needs a 'flop' object")
    unknown = set(flop_doc) - _FLOP_KEYS
    if unknown:
        raise SchemaError(f"scenario {path}: unknown flop keys {sorted(unknown)}")
    if "tokens_per_action" not in doc:
        raise SchemaError(f"scenario {path}: flop mode needs tokens_per_action")
    power_doc = flop_doc.get("power_model", {})
    unknown = set(power_doc) - _POWER_KEYS
    if unknown:
        raise SchemaError(f"scenario {path}: unknown power_model keys {sorted(unknown)}")
    model = catalog.model(flop_doc["model"])
    gpu = catalog.gpu(flop_doc["gpu"])
    if gpu.tensor_flops_dense is None:
        raise SchemaError(f"scenario {path}: gpu {gpu.name!r} has no tensor_flops_dense rating")
    power = PowerModel(
        server_power=PowerW(float(power_doc["server_power_w"])),
        gpus_per_server=int(power_doc["gpus_per_server"]),
        overhead_fraction=float(power_doc["overhead_fraction"]),
        utilization_fraction=float(power_doc["utilization_fraction"]))
    flop_model = FlopEnergyModel(
        model=model, gpu_throughput=gpu.tensor_flops_dense, power_model=power,
        flop_multiplier=float(flop_doc.get("flop_multiplier", 2.0)))
    return Scenario(agent=doc["agent"], mode=mode, benchmark=benchmark, rounding=rounding,
                    flop_model=flop_model,
                    tokens_per_action=TokenCount(doc["tokens_per_action"]),
                    notes=notes)


def run_scenario(scenario: Scenario) -> EstimateResult:
    return estimate(agent=scenario.agent, benchmark=scenario.benchmark,
                    pipeline=scenario.pipeline, flop_model=scenario.flop_model,
                    tokens_per_action=scenario.tokens_per_action,
                    rounding=scenario.rounding, notes=scenario.notes)
