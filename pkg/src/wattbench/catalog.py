"""File-driven registries of GPUs, emission factors, benchmarks and models.

Catalogs are data, not code, so users can add GPUs or grid regions without
rebuilding; the bundled default covers the hardware and the three regional
energy mixes used by the reference dataset. Loaded catalogs are immutable
and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import CatalogError
from .quantities import TokenCount

__all__ = [
    "GpuSpec",
    "EmissionFactor",
    "SplitSpec",
    "BenchmarkSpec",
    "ModelSpec",
    "Catalog",
    "load_catalog",
    "default_catalog_path",
    "load_default_catalog",
    "active_params",
]


@dataclass(frozen=True)
class GpuSpec:
    """Published specifications for one GPU model.

    ``fp32_tflops`` is the vendor FP32 figure; ``tensor_flops_dense`` is the
    dense tensor-core peak in FLOP/s. The two come from different sources and
    measure different datapaths, so they are stored separately and never
    interconverted.
    """

    name: str
    architecture: str
    vram_gb: float
    fp32_tflops: float
    tensor_flops_dense: float | None = None
    notes: str = ""

    def __post_init__(self):
        for fname in ("vram_gb", "fp32_tflops", "tensor_flops_dense"):
            v = getattr(self, fname)
            if v is not None and v <= 0:
                raise CatalogError(f"gpu {self.name!r}: field {fname!r} must be > 0, got {v}")


@dataclass(frozen=True)
class EmissionFactor:
    """Grid intensity of a region, in grams CO2-equivalent per kWh."""

    region: str
    g_per_kwh: float

    def __post_init__(self):
        if self.g_per_kwh < 0:
            raise CatalogError(f"region {self.region!r}: field 'g_per_kwh' must be >= 0")


@dataclass(frozen=True)
class SplitSpec:
    """One benchmark split and the per-agent token totals consumed on it."""

    name: str
    token_totals: dict[str, TokenCount] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "token_totals",
            {str(k): TokenCount(v) for k, v in self.token_totals.items()})


@dataclass(frozen=True)
class BenchmarkSpec:
    """Task structure of a benchmark: how many tasks, actions per task, splits."""

    name: str
    task_count: int
    avg_actions_per_task: float
    splits: tuple[SplitSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.task_count <= 0:
            raise CatalogError(f"benchmark {self.name!r}: field 'task_count' must be > 0")
        if self.avg_actions_per_task <= 0:
            raise CatalogError(f"benchmark {self.name!r}: field 'avg_actions_per_task' must be > 0")
        object.__setattr__(self, "splits", tuple(self.splits))
        names = [s.name for s in self.splits]
        if len(names) != len(set(names)):
            raise CatalogError(f"benchmark {self.name!r}: duplicate split names in {names}")

    def split(self, name: str) -> SplitSpec:
        for s in self.splits:
            if s.name == name:
                return s
        raise KeyError(f"benchmark {self.name!r} has no split {name!r}")


@dataclass(frozen=True)
class ModelSpec:
    """Size and architecture of an LLM, enough to derive active parameters."""

    name: str
    kind: str  # "dense" | "mixture-of-experts"
    total_params: int
    experts: int | None = None
    params_per_expert: int | None = None
    experts_active: int | None = None
    max_input_tokens: TokenCount | None = None
    provenance: str = ""

    def __post_init__(self):
        if self.kind not in ("dense", "mixture-of-experts"):
            raise CatalogError(f"model {self.name!r}: field 'kind' must be dense or "
                               f"mixture-of-experts, got {self.kind!r}")
        if self.total_params <= 0:
            raise CatalogError(f"model {self.name!r}: field 'total_params' must be > 0")
        if self.kind == "mixture-of-experts":
            missing = [f for f in ("experts", "params_per_expert", "experts_active")
                       if getattr(self, f) is None]
            if missing:
                raise CatalogError(f"model {self.name!r}: mixture-of-experts requires {missing}")
            if self.experts_active > self.experts:
                raise CatalogError(f"model {self.name!r}: experts_active ({self.experts_active}) "
                                   f"exceeds experts ({self.experts})")
        if self.max_input_tokens is not None:
            object.__setattr__(self, "max_input_tokens", TokenCount(self.max_input_tokens))


def active_params(m: ModelSpec) -> int:
    """Parameters exercised per forward pass.

    Dense models use everything; mixture-of-experts models only route through
    the active experts, so the per-token cost scales with
    ``experts_active * params_per_expert`` rather than total size.
    """
    if m.kind == "dense":
        return m.total_params
    return m.experts_active * m.params_per_expert


@dataclass(frozen=True)
class Catalog:
    """An immutable registry of specs, keyed by name.

    Lookups are total over loaded keys; a missing key raises ``KeyError``
    rather than returning a default.
    """

    gpus: dict[str, GpuSpec] = field(default_factory=dict)
    emission_factors: dict[str, EmissionFactor] = field(default_factory=dict)
    benchmarks: dict[str, BenchmarkSpec] = field(default_factory=dict)
    models: dict[str, ModelSpec] = field(default_factory=dict)

    def gpu(self, name: str) -> GpuSpec:
        return self._get(self.gpus, name, "gpu")

    def emission_factor(self, region: str) -> EmissionFactor:
        return self._get(self.emission_factors, region, "emission factor")

    def benchmark(self, name: str) -> BenchmarkSpec:
        return self._get(self.benchmarks, name, "benchmark")

    def model(self, name: str) -> ModelSpec:
        return self._get(self.models, name, "model")

    @staticmethod
    def _get(table, key, what):
        try:
            return table[key]
        except KeyError:
            known = ", ".join(sorted(table)) or "<empty>"
            raise KeyError(f"unknown {what} {key!r}; catalog has: {known}") from None


_SECTIONS = {
    "gpus": (GpuSpec, "name"),
    "emission_factors": (EmissionFactor, "region"),
    "models": (ModelSpec, "name"),
}


def load_catalog(path: str | Path) -> Catalog:
    """Load and validate a catalog JSON file.

    The file has top-level keys ``gpus``, ``emission_factors``,
    ``benchmarks`` and ``models``, each a list of objects whose field names
    match the corresponding dataclasses. Duplicate keys and schema
    violations are rejected with the offending field named.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CatalogError(f"catalog file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise CatalogError(f"catalog {path} must be a JSON object")
    unknown = set(doc) - set(_SECTIONS) - {"benchmarks"}
    if unknown:
        raise CatalogError(f"catalog {path}: unknown top-level keys {sorted(unknown)}")

    tables: dict[str, dict] = {}
    for section, (cls, keyfield) in _SECTIONS.items():
        tables[section] = {}
        for entry in doc.get(section, []):
            spec = _build(cls, entry, section)
            key = getattr(spec, keyfield)
            if key in tables[section]:
                raise CatalogError(f"duplicate key {key!r} in section {section!r}")
            tables[section][key] = spec

    benchmarks: dict[str, BenchmarkSpec] = {}
    for entry in doc.get("benchmarks", []):
        entry = dict(entry)
        splits = [_build(SplitSpec, s, "benchmarks.splits") for s in entry.pop("splits", [])]
        spec = _build(BenchmarkSpec, {**entry, "splits": tuple(splits)}, "benchmarks")
        if spec.name in benchmarks:
            raise CatalogError(f"duplicate key {spec.name!r} in section 'benchmarks'")
        benchmarks[spec.name] = spec

    return Catalog(gpus=tables["gpus"], emission_factors=tables["emission_factors"],
                   benchmarks=benchmarks, models=tables["models"])


def _build(cls, entry: dict, section: str):
    if not isinstance(entry, dict):
        raise CatalogError(f"section {section!r}: entries must be objects, got {entry!r}")
    allowed = set(cls.__dataclass_fields__)
    unknown = set(entry) - allowed
    if unknown:
        raise CatalogError(f"section {section!r}: unknown field(s) {sorted(unknown)}")
    try:
        return cls(**entry)
    except TypeError as exc:
        raise CatalogError(f"section {section!r}: {exc}") from None


def default_catalog_path() -> Path:
    """Path of the catalog bundled with the package."""
    return Path(resources.files("wattbench").joinpath("data/catalog.json"))


def load_default_catalog() -> Catalog:
    return load_catalog(default_catalog_path())
