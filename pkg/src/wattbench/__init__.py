"""wattbench: energy and CO2 accounting for LLM-driven web agents.

Quantifies agent energy two ways: empirically, by integrating GPU power
traces recorded during benchmark runs, and analytically, by estimating from
model and hardware parameters. Converts either into CO2-equivalent emissions
under regional grid intensities and renders comparable efficiency reports.
"""

from .carbon import EquivalenceSpec, car_distance_km, carbon_table, co2_grams
from .catalog import (
    BenchmarkSpec,
    Catalog,
    EmissionFactor,
    GpuSpec,
    ModelSpec,
    SplitSpec,
    active_params,
    load_catalog,
    load_default_catalog,
)
from .errors import (
    CatalogError,
    DimensionError,
    MeasureError,
    QuantityError,
    SchemaError,
    TraceError,
    WattbenchError,
)
# the estimate() entry point stays in its submodule so the wattbench.estimate
# module itself is not shadowed by a same-named function
from .estimate import (
    EstimateResult,
    FlopEnergyModel,
    PipelineSpec,
    PipelineStage,
    PowerModel,
    action_energy,
    benchmark_energy,
    effective_gpu_power,
    flop_energy_per_token,
    flops_per_token,
    token_compute_time,
)
from .measure import (
    AgentResult,
    AggregateStat,
    RunRecord,
    aggregate_runs,
    build_efficiency_table,
    energy_per_token,
)
from .quantities import (
    DurationS,
    EnergyPerTokenWh,
    EnergyWh,
    GramsCO2e,
    PowerW,
    TokenCount,
    convert,
)
from .report import ReportTable, format_uncertainty, render
from .tokens import (
    ApproxScheme,
    TokenCountFile,
    count_tokens_approx,
    load_token_counts,
    mean_tokens,
)
from .trace import (
    PowerSample,
    PowerTrace,
    TraceBundle,
    bundle_energy,
    integrate_trace,
    parse_trace,
)

__version__ = "0.1.0"
