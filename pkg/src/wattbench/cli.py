"""Command-line frontend.

Subcommands tie the library into workflows: ``integrate`` turns trace
bundles into run records, ``estimate`` evaluates an estimation scenario,
``report`` renders the efficiency / energy-per-token / CO2 tables with a
comparison footer, and ``validate-paper`` runs the golden-number regression
suite over the bundled reference dataset.

Exit codes are a stable contract: 0 success, 1 validation failure, 2
input/IO error. All commands are deterministic: identical inputs produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import carbon, estimate, measure, trace, validate
from .catalog import Catalog, load_catalog, load_default_catalog
from .errors import WattbenchError
from .quantities import EnergyWh, TokenCount
from .refdata import data_path, load_reference_data
from .report import FORMATS, ReportTable, render

CATALOG_ENV = "WATTBENCH_CATALOG"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WattbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wattbench",
        description="Energy and CO2 accounting for LLM-driven web agents")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", metavar="PATH",
                        help=f"catalog JSON (default: ${CATALOG_ENV} or the bundled catalog)")
    common.add_argument("--format", choices=FORMATS, default="markdown",
                        help="output format (default: markdown)")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", parents=[common],
                       help="integrate trace bundles into run records")
    p.add_argument("manifests", nargs="+", metavar="MANIFEST",
                   help="bundle manifest JSON: {run_id, traces: [{device_id, path}]}")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("estimate", parents=[common],
                       help="run an estimation scenario")
    p.add_argument("scenario", metavar="SCENARIO",
                   help="scenario JSON path, or a bundled scenario name (mindact, laser)")
    p.add_argument("--rounding", choices=estimate.ROUNDING_MODES, default=None,
                   help="override the scenario's rounding mode")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("report", parents=[common],
                       help="render efficiency, energy-per-token and CO2 tables")
    p.add_argument("--runs", metavar="PATH", action="append", default=None,
                   help="run-record CSV (repeatable; default: the bundled fixtures)")
    p.add_argument("--ssr", metavar="PATH", default=None,
                   help="SSR CSV agent,avg_ssr (default: bundled)")
    p.add_argument("--tokens", metavar="PATH", default=None,
                   help="token-totals JSON {totals: {agent: {split: N}}} "
                        "(default: the catalog benchmark)")
    p.add_argument("--gpu", default=None,
                   help="GPU to report on (default: the reference dataset's default)")
    p.add_argument("--benchmark", default="mind2web")
    p.add_argument("--regions", default=None,
                   help="comma-separated emission-factor regions (default: all in catalog)")
    p.add_argument("--co2-rounding", choices=carbon.ROUNDING_POLICIES, default="floor")
    p.add_argument("--car-g-per-km", type=float, default=carbon.DEFAULT_CAR_G_PER_KM,
                   help="car equivalence constant (default: %(default)s)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate-paper", parents=[common],
                       help="run the golden-number checks against the bundled dataset")
    p.add_argument("--list", action="store_true", help="list check names without judging them")
    p.set_defaults(func=cmd_validate_paper)
    return parser


def _resolve_catalog(args) -> Catalog:
    path = args.catalog or os.environ.get(CATALOG_ENV)
    return load_catalog(path) if path else load_default_catalog()


def _emit(args, data: bytes) -> None:
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


# ---------------------------------------------------------------------------

def cmd_integrate(args) -> int:
    rows = []
    for manifest in args.manifests:
        bundle = trace.load_bundle(manifest)
        meta = _bundle_meta(manifest, bundle.run_id)
        energy = trace.bundle_energy(bundle)
        spans = [(t.samples[0].t.value, t.samples[-1].t.value)
                 for t in bundle.traces if len(t) > 0]
        duration = max(e for _, e in spans) - min(s for s, _ in spans) if spans else 0.0
        rows.append([meta["agent"], meta["gpu"], meta["split"], str(meta["run_index"]),
                     repr(energy.value), repr(duration)])
    table = ReportTable(title="", columns=[(h, "") for h in measure.RUN_CSV_HEADER], rows=rows)
    if args.format == "csv":
        _emit(args, render(table, "csv"))
    else:
        _emit(args, render(table, args.format))
    return EXIT_OK


def _bundle_meta(manifest_path: str, run_id: str) -> dict:
    """Optional run metadata in the manifest; sensible defaults otherwise."""
    doc = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    return {
        "agent": doc.get("agent", run_id),
        "gpu": doc.get("gpu", "unknown"),
        "split": doc.get("split", "full"),
        "run_index": int(doc.get("run_index", 1)),
    }


def cmd_estimate(args) -> int:
    catalog = _resolve_catalog(args)
    path = Path(args.scenario)
    if not path.exists():
        bundled = data_path(f"scenarios/{args.scenario}.json")
        if bundled.exists():
            path = bundled
    scenario = estimate.load_scenario(path, catalog)
    if args.rounding:
        import dataclasses
        scenario = dataclasses.replace(scenario, rounding=args.rounding)
    result = estimate.run_scenario(scenario)
    if args.format == "json":
        doc = {
            "agent": result.agent,
            "benchmark": result.benchmark,
            "energy_per_action_wh": result.energy_per_action.value,
            "energy_total_kwh": result.energy_total.kwh,
            "assumptions": list(result.assumptions),
        }
        _emit(args, (json.dumps(doc, indent=2) + "\n").encode())
        return EXIT_OK
    lines = [
        f"agent: {result.agent}",
        f"benchmark: {result.benchmark} ({result.task_count} tasks x "
        f"{result.avg_actions_per_task:g} actions/task)",
        f"energy per action: {result.energy_per_action.value:.2f} Wh "
        f"({result.energy_per_action.value:.6g} Wh unrounded)",
        f"energy total: {result.energy_total.kwh:.2f} kWh "
        f"({result.energy_total.kwh:.6g} kWh unrounded)",
        "assumptions:",
    ]
    lines += [f"  - {a}" for a in result.assumptions]
    _emit(args, ("\n".join(lines) + "\n").encode())
    return EXIT_OK


def cmd_report(args) -> int:
    catalog = _resolve_catalog(args)
    ref = load_reference_data()
    gpu = args.gpu or ref.default_gpu

    run_paths = args.runs or [str(data_path("runs_full.csv")), str(data_path("runs_splits.csv"))]
    records: list[measure.RunRecord] = []
    for p in run_paths:
        records.extend(measure.read_run_records(p))
    ssr = measure.read_ssr_file(args.ssr or data_path("ssr.csv"))
    token_totals = _load_token_totals(args.tokens, catalog, args.benchmark)
    regions = ([r.strip() for r in args.regions.split(",")] if args.regions
               else list(catalog.emission_factors))
    factors = [catalog.emission_factor(r) for r in regions]

    gpu_records = [r for r in records if r.gpu == gpu]
    if not gpu_records:
        known = sorted({r.gpu for r in records})
        raise WattbenchError(f"no run records for gpu {gpu!r}; records cover: {known}")
    full_groups, split_groups = _partition_runs(gpu_records)
    missing = sorted({a for (a, _, _) in full_groups} - set(ssr))
    if missing:
        raise WattbenchError(f"agents missing from the SSR file: {missing}")

    tables = [
        _efficiency_table(full_groups, ssr, gpu),
        _energy_per_token_table(split_groups, token_totals, gpu),
        _carbon_table(full_groups, factors, args.co2_rounding, gpu, ref),
    ]
    footer = _comparison_footer(full_groups, ref, args.car_g_per_km, factors,
                                args.co2_rounding)

    if args.format == "json":
        doc = {"tables": [json.loads(render(t, "json")) for t in tables],
               "comparison": footer}
        _emit(args, (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8"))
        return EXIT_OK
    if args.format == "csv":
        blobs = [render(t, "csv") for t in tables]
        _emit(args, b"\r\n".join(blobs))
        return EXIT_OK
    parts = [render(t, "markdown").decode("utf-8") for t in tables]
    parts.append("### Comparison\n\n" + "\n".join(f"- {line}" for line in footer) + "\n")
    _emit(args, "\n".join(parts).encode("utf-8"))
    return EXIT_OK


def _load_token_totals(path, catalog: Catalog, benchmark: str) -> dict[str, dict[str, int]]:
    """Token totals per agent and split, from a file or the catalog benchmark."""
    if path is None:
        bench = catalog.benchmark(benchmark)
        totals: dict[str, dict[str, int]] = {}
        for split in bench.splits:
            for agent, count in split.token_totals.items():
                totals.setdefault(agent, {})[split.name] = int(count)
        return totals
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or "totals" not in doc:
        raise WattbenchError(f"token-totals file {path} must be an object with a 'totals' key")
    return {str(agent): {str(split): int(n) for split, n in per.items()}
            for agent, per in doc["totals"].items()}


def _partition_runs(records):
    """Group records; synthesize whole-benchmark groups from splits if needed."""
    groups = measure.group_records(records)
    full = {k: v for k, v in groups.items() if k[2] == "full"}
    splits = {k: v for k, v in groups.items() if k[2] != "full"}
    if not full and splits:
        per_run: dict[tuple[str, str, int], list[measure.RunRecord]] = {}
        for recs in splits.values():
            for r in recs:
                per_run.setdefault((r.agent, r.gpu, r.run_index), []).append(r)
        for (agent, gpu, idx), recs in sorted(per_run.items()):
            energy = EnergyWh(sum(r.energy.value for r in recs))
            duration = sum(r.duration.value for r in recs)
            full.setdefault((agent, gpu, "full"), []).append(
                measure.RunRecord(agent=agent, gpu=gpu, split="full", run_index=idx,
                                  energy=energy,
                                  duration=measure.DurationS(duration)))
    return full, splits


def _efficiency_table(full_groups, ssr, gpu) -> ReportTable:
    results = []
    for (agent, g, _), recs in sorted(full_groups.items()):
        energy = measure.aggregate_runs(recs).scaled(1e-3)  # Wh -> kWh columns
        time = measure.aggregate_values([r.duration.minutes for r in recs])
        results.append(measure.AgentResult(agent=agent, gpu=g, avg_ssr=ssr[agent],
                                           energy=energy, time=time))
    return measure.build_efficiency_table(results)


def _energy_per_token_table(split_groups, token_totals, gpu) -> ReportTable:
    from .report import format_uncertainty
    rows = []
    for (agent, g, split), recs in sorted(split_groups.items()):
        agg = measure.aggregate_runs(recs)
        tokens = token_totals.get(agent, {}).get(split)
        if tokens is None:
            raise WattbenchError(f"no token total for agent {agent!r} split {split!r}")
        ept = measure.energy_per_token(agg, TokenCount(tokens))
        rows.append([agent, split, f"{tokens / 1e6:.2f}",
                     format_uncertainty(agg.mean / 1000.0, agg.std / 1000.0, 3),
                     format_uncertainty(ept.mean_kwh, ept.std_kwh, 3)])
    return ReportTable(
        title=f"Energy per input token on {gpu}",
        columns=[("agent", ""), ("split", ""), ("tokens", "10^6"),
                 ("energy", "kWh"), ("energy/token", "kWh")],
        rows=rows,
        footnotes=["token totals depend on each agent's tokenizer"])


def _carbon_table(full_groups, factors, rounding, gpu, ref) -> ReportTable:
    energies = {}
    for (agent, _, _), recs in sorted(full_groups.items()):
        agg = measure.aggregate_runs(recs)
        energies[agent] = EnergyWh(agg.mean)
    estimated = {row["agent"]: EnergyWh(row["energy_kwh"] * 1000.0)
                 for row in ref.headline_carbon["estimated"]}
    table = carbon.carbon_table(energies, factors, estimated=estimated, rounding=rounding)
    return ReportTable(title=f"CO2-equivalent emissions ({gpu} benchmarked runs "
                             "and published estimates)",
                       columns=table.columns, rows=table.rows, footnotes=table.footnotes)


def _comparison_footer(full_groups, ref, car_g_per_km, factors, rounding) -> list[str]:
    lines = []
    ratios = ref.ratios
    r1 = ratios["estimate_vs_benchmark"]
    r2 = ratios["laser_vs_mindact_estimates"]
    lines.append(
        f"estimation vs benchmark (MindAct): {r1['numerator_kwh']:g} kWh estimated / "
        f"{r1['denominator_kwh']:g} kWh benchmarked = "
        f"{r1['numerator_kwh'] / r1['denominator_kwh']:.2f}x "
        f"(reference prose: a factor of {r1['prose_factor']})")
    lines.append(
        f"LASER vs MindAct estimates: {r2['numerator_kwh']:g} kWh / "
        f"{r2['denominator_kwh']:g} kWh = "
        f"{r2['numerator_kwh'] / r2['denominator_kwh']:.2f}x "
        f"(reference prose: approximately {r2['prose_factor']} times)")
    mindact = next(((a, g, s) for (a, g, s) in full_groups if a == "MindAct"), None)
    if mindact:
        bench_kwh = measure.aggregate_runs(full_groups[mindact]).mean / 1000.0
        lines.append(
            f"recomputed from these runs: MindAct benchmarked at {bench_kwh:.2f} kWh -> "
            f"estimate/benchmark = {r1['numerator_kwh'] / bench_kwh:.2f}x")
    eq = carbon.EquivalenceSpec(car_g_per_km=car_g_per_km)
    us = next((f for f in factors if f.region == "US"), None)
    if us is not None:
        grams = carbon.co2_grams(EnergyWh(r2["numerator_kwh"] * 1000.0), us, rounding)
        km = carbon.car_distance_km(grams, eq)
        lines.append(
            f"running the least efficient estimated agent once (US mix) emits {int(grams)} g "
            f"CO2e, about {carbon.format_car_km(km)} km driven by an average car")
    return lines


def cmd_validate_paper(args) -> int:
    catalog = _resolve_catalog(args)
    ctx = validate.ValidationContext(catalog=catalog)
    results = validate.run_checks(ctx)
    if args.list:
        _emit(args, ("\n".join(c.name for c in results) + "\n").encode())
        return EXIT_OK
    lines = [c.line() for c in results]
    failed = [c for c in results if not c.passed]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    _emit(args, ("\n".join(lines) + "\n").encode())
    return EXIT_VALIDATION if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
