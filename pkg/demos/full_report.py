"""The full reporting pipeline over the bundled reference dataset.

Aggregates the bundled run fixtures, ranks agents by step success rate
against their energy cost, derives energy per token for every split, and
converts totals to CO2 under three energy mixes. Equivalent to the CLI's
``wattbench report``.
"""

from wattbench import carbon, measure
from wattbench.catalog import load_default_catalog
from wattbench.quantities import EnergyWh, TokenCount
from wattbench.refdata import build_run_records, load_reference_data
from wattbench.report import render


def main():
    catalog = load_default_catalog()
    ref = load_reference_data()
    gpu = ref.default_gpu

    full = measure.group_records(
        [r for r in build_run_records("full") if r.gpu == gpu])
    splits = measure.group_records(
        [r for r in build_run_records("splits") if r.gpu == gpu])

    results = []
    for (agent, g, _), recs in sorted(full.items()):
        results.append(measure.AgentResult(
            agent=agent, gpu=g, avg_ssr=ref.ssr[agent],
            energy=measure.aggregate_runs(recs).scaled(1e-3),
            time=measure.aggregate_values([r.duration.minutes for r in recs])))
    print(render(measure.build_efficiency_table(results), "markdown").decode())

    print("energy per token (cross-domain split):")
    for (agent, _, split), recs in sorted(splits.items()):
        if split != "cross-domain":
            continue
        agg = measure.aggregate_runs(recs)
        ept = measure.energy_per_token(agg, TokenCount(ref.token_total(agent, split)))
        print(f"  {agent:11s} {ept.mean_kwh * 1e9:8.2f} e-9 kWh/token")
    print()

    energies = {agent: EnergyWh(measure.aggregate_runs(recs).mean)
                for (agent, _, _), recs in sorted(full.items())}
    factors = [catalog.emission_factor(r) for r in ("Norway", "US", "Australia")]
    print(render(carbon.carbon_table(energies, factors), "markdown").decode())

    print("the CLI equivalent:  wattbench report")


if __name__ == "__main__":
    main()
