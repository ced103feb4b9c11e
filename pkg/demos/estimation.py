"""The two analytical estimation routes, side by side.

MindAct's per-action cost follows from its measured two-stage pipeline;
LASER's follows from first principles (active parameters -> FLOP -> compute
time -> effective GPU power), since GPT-4 cannot be benchmarked directly.
Both rounding modes are shown: 'exact' keeps intermediates at full
precision, 'paper' rounds the effective per-GPU power to one significant
figure the way the published reference estimates did.
"""

from wattbench.catalog import load_default_catalog
from wattbench.estimate import load_scenario, run_scenario
from wattbench.refdata import data_path


def main():
    catalog = load_default_catalog()
    for name in ("mindact", "laser"):
        scenario = load_scenario(data_path(f"scenarios/{name}.json"), catalog)
        print(f"=== {scenario.agent} ({scenario.mode} mode) ===")
        for rounding in ("paper", "exact"):
            from dataclasses import replace
            result = run_scenario(replace(scenario, rounding=rounding))
            print(f"  [{rounding:5s}] {result.energy_per_action.value:8.4f} Wh/action"
                  f" -> {result.energy_total.kwh:7.3f} kWh on {result.benchmark}")
        result = run_scenario(scenario)
        print("  assumptions:")
        for a in result.assumptions:
            print(f"    - {a}")
        print()

    print("the CLI equivalent:  wattbench estimate mindact")


if __name__ == "__main__":
    main()
