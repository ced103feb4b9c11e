"""From kilowatt-hours to grams of CO2 to kilometers driven.

The same energy translates to wildly different emissions depending on the
regional energy mix, which is why comparisons must name their grid
intensity. Distances use the average-passenger-car equivalence.
"""

from wattbench.carbon import car_distance_km, co2_grams, format_car_km
from wattbench.catalog import load_default_catalog
from wattbench.quantities import EnergyWh


def main():
    catalog = load_default_catalog()
    regions = ["Norway", "US", "Australia"]
    agents = {
        "AutoWebGLM (benchmarked)": 0.33,
        "Synatra (benchmarked)": 3.31,
        "LASER (estimated)": 99.21,
    }
    header = f"{'agent':28s}" + "".join(f"{r:>18s}" for r in regions)
    print(header)
    for agent, kwh in agents.items():
        energy = EnergyWh(kwh * 1000.0)
        cells = []
        for region in regions:
            grams = co2_grams(energy, catalog.emission_factor(region))
            km = format_car_km(car_distance_km(grams))
            cells.append(f"{int(grams):>8d} g {km:>4s} km")
        print(f"{agent:28s}" + "".join(f"{c:>18s}" for c in cells))

    print()
    grams = co2_grams(EnergyWh(99.21 * 1000.0), catalog.emission_factor("US"))
    print(f"one LASER pass over the benchmark at the US mix: {int(grams)} g CO2e,")
    print(f"about {format_car_km(car_distance_km(grams))} km in an average car")


if __name__ == "__main__":
    main()
