"""Bundled demonstration inputs.

The literature parameter set (carrier fluid, sandy soil, 150 mm boreholes)
is combined with a synthetic cooling-dominated hourly load profile. The
internal borehole resistances are assumptions (0.10 and 0.30 (m K)/W), not
published values, and the load profile is a documented stand-in shaped like
a real building demand: heating peaks on winter mornings, larger cooling
peaks on summer afternoons, hourly noise from a fixed seed.
"""

import csv
import json
import os

import numpy as np

from .scenario import scenario_from_dict

DEMO_SEED = 20260101

# Square property variants [m side]: 1024, 1600 and 2304 m2.
SQUARE_SIDES = {"small": 32.0, "medium": 40.0, "large": 48.0}


def synthetic_annual_load(
    peak_heating_w=36_000.0, peak_cooling_w=73_000.0, seed=DEMO_SEED
):
    """One year of hourly building load [W], positive = heat extraction.

    Cooling dominates on an annual basis, so the ground accumulates heat
    over multi-year horizons.
    """
    hours = np.arange(8760)
    day = hours / 24.0
    hour_of_day = hours % 24
    season = np.cos(2.0 * np.pi * (day - 18.0) / 365.0)  # peak mid-January
    heat_env = np.clip(season, 0.0, None) ** 1.4
    cool_env = np.clip(-season, 0.0, None) ** 1.4
    daily_heat = 0.62 + 0.38 * np.cos(2.0 * np.pi * (hour_of_day - 7.0) / 24.0)
    daily_cool = 0.55 + 0.45 * np.cos(2.0 * np.pi * (hour_of_day - 15.0) / 24.0)
    rng = np.random.default_rng(seed)
    noise_heat = rng.uniform(0.75, 1.25, hours.size)
    noise_cool = rng.uniform(0.75, 1.25, hours.size)
    return (
        peak_heating_w * heat_env * daily_heat * noise_heat
        - peak_cooling_w * cool_env * daily_cool * noise_cool
    )


def square_domain_doc(side):
    return {"outer": [[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]], "holes": []}


def lshape_domain_doc():
    """64 x 48 m property with a 28 x 24 m notch and a building footprint."""
    return {
        "outer": [
            [0.0, 0.0], [64.0, 0.0], [64.0, 24.0],
            [36.0, 24.0], [36.0, 48.0], [0.0, 48.0],
        ],
        "holes": [[[8.0, 8.0], [18.0, 8.0], [18.0, 16.0], [8.0, 16.0]]],
    }


def demo_scenario_doc(domain_doc, profile_csv="annual_load.csv", years=20,
                      n_boreholes=25, description=None):
    return {
        "description": description
        or "demonstration scenario; internal borehole resistances are "
        "assumed values and the hourly load profile is synthetic",
        "soil": {
            "thermal_conductivity_w_per_m_k": 1.9,
            "thermal_diffusivity_m2_per_day": 0.08,
            "undisturbed_temperature_c": 15.0,
        },
        "fluid": {
            "specific_heat_j_per_kg_k": 4019.0,
            "density_kg_per_m3": 1026.0,
            "total_mass_flow_kg_per_s": 10.3397,
        },
        "borehole": {
            "radius_m": 0.075,
            "soil_resistance_m_k_per_w": 0.10,
            "interpipe_resistance_m_k_per_w": 0.30,
        },
        "layout": {
            "domain": domain_doc,
            "borehole_count": n_boreholes,
            "placement": {"seed": 1},
        },
        "load": {"profile_csv": profile_csv, "repeat_years": years},
        "limits": {"t_min_c": 4.0, "t_max_c": 25.0},
        "lengths": {"l_min_m": 20.0, "l_max_m": 300.0},
        "simulation": {"coarse_factor": 730},
    }


def demo_scenario(variant="medium", years=20, base_load_values=None):
    """In-memory demo scenario for one property variant.

    ``variant`` is one of "small", "medium", "large" or "lshape".
    """
    if variant == "lshape":
        domain_doc = lshape_domain_doc()
    else:
        domain_doc = square_domain_doc(SQUARE_SIDES[variant])
    doc = demo_scenario_doc(domain_doc, years=years)
    annual = base_load_values if base_load_values is not None else synthetic_annual_load()
    from .response import LoadProfile

    profile = LoadProfile(3600.0, np.tile(annual, years))
    return scenario_from_dict(doc, load_profile=profile)


def write_demo_inputs(directory, years=20):
    """Write the demo load CSV, domain files and scenario documents."""
    os.makedirs(directory, exist_ok=True)
    annual = synthetic_annual_load()
    csv_path = os.path.join(directory, "annual_load.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["hour", "power_w"])
        for hour, power in enumerate(annual):
            writer.writerow([hour, format(power, ".17g")])

    domains = {name: square_domain_doc(side) for name, side in SQUARE_SIDES.items()}
    domains["lshape"] = lshape_domain_doc()
    written = [csv_path]
    for name, domain_doc in domains.items():
        dom_path = os.path.join(directory, f"domain_{name}.json")
        with open(dom_path, "w", encoding="utf-8") as fh:
            json.dump(domain_doc, fh, indent=2)
            fh.write("\n")
        sc_path = os.path.join(directory, f"scenario_{name}.json")
        with open(sc_path, "w", encoding="utf-8") as fh:
            json.dump(demo_scenario_doc(domain_doc, years=years), fh, indent=2)
            fh.write("\n")
        written.extend([dom_path, sc_path])
    return written
