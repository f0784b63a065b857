"""Regenerate the shipped scenario configs.

Run from the repo root: python scenarios/build_configs.py

Two configs are produced. `toy_week` is a 168 h, GB-flavoured system small
enough to solve on a desk in seconds per window; it is the workhorse for the
demos and the acceptance suite. `gb_baseline` is a fuller fleet whose
all-units-on inertia at peak demand lands near 340 GVA*s; it is used for
inertia calibration checks and model export, not for routine solving.

Damping calibration: the requirement floors use D * d_ref with D = 1/64 Hz^-1
(binary exact) and d_ref = 20608 MW, so D * d_ref = 322 MW/Hz holds exactly
in floating point and the quasi-steady-state floor is exactly
1320 - 322 * 0.5 = 1159 MW.
"""

from pathlib import Path

import numpy as np

from frsched import (FrequencyParams, GeneratorGroup, InitialGroupState,
                     Scenario, StorageUnit, Technology, TimeSeriesProfile,
                     save_scenario, validate_scenario)
from datetime import date

HERE = Path(__file__).parent


def thermal_fleet(n_nuclear=4, n_coal=8, n_ccgt=30, n_ocgt=10):
    nuclear = GeneratorGroup(
        name="nuclear", technology=Technology.NUCLEAR, unit_capacity_mw=1800.0,
        n_units=n_nuclear, marginal_cost=7.1, no_load_cost=0.0, startup_cost=50548.0,
        msg_mw=1800.0, startup_time_h=0, shutdown_time_h=0, ramp_up_mw=0.0,
        ramp_down_mw=0.0, governor_slope=0.0, inertia_s=4.0,
        pfr_max_mw=0.0, sfr_max_mw=0.0)
    coal = GeneratorGroup(
        name="coal", technology=Technology.COAL, unit_capacity_mw=500.0,
        n_units=n_coal, marginal_cost=19.8, no_load_cost=2071.0, startup_cost=21001.0,
        msg_mw=200.0, startup_time_h=4, shutdown_time_h=4, ramp_up_mw=200.0,
        ramp_down_mw=240.0, governor_slope=0.3, inertia_s=6.0,
        pfr_max_mw=50.0, sfr_max_mw=100.0)
    ccgt = GeneratorGroup(
        name="ccgt", technology=Technology.CCGT, unit_capacity_mw=500.0,
        n_units=n_ccgt, marginal_cost=18.93, no_load_cost=2476.0, startup_cost=12564.0,
        msg_mw=200.0, startup_time_h=2, shutdown_time_h=2, ramp_up_mw=360.0,
        ramp_down_mw=360.0, governor_slope=0.4, inertia_s=6.0,
        pfr_max_mw=60.0, sfr_max_mw=120.0)
    ocgt = GeneratorGroup(
        name="ocgt", technology=Technology.OCGT, unit_capacity_mw=200.0,
        n_units=n_ocgt, marginal_cost=39.54, no_load_cost=4809.0, startup_cost=0.0,
        msg_mw=0.0, startup_time_h=0, shutdown_time_h=0, ramp_up_mw=200.0,
        ramp_down_mw=200.0, governor_slope=0.6, inertia_s=6.0,
        pfr_max_mw=40.0, sfr_max_mw=80.0)
    return nuclear, coal, ccgt, ocgt


def toy_week() -> Scenario:
    T = 168
    t = np.arange(T)
    daily = np.sin(2 * np.pi * (t % 24 - 6) / 24.0)
    weekend = np.where((t // 24) >= 5, -1200.0, 0.0)
    demand = 20500 + 5600 * daily + weekend + 800 * np.sin(2 * np.pi * t / 168.0)
    rng = np.random.default_rng(7)
    wind = np.clip(3200 + 2600 * np.sin(2 * np.pi * (t + 30) / 90.0)
                   + rng.normal(0, 400, T), 100, None)
    solar = np.clip(2200 * np.sin(np.pi * ((t % 24) - 7) / 10.0), 0, None)
    solar[(t % 24) < 7] = 0.0
    solar[(t % 24) > 17] = 0.0
    inter = 500 * np.sin(2 * np.pi * t / 48.0)
    profile = TimeSeriesProfile(
        horizon=T, demand_mw=demand.round(1), wind_mw=wind.round(1),
        solar_mw=solar.round(1), interconnector_mw=inter.round(1),
        start_date=date(2025, 5, 29))
    freq = FrequencyParams(damping_per_hz=0.015625,       # 1/64, binary exact
                           damping_reference_mw=20608.0)  # 322 MW/Hz with D above
    phs = StorageUnit(name="phs", e_max_mwh=10000.0, e_min_mwh=1000.0,
                      p_charge_max_mw=2600.0, p_discharge_max_mw=2600.0,
                      one_way_efficiency=0.866, fr_max_mw=2000.0,
                      e_initial_mwh=5000.0)
    return Scenario(name="toy_week", groups=thermal_fleet(), storage=(phs,),
                    profile=profile, freq=freq,
                    initial_state={"ccgt": InitialGroupState(14, 4900.0)})


def gb_baseline() -> Scenario:
    """Fuller fleet: all-on inertia at peak demand sits within 5% of 340 GVA*s."""
    T = 48
    t = np.arange(T)
    demand = 38000 + 14000 * np.sin(2 * np.pi * (t % 24 - 6) / 24.0)
    wind = np.full(T, 6000.0)
    solar = np.zeros(T)
    inter = np.zeros(T)
    profile = TimeSeriesProfile(horizon=T, demand_mw=demand.round(1),
                                wind_mw=wind, solar_mw=solar,
                                interconnector_mw=inter,
                                start_date=date(2025, 1, 6))
    freq = FrequencyParams(damping_per_hz=0.015625, damping_reference_mw=20608.0)
    phs = StorageUnit(name="phs", e_max_mwh=26000.0, e_min_mwh=2000.0,
                      p_charge_max_mw=2800.0, p_discharge_max_mw=2800.0,
                      one_way_efficiency=0.866, fr_max_mw=2200.0,
                      e_initial_mwh=12000.0)
    groups = thermal_fleet(n_nuclear=5, n_coal=20, n_ccgt=60, n_ocgt=15)
    return Scenario(name="gb_baseline", groups=groups, storage=(phs,),
                    profile=profile, freq=freq,
                    initial_state={"ccgt": InitialGroupState(40, 16000.0)})


if __name__ == "__main__":
    for build in (toy_week, gb_baseline):
        scenario = build()
        problems = validate_scenario(scenario)
        assert not problems, problems
        save_scenario(scenario, HERE / f"{scenario.name}.yaml")
        print(f"wrote {HERE / scenario.name}.yaml "
              f"(+ {scenario.name}_profile.csv, {scenario.profile.horizon} h)")
