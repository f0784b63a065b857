import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from frsched import (FrequencyParams, GeneratorGroup, InitialGroupState,
                     Scenario, StorageUnit, Technology, TimeSeriesProfile)

REPO = Path(__file__).resolve().parents[1]
SCENARIO_DIR = REPO / "scenarios"


def ccgt_group(**overrides):
    base = dict(name="ccgt", technology=Technology.CCGT, unit_capacity_mw=500.0,
                n_units=2, marginal_cost=18.93, no_load_cost=2476.0,
                startup_cost=12564.0, msg_mw=200.0, startup_time_h=2,
                shutdown_time_h=2, ramp_up_mw=360.0, ramp_down_mw=360.0,
                governor_slope=0.4, inertia_s=6.0, pfr_max_mw=100.0,
                sfr_max_mw=150.0)
    base.update(overrides)
    return GeneratorGroup(**base)


def ocgt_group(**overrides):
    base = dict(name="ocgt", technology=Technology.OCGT, unit_capacity_mw=200.0,
                n_units=2, marginal_cost=39.54, no_load_cost=4809.0,
                startup_cost=0.0, msg_mw=0.0, startup_time_h=0, shutdown_time_h=0,
                ramp_up_mw=200.0, ramp_down_mw=200.0, governor_slope=0.6,
                inertia_s=6.0, pfr_max_mw=40.0, sfr_max_mw=80.0)
    base.update(overrides)
    return GeneratorGroup(**base)


def nuclear_group(**overrides):
    base = dict(name="nuclear", technology=Technology.NUCLEAR,
                unit_capacity_mw=1800.0, n_units=1, marginal_cost=7.1,
                no_load_cost=0.0, startup_cost=50548.0, msg_mw=1800.0,
                startup_time_h=0, shutdown_time_h=0, ramp_up_mw=0.0,
                ramp_down_mw=0.0, governor_slope=0.0, inertia_s=4.0,
                pfr_max_mw=0.0, sfr_max_mw=0.0)
    base.update(overrides)
    return GeneratorGroup(**base)


def phs_unit(**overrides):
    base = dict(name="phs", e_max_mwh=8000.0, e_min_mwh=1000.0,
                p_charge_max_mw=1500.0, p_discharge_max_mw=1500.0,
                one_way_efficiency=0.866, fr_max_mw=800.0, e_initial_mwh=4000.0)
    base.update(overrides)
    return StorageUnit(**base)


def flat_profile(T, demand, wind=0.0, solar=0.0, inter=0.0):
    return TimeSeriesProfile(horizon=T,
                             demand_mw=np.full(T, float(demand)),
                             wind_mw=np.full(T, float(wind)),
                             solar_mw=np.full(T, float(solar)),
                             interconnector_mw=np.full(T, float(inter)))


def quiet_freq(**overrides):
    """Frequency params scaled so a small test fleet can meet the requirements."""
    base = dict(infeed_loss_mw=50.0, damping_per_hz=0.0625,
                damping_reference_mw=480.0)   # D*d_ref = 30 MW/Hz, binary exact
    base.update(overrides)
    return FrequencyParams(**base)


def toy_day_scenario(T=24, demand=420.0, wind=30.0, **freq_overrides):
    """One CCGT group + pumped hydro; FR requirements easily met from storage."""
    prof = flat_profile(T, demand, wind=wind)
    phs = phs_unit(e_max_mwh=600.0, e_min_mwh=50.0, p_charge_max_mw=300.0,
                   p_discharge_max_mw=300.0, e_initial_mwh=300.0, fr_max_mw=300.0)
    return Scenario(name="toy_day", groups=(ccgt_group(n_units=1),), storage=(phs,),
                    profile=prof, freq=quiet_freq(**freq_overrides),
                    initial_state={"ccgt": InitialGroupState(1, 400.0)})


@pytest.fixture(scope="session")
def toy_week_scenario():
    from frsched import load_scenario
    return load_scenario(SCENARIO_DIR / "toy_week.yaml")


@pytest.fixture(scope="session")
def gb_baseline_scenario():
    from frsched import load_scenario
    return load_scenario(SCENARIO_DIR / "gb_baseline.yaml")
