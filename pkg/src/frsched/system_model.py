"""Domain types, scenario configuration, and hourly time-series ingestion.

All types are plain frozen dataclasses, immutable after construction and safe
to share across concurrent scenario runs. Scenarios are stored as a YAML
config referencing a separate CSV for the hourly series (see README for the
schema); both round-trip losslessly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from enum import Enum
from pathlib import Path

import numpy as np
import yaml

PROFILE_COLUMNS = ["period", "demand_mw", "wind_mw", "solar_mw", "interconnector_mw"]

MODE_CONSTANT_REFERENCE = "constant_reference"
MODE_HOURLY = "hourly"


class ProfileError(ValueError):
    """Malformed or inconsistent time-series input."""


class ConfigError(ValueError):
    """Malformed scenario configuration."""


class Technology(str, Enum):
    NUCLEAR = "nuclear"
    COAL = "coal"
    CCGT = "ccgt"
    OCGT = "ocgt"


@dataclass(frozen=True)
class GeneratorGroup:
    """Aggregated thermal technology: economics, dynamics, FR capability.

    All power quantities are per unit of the group unless suffixed otherwise;
    a group dispatches `n_units` identical units as one integer block.
    """

    name: str
    technology: Technology
    unit_capacity_mw: float      # nameplate per unit
    n_units: int
    marginal_cost: float         # currency/MWh
    no_load_cost: float          # currency/h per online unit
    startup_cost: float          # currency per start
    msg_mw: float                # minimum stable generation per unit
    startup_time_h: int
    shutdown_time_h: int
    ramp_up_mw: float            # MW/h per online unit
    ramp_down_mw: float          # MW/h per online unit
    governor_slope: float        # fraction of headroom deliverable as PFR
    inertia_s: float             # inertia constant
    pfr_max_mw: float            # PFR cap per unit
    sfr_max_mw: float            # SFR cap per unit
    must_run: bool | None = None   # defaults to technology == nuclear

    def __post_init__(self):
        if self.must_run is None:
            object.__setattr__(self, "must_run", self.technology == Technology.NUCLEAR)


@dataclass(frozen=True)
class StorageUnit:
    name: str
    e_max_mwh: float
    e_min_mwh: float
    p_charge_max_mw: float
    p_discharge_max_mw: float
    one_way_efficiency: float    # applied once per direction; round trip is its square
    fr_max_mw: float             # joint PFR+SFR cap
    e_initial_mwh: float


@dataclass(frozen=True)
class TimeSeriesProfile:
    """Hourly series over the scheduling horizon (import positive on `interconnector_mw`)."""

    horizon: int
    demand_mw: np.ndarray
    wind_mw: np.ndarray
    solar_mw: np.ndarray
    interconnector_mw: np.ndarray
    start_date: date = date(2025, 1, 1)

    def __post_init__(self):
        for name in ("demand_mw", "wind_mw", "solar_mw", "interconnector_mw"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    def __eq__(self, other):
        if not isinstance(other, TimeSeriesProfile):
            return NotImplemented
        return (self.horizon == other.horizon
                and self.start_date == other.start_date
                and all(np.array_equal(getattr(self, n), getattr(other, n))
                        for n in ("demand_mw", "wind_mw", "solar_mw", "interconnector_mw")))

    def season_labels(self) -> list[str]:
        """Meteorological quarter per hour: winter, spring, summer, autumn."""
        names = {12: "winter", 1: "winter", 2: "winter",
                 3: "spring", 4: "spring", 5: "spring",
                 6: "summer", 7: "summer", 8: "summer",
                 9: "autumn", 10: "autumn", 11: "autumn"}
        return [names[(self.start_date + timedelta(hours=t)).month]
                for t in range(self.horizon)]


@dataclass(frozen=True)
class FrequencyParams:
    """Frequency-security parameters shared by the scheduler and the verifier."""

    nominal_hz: float = 50.0             # f_o
    nadir_deviation_hz: float = 0.8      # largest tolerated dip below nominal
    qss_deviation_hz: float = 0.5        # largest tolerated settling deviation
    pfr_delivery_s: float = 10.0         # PFR ramps linearly to full over this
    efr_delivery_s: float = 1.0          # EFR ramps linearly to full over this
    efr_mw: float = 0.0                  # deployed sub-second response capacity
    infeed_loss_mw: float = 1320.0       # dimensioning in-feed loss
    damping_per_hz: float = 0.0          # D: fractional load relief per Hz
    load_inertia_s: float = 1.0          # h_l: demand-side inertia constant
    damping_demand_mode: str = MODE_CONSTANT_REFERENCE
    damping_reference_mw: float | None = None   # defaults to mean demand
    efr_offsets_qss: bool = False        # opt-in: let EFR count against the QSS floor


@dataclass(frozen=True)
class InitialGroupState:
    units_online: int
    output_mw: float


@dataclass(frozen=True)
class Scenario:
    name: str
    groups: tuple[GeneratorGroup, ...]
    storage: tuple[StorageUnit, ...]
    profile: TimeSeriesProfile
    freq: FrequencyParams
    initial_state: dict[str, InitialGroupState] = field(default_factory=dict)

    def initial(self, group: GeneratorGroup) -> InitialGroupState:
        """Pre-horizon state; defaults to must-run groups fully on, others off."""
        if group.name in self.initial_state:
            return self.initial_state[group.name]
        if group.must_run:
            return InitialGroupState(group.n_units, group.n_units * group.unit_capacity_mw)
        return InitialGroupState(0, 0.0)

    def damping_reference_mw(self) -> float:
        """Reference demand used in the damping terms of the requirement floors."""
        if self.freq.damping_reference_mw is not None:
            return self.freq.damping_reference_mw
        return float(np.mean(self.profile.demand_mw))

    def damping_demand_series(self) -> np.ndarray:
        """Per-hour demand entering D*d*df terms, per damping_demand_mode."""
        if self.freq.damping_demand_mode == MODE_HOURLY:
            return self.profile.demand_mw.copy()
        return np.full(self.profile.horizon, self.damping_reference_mw())


# ---------------------------------------------------------------------------
# Time-series ingestion
# ---------------------------------------------------------------------------

def load_profiles(path, horizon: int, start_date: date = date(2025, 1, 1)) -> TimeSeriesProfile:
    """Read the hourly CSV (columns: period,demand_mw,wind_mw,solar_mw,interconnector_mw).

    The file must hold at least `horizon` rows; extra rows are ignored.
    Raises ProfileError naming the offending row on malformed or negative
    demand/wind/solar entries.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"profile file not found: {path}")
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != PROFILE_COLUMNS:
            raise ProfileError(f"{path}: header must be exactly {','.join(PROFILE_COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(PROFILE_COLUMNS):
                raise ProfileError(f"{path}: row {lineno}: expected "
                                   f"{len(PROFILE_COLUMNS)} columns, got {len(row)}")
            try:
                values = [float(cell) for cell in row[1:]]
            except ValueError as exc:
                raise ProfileError(f"{path}: row {lineno}: {exc}") from None
            for col, val in zip(PROFILE_COLUMNS[1:4], values[:3]):
                if val < 0:
                    raise ProfileError(f"{path}: row {lineno}: negative {col} ({val})")
            rows.append(values)
            if len(rows) == horizon:
                break
    if len(rows) < horizon:
        raise ProfileError(f"{path}: only {len(rows)} data rows, horizon needs {horizon}")
    data = np.array(rows, dtype=float)
    return TimeSeriesProfile(horizon=horizon, demand_mw=data[:, 0], wind_mw=data[:, 1],
                             solar_mw=data[:, 2], interconnector_mw=data[:, 3],
                             start_date=start_date)


def write_profile_csv(profile: TimeSeriesProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROFILE_COLUMNS)
        for t in range(profile.horizon):
            writer.writerow([t + 1, repr(float(profile.demand_mw[t])),
                             repr(float(profile.wind_mw[t])),
                             repr(float(profile.solar_mw[t])),
                             repr(float(profile.interconnector_mw[t]))])


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_scenario(scenario: Scenario) -> list[str]:
    """Check every type invariant plus a capacity feasibility pre-screen.

    Pure: returns the violation list, raises nothing.
    """
    out: list[str] = []
    seen = set()
    for g in scenario.groups:
        tag = f"group {g.name}"
        if g.name in seen:
            out.append(f"{tag}: duplicate name")
        seen.add(g.name)
        if not 0 <= g.msg_mw <= g.unit_capacity_mw:
            out.append(f"{tag}: msg exceeds capacity ({g.msg_mw} > {g.unit_capacity_mw})"
                       if g.msg_mw > g.unit_capacity_mw else f"{tag}: negative msg")
        if g.n_units < 1:
            out.append(f"{tag}: needs at least one unit")
        if g.startup_time_h < 0 or g.shutdown_time_h < 0:
            out.append(f"{tag}: negative start-up or shut-down time")
        if not 0 <= g.governor_slope <= 1:
            out.append(f"{tag}: governor slope outside [0, 1]")
        if g.inertia_s < 0:
            out.append(f"{tag}: negative inertia constant")
        if min(g.marginal_cost, g.no_load_cost, g.startup_cost) < 0:
            out.append(f"{tag}: negative cost")
        if g.ramp_up_mw < 0 or g.ramp_down_mw < 0:
            out.append(f"{tag}: negative ramp rate")
        if g.pfr_max_mw < 0 or g.sfr_max_mw < 0:
            out.append(f"{tag}: negative FR capability")
        if g.must_run != (g.technology == Technology.NUCLEAR):
            out.append(f"{tag}: must_run must hold exactly for nuclear groups")
    for s in scenario.storage:
        tag = f"storage {s.name}"
        if s.name in seen:
            out.append(f"{tag}: duplicate name")
        seen.add(s.name)
        if not s.e_min_mwh <= s.e_initial_mwh <= s.e_max_mwh:
            out.append(f"{tag}: initial energy outside [e_min, e_max]")
        if s.p_charge_max_mw < 0 or s.p_discharge_max_mw < 0:
            out.append(f"{tag}: negative power limit")
        if not 0 < s.one_way_efficiency <= 1:
            out.append(f"{tag}: one-way efficiency outside (0, 1]")
        if s.fr_max_mw < 0:
            out.append(f"{tag}: negative FR limit")

    p = scenario.profile
    for name in ("demand_mw", "wind_mw", "solar_mw", "interconnector_mw"):
        if len(getattr(p, name)) != p.horizon:
            out.append(f"profile: {name} has {len(getattr(p, name))} entries, horizon {p.horizon}")
    for name in ("demand_mw", "wind_mw", "solar_mw"):
        arr = getattr(p, name)
        if len(arr) and arr.min() < 0:
            out.append(f"profile: negative {name} at period {int(arr.argmin()) + 1}")

    f = scenario.freq
    if f.nominal_hz <= 0:
        out.append("freq: nominal frequency must be positive")
    if not 0 < f.qss_deviation_hz <= f.nadir_deviation_hz < f.nominal_hz:
        out.append("freq: need 0 < qss deviation <= nadir deviation < nominal "
                   f"(got {f.qss_deviation_hz}, {f.nadir_deviation_hz})")
    if not 0 < f.efr_delivery_s < f.pfr_delivery_s:
        out.append("freq: EFR delivery time must be positive and faster than PFR")
    if f.efr_mw < 0:
        out.append("freq: negative EFR capacity")
    if f.infeed_loss_mw <= 0:
        out.append("freq: in-feed loss must be positive")
    if f.damping_per_hz < 0:
        out.append("freq: negative damping")
    if f.load_inertia_s < 0:
        out.append("freq: negative load inertia constant")
    if f.damping_demand_mode not in (MODE_CONSTANT_REFERENCE, MODE_HOURLY):
        out.append(f"freq: unknown damping demand mode {f.damping_demand_mode!r}")

    for g in scenario.groups:
        init = scenario.initial(g)
        if init.units_online > g.n_units or init.units_online < 0:
            out.append(f"group {g.name}: initial online count {init.units_online} "
                       f"outside [0, {g.n_units}]")
        elif init.units_online > 0:
            lo = init.units_online * g.msg_mw
            hi = init.units_online * g.unit_capacity_mw
            if not lo - 1e-9 <= init.output_mw <= hi + 1e-9:
                out.append(f"group {g.name}: initial output {init.output_mw} outside "
                           f"[{lo}, {hi}]")
        elif init.output_mw != 0:
            out.append(f"group {g.name}: initial output nonzero with no unit online")

    if p.horizon:
        fleet = sum(g.n_units * g.unit_capacity_mw for g in scenario.groups)
        supply = (fleet + p.wind_mw.max() + p.solar_mw.max()
                  + max(0.0, float(p.interconnector_mw.max())))
        if supply < p.demand_mw.max():
            out.append(f"capacity pre-screen: max supply {supply} below "
                       f"max demand {p.demand_mw.max()}")
    return out


# ---------------------------------------------------------------------------
# Config round trip (YAML + sibling CSV)
# ---------------------------------------------------------------------------

def _group_to_dict(g: GeneratorGroup) -> dict:
    return {
        "name": g.name, "technology": g.technology.value,
        "unit_capacity_mw": g.unit_capacity_mw, "n_units": g.n_units,
        "marginal_cost": g.marginal_cost, "no_load_cost": g.no_load_cost,
        "startup_cost": g.startup_cost, "msg_mw": g.msg_mw,
        "startup_time_h": g.startup_time_h, "shutdown_time_h": g.shutdown_time_h,
        "ramp_up_mw": g.ramp_up_mw, "ramp_down_mw": g.ramp_down_mw,
        "governor_slope": g.governor_slope, "inertia_s": g.inertia_s,
        "pfr_max_mw": g.pfr_max_mw, "sfr_max_mw": g.sfr_max_mw,
        "must_run": g.must_run,
    }


def _storage_to_dict(s: StorageUnit) -> dict:
    return {"name": s.name, "e_max_mwh": s.e_max_mwh, "e_min_mwh": s.e_min_mwh,
            "p_charge_max_mw": s.p_charge_max_mw,
            "p_discharge_max_mw": s.p_discharge_max_mw,
            "one_way_efficiency": s.one_way_efficiency,
            "fr_max_mw": s.fr_max_mw, "e_initial_mwh": s.e_initial_mwh}


def _freq_to_dict(f: FrequencyParams) -> dict:
    return {"nominal_hz": f.nominal_hz, "nadir_deviation_hz": f.nadir_deviation_hz,
            "qss_deviation_hz": f.qss_deviation_hz, "pfr_delivery_s": f.pfr_delivery_s,
            "efr_delivery_s": f.efr_delivery_s, "efr_mw": f.efr_mw,
            "infeed_loss_mw": f.infeed_loss_mw, "damping_per_hz": f.damping_per_hz,
            "load_inertia_s": f.load_inertia_s,
            "damping_demand_mode": f.damping_demand_mode,
            "damping_reference_mw": f.damping_reference_mw,
            "efr_offsets_qss": f.efr_offsets_qss}


def save_scenario(scenario: Scenario, path) -> None:
    """Write `<path>` (YAML) plus a sibling `<stem>_profile.csv` with the series."""
    path = Path(path)
    csv_name = path.stem + "_profile.csv"
    write_profile_csv(scenario.profile, path.parent / csv_name)
    doc = {
        "name": scenario.name,
        "profile": {"csv": csv_name, "horizon": scenario.profile.horizon,
                    "start_date": scenario.profile.start_date.isoformat()},
        "frequency": _freq_to_dict(scenario.freq),
        "generators": [_group_to_dict(g) for g in scenario.groups],
        "storage": [_storage_to_dict(s) for s in scenario.storage],
        "initial_state": {name: {"units_online": st.units_online,
                                 "output_mw": st.output_mw}
                          for name, st in scenario.initial_state.items()},
    }
    with open(path, "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)


def load_scenario(path) -> Scenario:
    """Parse a scenario YAML written by save_scenario (schema in README)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"scenario file not found: {path}")
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    try:
        prof = doc["profile"]
        start = date.fromisoformat(str(prof.get("start_date", "2025-01-01")))
        profile = load_profiles(path.parent / prof["csv"], int(prof["horizon"]),
                                start_date=start)
        freq_doc = dict(doc.get("frequency", {}))
        freq = FrequencyParams(**freq_doc)
        groups = []
        for g in doc.get("generators", []):
            g = dict(g)
            g["technology"] = Technology(g["technology"])
            groups.append(GeneratorGroup(**g))
        storage = [StorageUnit(**dict(s)) for s in doc.get("storage", [])]
        initial = {name: InitialGroupState(int(st["units_online"]), float(st["output_mw"]))
                   for name, st in (doc.get("initial_state") or {}).items()}
        return Scenario(name=str(doc.get("name", path.stem)), groups=tuple(groups),
                        storage=tuple(storage), profile=profile, freq=freq,
                        initial_state=initial)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (ProfileError, FileNotFoundError)):
            raise
        raise ConfigError(f"{path}: {exc}") from exc
