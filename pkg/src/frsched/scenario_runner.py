"""End-to-end orchestration: build, solve, verify, and report scenarios.

A run builds the full scheduling MILP (unit commitment plus frequency
response) window by window with state carry-over, solves each window, then
replays every scheduled hour through the time-domain swing verifier. The cost
split follows the two-solve convention: the same scenario is solved once with
and once without the frequency-response constraints, the difference being the
balancing cost attributable to holding response.
"""

from __future__ import annotations

import json
import math
import csv as _csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import fr_requirements as frq
from . import uc_formulation as ucf
from .mip_interface import MipModel, ScipyBackend, SolverBackend, solve
from .swing_verifier import ComplianceReport, ResponsePortfolio, check_compliance, simulate
from .system_model import (FrequencyParams, InitialGroupState, Scenario,
                           validate_scenario)

HOURLY_BASE_COLUMNS = ["hour", "season", "demand_mw", "wind_mw", "solar_mw",
                       "interconnector_mw", "curtailment_mw", "inertia_mvas",
                       "pfr_req_mw", "sfr_req_mw", "binding", "cost"]


class ScenarioError(ValueError):
    """Scenario failed validation; message lists every violation."""


class SolverError(RuntimeError):
    """A window failed to solve; message carries the infeasibility diagnostic."""


class ComplianceError(RuntimeError):
    """A scheduled hour failed the time-domain swing check."""


@dataclass
class SolveSettings:
    backend: SolverBackend | None = None      # None -> in-process scipy/HiGHS
    gap_tolerance: float = 1e-4
    time_limit_s: float = 600.0               # per horizon window
    window_hours: int = 168
    n_segments: int = 16
    verify: bool = True
    verify_dt_s: float = 0.05
    verify_t_end_s: float = 120.0


@dataclass
class ScenarioResult:
    """Hour-indexed schedule plus totals for one solved scenario."""

    scenario_name: str
    efr_mw: float
    horizon: int
    seasons: tuple[str, ...]
    demand_mw: np.ndarray
    wind_mw: np.ndarray
    solar_mw: np.ndarray
    interconnector_mw: np.ndarray
    curtailment_mw: np.ndarray
    inertia_mvas: np.ndarray
    p_req_mw: np.ndarray
    s_req_mw: np.ndarray
    binding: tuple[str, ...]
    dispatch_mw: dict[str, np.ndarray]
    commitment: dict[str, np.ndarray]
    startups: dict[str, np.ndarray]
    pfr_thermal_mw: dict[str, np.ndarray]
    sfr_thermal_mw: dict[str, np.ndarray]
    charge_mw: dict[str, np.ndarray]
    discharge_mw: dict[str, np.ndarray]
    soc_mwh: dict[str, np.ndarray]
    pfr_storage_mw: dict[str, np.ndarray]
    sfr_storage_mw: dict[str, np.ndarray]
    hourly_cost: np.ndarray
    energy_cost: float
    balancing_cost: float
    total_cost: float
    freq: FrequencyParams
    solver: dict = field(default_factory=dict)
    compliance: tuple[ComplianceReport, ...] = ()


def build_scheduling_model(scenario: Scenario, include_fr: bool = True,
                           segments: frq.ChordSegmentSet | None = None,
                           name: str = "schedule") -> tuple[MipModel, ucf.UcVariableIndex]:
    """Assemble the full MILP for one (sub-)scenario."""
    m = MipModel(name)
    idx = ucf.register_variables(m, scenario, include_fr=include_fr)
    ucf.add_objective(m, idx, scenario)
    ucf.add_power_balance(m, idx, scenario)
    ucf.add_commitment_constraints(m, idx, scenario)
    ucf.add_ramp_constraints(m, idx, scenario)
    ucf.add_storage_constraints(m, idx, scenario)
    if include_fr:
        if segments is None:
            lo, hi = frq.possible_inertia_range(scenario)
            segments = frq.build_chord_segments(frq.nadir_constant(scenario.freq),
                                                lo, hi, 16)
        frq.add_inertia_expression(m, idx, scenario)
        frq.add_nadir_constraints(m, idx, scenario, segments)
        frq.add_qss_constraint(m, idx, scenario)
        frq.add_provision_limits(m, idx, scenario)
        frq.add_adequacy_constraints(m, idx, scenario)
    return m, idx


def _window_ranges(horizon: int, window_hours: int):
    for a in range(0, horizon, window_hours):
        yield a, min(a + window_hours, horizon)


def _slice_scenario(scenario: Scenario, a: int, b: int, initial_state) -> Scenario:
    prof = scenario.profile
    window = replace(prof, horizon=b - a, demand_mw=prof.demand_mw[a:b],
                     wind_mw=prof.wind_mw[a:b], solar_mw=prof.solar_mw[a:b],
                     interconnector_mw=prof.interconnector_mw[a:b])
    return replace(scenario, profile=window, initial_state=dict(initial_state))


def _diagnose_infeasible(scenario: Scenario, segments: frq.ChordSegmentSet | None,
                         include_fr: bool, offset: int) -> str:
    """Static per-hour screens to name the likely binding hour."""
    prof = scenario.profile
    fleet = sum(g.n_units * g.unit_capacity_mw for g in scenario.groups)
    p_charge = sum(s.p_charge_max_mw for s in scenario.storage)
    p_discharge = sum(s.p_discharge_max_mw for s in scenario.storage)
    must_run_floor = sum(g.n_units * g.msg_mw for g in scenario.groups if g.must_run)
    max_pfr = (sum(g.n_units * min(g.pfr_max_mw,
                                   g.governor_slope * (g.unit_capacity_mw - g.msg_mw))
                   for g in scenario.groups if not g.must_run)
               + sum(min(s.fr_max_mw, s.p_discharge_max_mw) for s in scenario.storage))
    max_sfr = (sum(g.n_units * min(g.sfr_max_mw, g.unit_capacity_mw - g.msg_mw)
                   for g in scenario.groups if not g.must_run)
               + sum(min(s.fr_max_mw, s.p_discharge_max_mw) for s in scenario.storage))
    freq = scenario.freq
    d_ref = scenario.damping_demand_series()
    hl = freq.load_inertia_s
    for t in range(prof.horizon):
        hour = offset + t + 1
        supply = (fleet + prof.wind_mw[t] + prof.solar_mw[t]
                  + prof.interconnector_mw[t] + p_discharge)
        if supply < prof.demand_mw[t] - 1e-9:
            return (f"hour {hour}: demand {prof.demand_mw[t]:.1f} MW exceeds "
                    f"maximum deliverable supply {supply:.1f} MW")
        absorb = prof.demand_mw[t] + p_charge - prof.interconnector_mw[t]
        if must_run_floor > absorb + 1e-9:
            return (f"hour {hour}: must-run minimum generation {must_run_floor:.1f} MW "
                    f"exceeds absorbable demand {absorb:.1f} MW")
        if include_fr and segments is not None:
            h_best = fleet_inertia(scenario) + prof.demand_mw[t] * hl
            p_need = max(segments.envelope(min(max(h_best, segments.h_min),
                                               segments.h_max)),
                         freq.infeed_loss_mw - freq.efr_mw
                         - freq.damping_per_hz * d_ref[t] * freq.nadir_deviation_hz)
            if p_need > max_pfr + 1e-9:
                return (f"hour {hour}: PFR requirement of at least {p_need:.1f} MW "
                        f"exceeds maximum fleet provision {max_pfr:.1f} MW")
            s_need = (freq.infeed_loss_mw
                      - freq.damping_per_hz * d_ref[t] * freq.qss_deviation_hz
                      - (freq.efr_mw if freq.efr_offsets_qss else 0.0))
            if s_need > max_sfr + 1e-9:
                return (f"hour {hour}: SFR requirement {s_need:.1f} MW exceeds "
                        f"maximum fleet provision {max_sfr:.1f} MW")
    return "no single-hour screen fired; cross-hour coupling (ramps, windows, storage)"


def fleet_inertia(scenario: Scenario) -> float:
    return sum(g.unit_capacity_mw * g.inertia_s * g.n_units for g in scenario.groups)


def _solve_horizon(scenario: Scenario, include_fr: bool,
                   segments: frq.ChordSegmentSet | None,
                   settings: SolveSettings) -> tuple[dict, list[dict]]:
    """Window loop with state carry-over; returns pooled values and window metadata."""
    backend = settings.backend or ScipyBackend()
    T = scenario.profile.horizon
    pooled: dict[str, float] = {}
    meta = []
    carry = {g.name: scenario.initial(g) for g in scenario.groups}
    for a, b in _window_ranges(T, settings.window_hours):
        sub = _slice_scenario(scenario, a, b, carry)
        model, idx = build_scheduling_model(sub, include_fr=include_fr,
                                            segments=segments,
                                            name=f"{scenario.name}_w{a:04d}")
        sol = solve(model, backend, settings.gap_tolerance, settings.time_limit_s)
        if not sol.ok:
            if sol.status == "infeasible":
                reason = _diagnose_infeasible(sub, segments, include_fr, a)
                raise SolverError(f"window hours {a + 1}..{b} infeasible: {reason}")
            raise SolverError(f"window hours {a + 1}..{b}: solver returned "
                              f"{sol.status}: {sol.detail}")
        def value_of(var_index: int) -> float:
            return sol.values[model.variables[var_index].name]

        for t in range(b - a):
            tg = a + t
            for g in idx.group_names:
                pooled[f"p_gen_t{tg:04d}_{g}"] = value_of(idx.p_gen[(t, g)])
                pooled[f"u_t{tg:04d}_{g}"] = value_of(idx.u[(t, g)])
            for s in idx.storage_names:
                pooled[f"p_charge_t{tg:04d}_{s}"] = value_of(idx.p_charge[(t, s)])
                pooled[f"p_discharge_t{tg:04d}_{s}"] = value_of(idx.p_discharge[(t, s)])
                pooled[f"soc_t{tg:04d}_{s}"] = value_of(idx.soc[(t, s)])
            pooled[f"curtail_t{tg:04d}"] = value_of(idx.curtail[t])
            if include_fr:
                pooled[f"inertia_t{tg:04d}"] = value_of(idx.inertia[t])
                for g in idx.group_names:
                    pooled[f"pfr_t{tg:04d}_{g}"] = value_of(idx.pfr_thermal[(t, g)])
                    pooled[f"sfr_t{tg:04d}_{g}"] = value_of(idx.sfr_thermal[(t, g)])
                for s in idx.storage_names:
                    pooled[f"pfr_t{tg:04d}_{s}"] = value_of(idx.pfr_storage[(t, s)])
                    pooled[f"sfr_t{tg:04d}_{s}"] = value_of(idx.sfr_storage[(t, s)])
        carry = {g.name: InitialGroupState(
                     int(round(pooled[f"u_t{b - 1:04d}_{g.name}"])),
                     pooled[f"p_gen_t{b - 1:04d}_{g.name}"])
                 for g in scenario.groups}
        meta.append({"window": [a + 1, b], "status": sol.status,
                     "objective": sol.objective, "mip_gap": sol.mip_gap,
                     "wall_time_s": round(sol.wall_time_s, 3)})
    return pooled, meta


def _recompute_costs(scenario: Scenario, commitment: dict[str, np.ndarray],
                     dispatch: dict[str, np.ndarray]) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Cost per hour rebuilt from the solution itself, plus minimal start counts."""
    T = scenario.profile.horizon
    cost = np.zeros(T)
    startups = {}
    for g in scenario.groups:
        u = commitment[g.name]
        prev = np.concatenate(([scenario.initial(g).units_online], u[:-1]))
        s_on = np.maximum(0, u - prev)
        startups[g.name] = s_on
        cost += g.startup_cost * s_on + g.no_load_cost * u + g.marginal_cost * dispatch[g.name]
    return cost, startups


def run_scenario(scenario: Scenario, efr_mw: float | None = None,
                 settings: SolveSettings | None = None,
                 precomputed_energy_cost: float | None = None) -> ScenarioResult:
    """Solve a scenario end to end and verify every hour against the swing check.

    efr_mw overrides the scenario's configured EFR capacity. The energy-only
    twin (same scenario, response constraints removed) prices the balancing
    split; it does not depend on the EFR level, so sweeps may pass its cost
    back in through precomputed_energy_cost instead of re-solving it. Raises
    ScenarioError on validation failures, SolverError on an infeasible or
    failed window, ComplianceError when a scheduled hour fails the
    time-domain check (unless settings.verify is off).
    """
    settings = settings or SolveSettings()
    violations = validate_scenario(scenario)
    if violations:
        raise ScenarioError("scenario invalid:\n  " + "\n  ".join(violations))
    freq = replace(scenario.freq,
                   efr_mw=scenario.freq.efr_mw if efr_mw is None else float(efr_mw),
                   damping_reference_mw=scenario.damping_reference_mw())
    scen = replace(scenario, freq=freq)
    lo, hi = frq.possible_inertia_range(scen)
    k = frq.nadir_constant(freq)
    if k > 0 and lo <= 0:
        raise ScenarioError("reachable system inertia can hit zero; the nadir "
                            "condition cannot be linearized (add must-run plant "
                            "or load inertia)")
    segments = (frq.build_chord_segments(k, lo, hi, settings.n_segments)
                if k > 0 else frq.build_chord_segments(0.0, max(lo, 1.0), max(hi, 2.0), 1))

    pooled, meta = _solve_horizon(scen, True, segments, settings)
    if precomputed_energy_cost is None:
        pooled_e, meta_e = _solve_horizon(scen, False, None, settings)
    else:
        pooled_e, meta_e = None, [{"reused": True}]

    T = scen.profile.horizon
    groups = [g.name for g in scen.groups]
    stores = [s.name for s in scen.storage]

    def series(source: dict, key: str, names) -> dict[str, np.ndarray]:
        return {n: np.array([source[f"{key}_t{t:04d}_{n}"] for t in range(T)])
                for n in names}

    dispatch = series(pooled, "p_gen", groups)
    commitment = {n: v.astype(int) for n, v in series(pooled, "u", groups).items()}
    pfr_th = series(pooled, "pfr", groups)
    sfr_th = series(pooled, "sfr", groups)
    charge = series(pooled, "p_charge", stores)
    discharge = series(pooled, "p_discharge", stores)
    soc = series(pooled, "soc", stores)
    pfr_st = series(pooled, "pfr", stores)
    sfr_st = series(pooled, "sfr", stores)
    curtail = np.array([pooled[f"curtail_t{t:04d}"] for t in range(T)])
    inertia = np.array([pooled[f"inertia_t{t:04d}"] for t in range(T)])

    breakdown = frq.requirement_breakdown(scen, inertia, segments)
    hourly_cost, startups = _recompute_costs(scen, commitment, dispatch)
    total_cost = float(hourly_cost.sum())

    if pooled_e is None:
        energy_cost = float(precomputed_energy_cost)
    else:
        dispatch_e = series(pooled_e, "p_gen", groups)
        commitment_e = {n: v.astype(int)
                        for n, v in series(pooled_e, "u", groups).items()}
        cost_e, _ = _recompute_costs(scen, commitment_e, dispatch_e)
        energy_cost = float(cost_e.sum())
    balancing_cost = total_cost - energy_cost

    compliance: list[ComplianceReport] = []
    if settings.verify:
        failures = []
        for t in range(T):
            portfolio = ResponsePortfolio(
                inertia_mvas=float(inertia[t]),
                demand_mw=float(scen.profile.demand_mw[t]),
                efr_mw=freq.efr_mw,
                pfr_mw=float(breakdown.p_req_mw[t]),
                sfr_mw=float(breakdown.s_req_mw[t]),
                infeed_loss_mw=freq.infeed_loss_mw,
                damping_per_hz=freq.damping_per_hz,
                nominal_hz=freq.nominal_hz,
                efr_delivery_s=freq.efr_delivery_s,
                pfr_delivery_s=freq.pfr_delivery_s)
            trace = simulate(portfolio, settings.verify_dt_s, settings.verify_t_end_s)
            report = check_compliance(trace, freq.nadir_deviation_hz,
                                      freq.qss_deviation_hz)
            compliance.append(report)
            if not report.passed:
                failures.append(f"hour {t + 1}: " + "; ".join(report.failures)
                                + f" (nadir margin {report.nadir_margin_hz:+.4f} Hz,"
                                  f" qss margin {report.qss_margin_hz:+.4f} Hz)")
        if failures:
            raise ComplianceError("swing verification failed:\n  "
                                  + "\n  ".join(failures))

    return ScenarioResult(
        scenario_name=scen.name, efr_mw=freq.efr_mw, horizon=T,
        seasons=tuple(scen.profile.season_labels()),
        demand_mw=scen.profile.demand_mw.copy(), wind_mw=scen.profile.wind_mw.copy(),
        solar_mw=scen.profile.solar_mw.copy(),
        interconnector_mw=scen.profile.interconnector_mw.copy(),
        curtailment_mw=curtail, inertia_mvas=inertia,
        p_req_mw=breakdown.p_req_mw, s_req_mw=breakdown.s_req_mw,
        binding=breakdown.binding,
        dispatch_mw=dispatch, commitment=commitment, startups=startups,
        pfr_thermal_mw=pfr_th, sfr_thermal_mw=sfr_th,
        charge_mw=charge, discharge_mw=discharge, soc_mwh=soc,
        pfr_storage_mw=pfr_st, sfr_storage_mw=sfr_st,
        hourly_cost=hourly_cost, energy_cost=energy_cost,
        balancing_cost=balancing_cost, total_cost=total_cost,
        freq=freq,
        solver={"backend": (settings.backend or ScipyBackend()).name,
                "windows": meta, "energy_only_windows": meta_e,
                "n_segments": segments.n_segments},
        compliance=tuple(compliance))


# ---------------------------------------------------------------------------
# Analyses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    efr_mw: float
    total_cost: float
    mean_p_req_mw: float
    mean_s_req_mw: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    results: dict[float, ScenarioResult]

    def cost(self, efr_mw: float) -> float:
        return next(r.total_cost for r in self.rows if r.efr_mw == efr_mw)

    def abatement(self, efr_mw: float) -> float:
        return self.cost(0.0) - self.cost(efr_mw)

    def per_mw_value(self, efr_mw: float) -> float:
        return self.abatement(efr_mw) / efr_mw if efr_mw > 0 else 0.0


def efr_sweep(scenario: Scenario, levels, settings: SolveSettings | None = None) -> SweepResult:
    """Solve the scenario at each EFR level (ascending, starting at 0)."""
    levels = [float(x) for x in levels]
    if levels != sorted(levels) or not levels or levels[0] != 0.0:
        raise ValueError("levels must be sorted ascending and include 0")
    rows, results = [], {}
    energy_cost = None
    for level in levels:
        res = run_scenario(scenario, efr_mw=level, settings=settings,
                           precomputed_energy_cost=energy_cost)
        energy_cost = res.energy_cost
        results[level] = res
        rows.append(SweepRow(level, res.total_cost, float(res.p_req_mw.mean()),
                             float(res.s_req_mw.mean())))
    return SweepResult(rows=rows, results=results)


@dataclass(frozen=True)
class SeasonRow:
    season: str
    hours: int
    p_req_before_mw: float
    p_req_after_mw: float
    p_offset_mw: float
    s_req_before_mw: float
    s_req_after_mw: float
    s_offset_mw: float


def seasonal_report(result_without: ScenarioResult,
                    result_with: ScenarioResult) -> list[SeasonRow]:
    """Per-season mean requirements before/after an EFR deployment."""
    if result_without.horizon != result_with.horizon:
        raise ValueError(f"horizon mismatch: {result_without.horizon} vs "
                         f"{result_with.horizon}")
    if result_without.seasons != result_with.seasons:
        raise ValueError("season labels differ between the two results")
    order = ["winter", "spring", "summer", "autumn"]
    rows = []
    labels = np.array(result_without.seasons)
    for season in order:
        mask = labels == season
        if not mask.any():
            continue
        pb = float(result_without.p_req_mw[mask].mean())
        pa = float(result_with.p_req_mw[mask].mean())
        sb = float(result_without.s_req_mw[mask].mean())
        sa = float(result_with.s_req_mw[mask].mean())
        rows.append(SeasonRow(season, int(mask.sum()), pb, pa, pb - pa,
                              sb, sa, sb - sa))
    return rows


@dataclass(frozen=True)
class EffectivenessGrid:
    """2-D binned view of PFR displaced per MW of EFR over (inertia, demand)."""

    h_edges: np.ndarray
    d_edges: np.ndarray
    mean_offset: np.ndarray     # (n_h, n_d); NaN where a bin is empty
    counts: np.ndarray
    h_d_correlation: float


def _edges(values: np.ndarray, n_bins: int) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return np.linspace(lo, hi, n_bins + 1)


def effectiveness_grid(result_without: ScenarioResult, result_with: ScenarioResult,
                       efr_mw: float, n_bins: int = 8) -> EffectivenessGrid:
    """Bin per-hour PFR offsets per MW of EFR by (inertia, demand)."""
    if efr_mw <= 0:
        raise ValueError("efr_mw must be positive")
    if result_without.horizon != result_with.horizon:
        raise ValueError("horizon mismatch")
    offsets = (result_without.p_req_mw - result_with.p_req_mw) / efr_mw
    h = result_without.inertia_mvas
    d = result_without.demand_mw
    h_edges = _edges(h, n_bins)
    d_edges = _edges(d, n_bins)
    hi = np.clip(np.digitize(h, h_edges) - 1, 0, n_bins - 1)
    di = np.clip(np.digitize(d, d_edges) - 1, 0, n_bins - 1)
    counts = np.zeros((n_bins, n_bins), dtype=int)
    sums = np.zeros((n_bins, n_bins))
    for i, j, x in zip(hi, di, offsets):
        counts[i, j] += 1
        sums[i, j] += x
    with np.errstate(invalid="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    if np.std(h) == 0 or np.std(d) == 0:
        corr = 0.0
    else:
        corr = float(np.corrcoef(h, d)[0, 1])
    return EffectivenessGrid(h_edges=h_edges, d_edges=d_edges, mean_offset=means,
                             counts=counts, h_d_correlation=corr)


# ---------------------------------------------------------------------------
# File output / reload
# ---------------------------------------------------------------------------

def write_summary_json(result: ScenarioResult, path) -> None:
    doc = {
        "scenario": result.scenario_name,
        "efr_mw": result.efr_mw,
        "horizon": result.horizon,
        "totals": {"energy_cost": result.energy_cost,
                   "balancing_cost": result.balancing_cost,
                   "total_cost": result.total_cost},
        "frequency": {
            "nominal_hz": result.freq.nominal_hz,
            "nadir_deviation_hz": result.freq.nadir_deviation_hz,
            "qss_deviation_hz": result.freq.qss_deviation_hz,
            "pfr_delivery_s": result.freq.pfr_delivery_s,
            "efr_delivery_s": result.freq.efr_delivery_s,
            "infeed_loss_mw": result.freq.infeed_loss_mw,
            "damping_per_hz": result.freq.damping_per_hz,
            "damping_reference_mw": result.freq.damping_reference_mw,
        },
        "requirements": {"mean_p_req_mw": float(result.p_req_mw.mean()),
                         "mean_s_req_mw": float(result.s_req_mw.mean()),
                         "max_p_req_mw": float(result.p_req_mw.max())},
        "inertia": {"min_gvas": float(result.inertia_mvas.min()) / 1000.0,
                    "mean_gvas": float(result.inertia_mvas.mean()) / 1000.0,
                    "max_gvas": float(result.inertia_mvas.max()) / 1000.0},
        "solver": result.solver,
        "verified_hours": len(result.compliance),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def hourly_columns(result: ScenarioResult) -> list[str]:
    cols = list(HOURLY_BASE_COLUMNS)
    for g in result.dispatch_mw:
        cols += [f"u_{g}", f"p_{g}", f"pfr_{g}", f"sfr_{g}"]
    for s in result.charge_mw:
        cols += [f"charge_{s}", f"discharge_{s}", f"soc_{s}", f"pfr_{s}", f"sfr_{s}"]
    return cols


def write_hourly_csv(result: ScenarioResult, path) -> None:
    """One row per hour; base columns first, then groups, then storage."""
    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(hourly_columns(result))
        for t in range(result.horizon):
            row = [t + 1, result.seasons[t], result.demand_mw[t], result.wind_mw[t],
                   result.solar_mw[t], result.interconnector_mw[t],
                   result.curtailment_mw[t], result.inertia_mvas[t],
                   result.p_req_mw[t], result.s_req_mw[t], result.binding[t],
                   result.hourly_cost[t]]
            for g in result.dispatch_mw:
                row += [int(result.commitment[g][t]), result.dispatch_mw[g][t],
                        result.pfr_thermal_mw[g][t], result.sfr_thermal_mw[g][t]]
            for s in result.charge_mw:
                row += [result.charge_mw[s][t], result.discharge_mw[s][t],
                        result.soc_mwh[s][t], result.pfr_storage_mw[s][t],
                        result.sfr_storage_mw[s][t]]
            writer.writerow([x if isinstance(x, (str, int)) else repr(float(x))
                             for x in row])


def write_result_files(result: ScenarioResult, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_summary_json(result, out / "summary.json")
    write_hourly_csv(result, out / "hourly.csv")


def write_sweep_csv(sweep: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["efr_mw", "total_cost", "cost_abatement",
                         "per_mw_value", "mean_p_req_mw", "mean_s_req_mw"])
        for row in sweep.rows:
            writer.writerow([row.efr_mw, repr(row.total_cost),
                             repr(sweep.abatement(row.efr_mw)),
                             repr(sweep.per_mw_value(row.efr_mw)),
                             repr(row.mean_p_req_mw), repr(row.mean_s_req_mw)])


def write_grid_csv(grid: EffectivenessGrid, path) -> None:
    """Plot-ready long format: one row per populated (inertia, demand) bin."""
    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["h_bin_low_mvas", "h_bin_high_mvas", "d_bin_low_mw",
                         "d_bin_high_mw", "count", "mean_offset_mw_per_mw"])
        n_h = len(grid.h_edges) - 1
        n_d = len(grid.d_edges) - 1
        for i in range(n_h):
            for j in range(n_d):
                mean = grid.mean_offset[i, j]
                writer.writerow([
                    repr(float(grid.h_edges[i])), repr(float(grid.h_edges[i + 1])),
                    repr(float(grid.d_edges[j])), repr(float(grid.d_edges[j + 1])),
                    int(grid.counts[i, j]),
                    "" if math.isnan(mean) else repr(float(mean))])


def verify_result_files(out_dir, dt: float = 0.05, t_end: float = 120.0):
    """Re-check a saved run: returns (hours checked, failure strings)."""
    out = Path(out_dir)
    with open(out / "summary.json") as fh:
        summary = json.load(fh)
    fq = summary["frequency"]
    failures = []
    checked = 0
    with open(out / "hourly.csv", newline="") as fh:
        reader = _csv.DictReader(fh)
        for row in reader:
            checked += 1
            portfolio = ResponsePortfolio(
                inertia_mvas=float(row["inertia_mvas"]),
                demand_mw=float(row["demand_mw"]),
                efr_mw=float(summary["efr_mw"]),
                pfr_mw=float(row["pfr_req_mw"]),
                sfr_mw=float(row["sfr_req_mw"]),
                infeed_loss_mw=float(fq["infeed_loss_mw"]),
                damping_per_hz=float(fq["damping_per_hz"]),
                nominal_hz=float(fq["nominal_hz"]),
                efr_delivery_s=float(fq["efr_delivery_s"]),
                pfr_delivery_s=float(fq["pfr_delivery_s"]))
            trace = simulate(portfolio, dt, t_end)
            report = check_compliance(trace, float(fq["nadir_deviation_hz"]),
                                      float(fq["qss_deviation_hz"]))
            if not report.passed:
                failures.append(f"hour {row['hour']}: " + "; ".join(report.failures))
    return checked, failures
