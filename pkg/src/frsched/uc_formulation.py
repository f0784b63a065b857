"""Translate a Scenario into MIP variables and the unit-commitment constraints.

Each builder appends one constraint family to a MipModel through the shared
variable index: energy balance with renewable curtailment, integer commitment
with start/stop counting and minimum up/down windows, per-unit ramp limits
scaled by the online count, and storage energy accounting with one-way
efficiency applied on each leg.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .mip_interface import CONTINUOUS, INTEGER, MipModel
from .system_model import Scenario


@dataclass
class UcVariableIndex:
    """Variable-index lookup for one model build.

    Keys are (t, group_name) / (t, storage_name) / t with t zero-based.
    """

    horizon: int
    group_names: tuple[str, ...]
    storage_names: tuple[str, ...]
    include_fr: bool
    p_gen: dict = field(default_factory=dict)
    u: dict = field(default_factory=dict)
    s_on: dict = field(default_factory=dict)
    s_off: dict = field(default_factory=dict)
    p_charge: dict = field(default_factory=dict)
    p_discharge: dict = field(default_factory=dict)
    soc: dict = field(default_factory=dict)
    curtail: dict = field(default_factory=dict)
    p_req: dict = field(default_factory=dict)
    s_req: dict = field(default_factory=dict)
    inertia: dict = field(default_factory=dict)
    pfr_thermal: dict = field(default_factory=dict)
    sfr_thermal: dict = field(default_factory=dict)
    pfr_storage: dict = field(default_factory=dict)
    sfr_storage: dict = field(default_factory=dict)

    def count(self) -> int:
        return (len(self.p_gen) + len(self.u) + len(self.s_on) + len(self.s_off)
                + len(self.p_charge) + len(self.p_discharge) + len(self.soc)
                + len(self.curtail) + len(self.p_req) + len(self.s_req)
                + len(self.inertia) + len(self.pfr_thermal) + len(self.sfr_thermal)
                + len(self.pfr_storage) + len(self.sfr_storage))


def register_variables(m: MipModel, scenario: Scenario,
                       include_fr: bool = True) -> UcVariableIndex:
    """Register every decision variable with deterministic names and order.

    Commitment counts and start/stop counters are general integers in
    [0, n_units]; must-run groups get their count pinned by bounds.
    """
    T = scenario.profile.horizon
    idx = UcVariableIndex(horizon=T,
                          group_names=tuple(g.name for g in scenario.groups),
                          storage_names=tuple(s.name for s in scenario.storage),
                          include_fr=include_fr)
    prof = scenario.profile
    for t in range(T):
        for g in scenario.groups:
            idx.p_gen[(t, g.name)] = m.add_variable(
                f"p_gen_t{t:04d}_{g.name}", CONTINUOUS, 0.0,
                g.n_units * g.unit_capacity_mw)
            lo_u = g.n_units if g.must_run else 0
            idx.u[(t, g.name)] = m.add_variable(
                f"u_t{t:04d}_{g.name}", INTEGER, lo_u, g.n_units)
            idx.s_on[(t, g.name)] = m.add_variable(
                f"s_on_t{t:04d}_{g.name}", INTEGER, 0, g.n_units)
            idx.s_off[(t, g.name)] = m.add_variable(
                f"s_off_t{t:04d}_{g.name}", INTEGER, 0, g.n_units)
        for s in scenario.storage:
            idx.p_charge[(t, s.name)] = m.add_variable(
                f"p_charge_t{t:04d}_{s.name}", CONTINUOUS, 0.0, s.p_charge_max_mw)
            idx.p_discharge[(t, s.name)] = m.add_variable(
                f"p_discharge_t{t:04d}_{s.name}", CONTINUOUS, 0.0, s.p_discharge_max_mw)
            idx.soc[(t, s.name)] = m.add_variable(
                f"soc_t{t:04d}_{s.name}", CONTINUOUS, s.e_min_mwh, s.e_max_mwh)
        idx.curtail[t] = m.add_variable(
            f"curtail_t{t:04d}", CONTINUOUS, 0.0,
            float(prof.wind_mw[t] + prof.solar_mw[t]))
        if include_fr:
            idx.p_req[t] = m.add_variable(f"p_req_t{t:04d}", CONTINUOUS, 0.0)
            idx.s_req[t] = m.add_variable(f"s_req_t{t:04d}", CONTINUOUS, 0.0)
            idx.inertia[t] = m.add_variable(f"inertia_t{t:04d}", CONTINUOUS, 0.0)
            for g in scenario.groups:
                idx.pfr_thermal[(t, g.name)] = m.add_variable(
                    f"pfr_t{t:04d}_{g.name}", CONTINUOUS, 0.0,
                    g.n_units * g.pfr_max_mw)
                idx.sfr_thermal[(t, g.name)] = m.add_variable(
                    f"sfr_t{t:04d}_{g.name}", CONTINUOUS, 0.0,
                    g.n_units * g.sfr_max_mw)
            for s in scenario.storage:
                idx.pfr_storage[(t, s.name)] = m.add_variable(
                    f"pfr_t{t:04d}_{s.name}", CONTINUOUS, 0.0, s.fr_max_mw)
                idx.sfr_storage[(t, s.name)] = m.add_variable(
                    f"sfr_t{t:04d}_{s.name}", CONTINUOUS, 0.0, s.fr_max_mw)
    return idx


def add_objective(m: MipModel, idx: UcVariableIndex, scenario: Scenario) -> None:
    """Minimize total start-up, no-load, and marginal generation cost."""
    for t in range(scenario.profile.horizon):
        for g in scenario.groups:
            m.add_objective_term(idx.s_on[(t, g.name)], g.startup_cost)
            m.add_objective_term(idx.u[(t, g.name)], g.no_load_cost)
            m.add_objective_term(idx.p_gen[(t, g.name)], g.marginal_cost)


def add_power_balance(m: MipModel, idx: UcVariableIndex, scenario: Scenario) -> None:
    """thermal + discharge + import + wind + solar - curtailment = demand + charge."""
    prof = scenario.profile
    for t in range(prof.horizon):
        coeffs = {idx.curtail[t]: -1.0}
        for g in scenario.groups:
            coeffs[idx.p_gen[(t, g.name)]] = 1.0
        for s in scenario.storage:
            coeffs[idx.p_discharge[(t, s.name)]] = 1.0
            coeffs[idx.p_charge[(t, s.name)]] = -1.0
        rhs = float(prof.demand_mw[t] - prof.interconnector_mw[t]
                    - prof.wind_mw[t] - prof.solar_mw[t])
        m.add_constraint(f"balance_t{t:04d}", coeffs, "=", rhs)


def add_commitment_constraints(m: MipModel, idx: UcVariableIndex,
                               scenario: Scenario) -> None:
    """Generation limits tied to online counts, start/stop counting, and the
    minimum up/down windows (truncated at the horizon start; only the supplied
    pre-horizon state carries in)."""
    T = scenario.profile.horizon
    for g in scenario.groups:
        init = scenario.initial(g)
        for t in range(T):
            uv, gv = idx.u[(t, g.name)], idx.p_gen[(t, g.name)]
            m.add_constraint(f"msg_{g.name}_t{t:04d}",
                             {gv: 1.0, uv: -g.msg_mw}, ">=", 0.0)
            m.add_constraint(f"cap_{g.name}_t{t:04d}",
                             {gv: 1.0, uv: -g.unit_capacity_mw}, "<=", 0.0)
            # start/stop counters track the commitment delta from below
            if t == 0:
                m.add_constraint(f"start_{g.name}_t{t:04d}",
                                 {idx.s_on[(t, g.name)]: 1.0, uv: -1.0},
                                 ">=", -float(init.units_online))
                m.add_constraint(f"stop_{g.name}_t{t:04d}",
                                 {idx.s_off[(t, g.name)]: 1.0, uv: 1.0},
                                 ">=", float(init.units_online))
            else:
                up = idx.u[(t - 1, g.name)]
                m.add_constraint(f"start_{g.name}_t{t:04d}",
                                 {idx.s_on[(t, g.name)]: 1.0, uv: -1.0, up: 1.0},
                                 ">=", 0.0)
                m.add_constraint(f"stop_{g.name}_t{t:04d}",
                                 {idx.s_off[(t, g.name)]: 1.0, uv: 1.0, up: -1.0},
                                 ">=", 0.0)
            # units started in the preceding start-up window must still be on
            window = [tau for tau in range(max(0, t - g.startup_time_h + 1), t)]
            if window:
                coeffs = {uv: 1.0}
                for tau in window:
                    coeffs[idx.s_on[(tau, g.name)]] = -1.0
                m.add_constraint(f"min_up_{g.name}_t{t:04d}", coeffs, ">=", 0.0)
            # units stopped in the preceding shut-down window must still be off
            window = [tau for tau in range(max(0, t - g.shutdown_time_h + 1), t)]
            if window:
                coeffs = {uv: 1.0}
                for tau in window:
                    coeffs[idx.s_off[(tau, g.name)]] = 1.0
                m.add_constraint(f"min_down_{g.name}_t{t:04d}", coeffs,
                                 "<=", float(g.n_units))


def add_ramp_constraints(m: MipModel, idx: UcVariableIndex, scenario: Scenario) -> None:
    """Hour-to-hour output moves bounded by per-unit rates times the online count."""
    T = scenario.profile.horizon
    for g in scenario.groups:
        init = scenario.initial(g)
        for t in range(T):
            uv, gv = idx.u[(t, g.name)], idx.p_gen[(t, g.name)]
            if t == 0:
                m.add_constraint(f"ramp_up_{g.name}_t{t:04d}",
                                 {gv: 1.0, uv: -g.ramp_up_mw}, "<=",
                                 float(init.output_mw))
                m.add_constraint(f"ramp_dn_{g.name}_t{t:04d}",
                                 {gv: -1.0, uv: -g.ramp_down_mw}, "<=",
                                 -float(init.output_mw))
            else:
                gp = idx.p_gen[(t - 1, g.name)]
                m.add_constraint(f"ramp_up_{g.name}_t{t:04d}",
                                 {gv: 1.0, gp: -1.0, uv: -g.ramp_up_mw}, "<=", 0.0)
                m.add_constraint(f"ramp_dn_{g.name}_t{t:04d}",
                                 {gv: -1.0, gp: 1.0, uv: -g.ramp_down_mw}, "<=", 0.0)


def add_storage_constraints(m: MipModel, idx: UcVariableIndex,
                            scenario: Scenario) -> None:
    """Energy accounting E_t = E_{t-1} + eta*charge - discharge/eta, returning
    each unit to its initial energy at the end of the horizon. Energy bounds
    and power limits are enforced through the variable bounds."""
    T = scenario.profile.horizon
    for s in scenario.storage:
        eta = s.one_way_efficiency
        for t in range(T):
            coeffs = {idx.soc[(t, s.name)]: 1.0,
                      idx.p_charge[(t, s.name)]: -eta,
                      idx.p_discharge[(t, s.name)]: 1.0 / eta}
            if t == 0:
                m.add_constraint(f"soc_{s.name}_t{t:04d}", coeffs, "=",
                                 float(s.e_initial_mwh))
            else:
                coeffs[idx.soc[(t - 1, s.name)]] = -1.0
                m.add_constraint(f"soc_{s.name}_t{t:04d}", coeffs, "=", 0.0)
        m.add_constraint(f"soc_terminal_{s.name}",
                         {idx.soc[(T - 1, s.name)]: 1.0}, "=",
                         float(s.e_initial_mwh))
