"""Independent brute-force oracles used to cross-check the MILP path.

Nothing here touches branch and bound: integer search is exhaustive
enumeration, and only the continuous remainder of each fixed-integer
subproblem goes to an LP. Slow by design; for tiny instances only.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import linprog

from frsched.mip_interface import CONTINUOUS, INTEGER, MipModel
from frsched.system_model import Scenario


def enumerate_mip(model: MipModel, max_nodes: int = 300_000):
    """Exhaustive optimum of a MipModel: returns (objective, values) or None.

    Every integer assignment in the bound box is enumerated; continuous
    variables are optimized by an LP for each assignment.
    """
    int_idx = [i for i, v in enumerate(model.variables) if v.kind == INTEGER]
    cont_idx = [i for i, v in enumerate(model.variables) if v.kind == CONTINUOUS]
    ranges = []
    nodes = 1
    for i in int_idx:
        v = model.variables[i]
        r = range(int(math.ceil(v.lower - 1e-9)), int(math.floor(v.upper + 1e-9)) + 1)
        ranges.append(r)
        nodes *= max(len(r), 1)
    if nodes > max_nodes:
        raise ValueError(f"enumeration would visit {nodes} nodes")

    c_cont = np.zeros(len(cont_idx))
    for pos, i in enumerate(cont_idx):
        c_cont[pos] = model.objective.get(i, 0.0)
    cont_pos = {i: pos for pos, i in enumerate(cont_idx)}
    bounds = [(model.variables[i].lower, model.variables[i].upper) for i in cont_idx]

    best_obj, best_values = None, None
    for assignment in itertools.product(*ranges):
        fixed = dict(zip(int_idx, assignment))
        obj_const = sum(model.objective.get(i, 0.0) * x for i, x in fixed.items())
        a_ub, b_ub, a_eq, b_eq = [], [], [], []
        feasible = True
        for con in model.constraints:
            row = np.zeros(len(cont_idx))
            shift = 0.0
            for i, coef in con.coeffs:
                if i in fixed:
                    shift += coef * fixed[i]
                else:
                    row[cont_pos[i]] = coef
            rhs = con.rhs - shift
            if not row.any():
                if con.sense == "<=" and shift > con.rhs + 1e-9:
                    feasible = False
                elif con.sense == ">=" and shift < con.rhs - 1e-9:
                    feasible = False
                elif con.sense == "=" and abs(shift - con.rhs) > 1e-9:
                    feasible = False
                if not feasible:
                    break
                continue
            if con.sense == "<=":
                a_ub.append(row)
                b_ub.append(rhs)
            elif con.sense == ">=":
                a_ub.append(-row)
                b_ub.append(-rhs)
            else:
                a_eq.append(row)
                b_eq.append(rhs)
        if not feasible:
            continue
        if cont_idx:
            res = linprog(c_cont,
                          A_ub=np.array(a_ub) if a_ub else None,
                          b_ub=np.array(b_ub) if b_ub else None,
                          A_eq=np.array(a_eq) if a_eq else None,
                          b_eq=np.array(b_eq) if b_eq else None,
                          bounds=bounds, method="highs")
            if not res.success:
                continue
            total = obj_const + res.fun
            cont_values = res.x
        else:
            total = obj_const
            cont_values = []
        if best_obj is None or total < best_obj - 1e-12:
            values = {}
            for i, x in fixed.items():
                values[model.variables[i].name] = float(x)
            for pos, i in enumerate(cont_idx):
                values[model.variables[i].name] = float(cont_values[pos])
            best_obj, best_values = total, values
    if best_obj is None:
        return None
    return best_obj, best_values


# ---------------------------------------------------------------------------
# Unit-commitment oracle: enumerate commitment sequences, dispatch by LP
# ---------------------------------------------------------------------------

def _minimal_switches(u_seq, u_init):
    prev = u_init
    s_on, s_off = [], []
    for u in u_seq:
        s_on.append(max(0, u - prev))
        s_off.append(max(0, prev - u))
        prev = u
    return s_on, s_off


def _windows_ok(u_seq, s_on, s_off, group):
    for t, u in enumerate(u_seq):
        lo = sum(s_on[tau] for tau in range(max(0, t - group.startup_time_h + 1), t))
        if u < lo:
            return False
        hi = group.n_units - sum(s_off[tau]
                                 for tau in range(max(0, t - group.shutdown_time_h + 1), t))
        if u > hi:
            return False
    return True


def _dispatch_lp(scenario: Scenario, commitment: dict[str, list[int]]):
    """Exact minimum marginal cost for a fixed commitment; None if infeasible."""
    T = scenario.profile.horizon
    groups = list(scenario.groups)
    stores = list(scenario.storage)
    # variable layout: per t: [P_g...], [Pc_s, Pd_s, E_s]..., xi
    per_t = len(groups) + 3 * len(stores) + 1
    n = T * per_t

    def p_i(t, gi):
        return t * per_t + gi

    def pc_i(t, si):
        return t * per_t + len(groups) + 3 * si

    def pd_i(t, si):
        return pc_i(t, si) + 1

    def e_i(t, si):
        return pc_i(t, si) + 2

    def xi_i(t):
        return t * per_t + per_t - 1

    c = np.zeros(n)
    bounds = [(0.0, 0.0)] * n
    prof = scenario.profile
    for t in range(T):
        for gi, g in enumerate(groups):
            u = commitment[g.name][t]
            c[p_i(t, gi)] = g.marginal_cost
            bounds[p_i(t, gi)] = (u * g.msg_mw, u * g.unit_capacity_mw)
        for si, s in enumerate(stores):
            bounds[pc_i(t, si)] = (0.0, s.p_charge_max_mw)
            bounds[pd_i(t, si)] = (0.0, s.p_discharge_max_mw)
            bounds[e_i(t, si)] = (s.e_min_mwh, s.e_max_mwh)
        bounds[xi_i(t)] = (0.0, float(prof.wind_mw[t] + prof.solar_mw[t]))
    a_eq, b_eq, a_ub, b_ub = [], [], [], []
    for t in range(T):
        row = np.zeros(n)
        for gi in range(len(groups)):
            row[p_i(t, gi)] = 1.0
        for si in range(len(stores)):
            row[pd_i(t, si)] = 1.0
            row[pc_i(t, si)] = -1.0
        row[xi_i(t)] = -1.0
        a_eq.append(row)
        b_eq.append(float(prof.demand_mw[t] - prof.interconnector_mw[t]
                          - prof.wind_mw[t] - prof.solar_mw[t]))
        for gi, g in enumerate(groups):
            u = commitment[g.name][t]
            prev_p = None if t > 0 else scenario.initial(g).output_mw
            up = np.zeros(n)
            dn = np.zeros(n)
            up[p_i(t, gi)] = 1.0
            dn[p_i(t, gi)] = -1.0
            if t > 0:
                up[p_i(t - 1, gi)] = -1.0
                dn[p_i(t - 1, gi)] = 1.0
                a_ub.append(up)
                b_ub.append(u * g.ramp_up_mw)
                a_ub.append(dn)
                b_ub.append(u * g.ramp_down_mw)
            else:
                a_ub.append(up)
                b_ub.append(u * g.ramp_up_mw + prev_p)
                a_ub.append(dn)
                b_ub.append(u * g.ramp_down_mw - prev_p)
        for si, s in enumerate(stores):
            eta = s.one_way_efficiency
            row = np.zeros(n)
            row[e_i(t, si)] = 1.0
            row[pc_i(t, si)] = -eta
            row[pd_i(t, si)] = 1.0 / eta
            if t > 0:
                row[e_i(t - 1, si)] = -1.0
                a_eq.append(row)
                b_eq.append(0.0)
            else:
                a_eq.append(row)
                b_eq.append(float(s.e_initial_mwh))
    for si, s in enumerate(stores):
        row = np.zeros(n)
        row[e_i(T - 1, si)] = 1.0
        a_eq.append(row)
        b_eq.append(float(s.e_initial_mwh))
    res = linprog(c, A_ub=np.array(a_ub) if a_ub else None,
                  b_ub=np.array(b_ub) if b_ub else None,
                  A_eq=np.array(a_eq), b_eq=np.array(b_eq),
                  bounds=bounds, method="highs")
    return float(res.fun) if res.success else None


def enumerate_uc(scenario: Scenario):
    """Optimal cost over all commitment sequences; None if none is feasible.

    Switch counters take their minimal values, which is optimal whenever
    start costs are nonnegative and only tightens the up/down windows.
    """
    T = scenario.profile.horizon
    groups = list(scenario.groups)
    per_group = []
    for g in groups:
        if g.must_run:
            seqs = [(g.n_units,) * T]
        else:
            seqs = list(itertools.product(range(g.n_units + 1), repeat=T))
        per_group.append(seqs)
    best = None
    for combo in itertools.product(*per_group):
        fixed_cost = 0.0
        ok = True
        commitment = {}
        for g, seq in zip(groups, combo):
            u_init = scenario.initial(g).units_online
            s_on, s_off = _minimal_switches(seq, u_init)
            if not _windows_ok(seq, s_on, s_off, g):
                ok = False
                break
            fixed_cost += sum(g.startup_cost * x for x in s_on)
            fixed_cost += sum(g.no_load_cost * u for u in seq)
            commitment[g.name] = list(seq)
        if not ok:
            continue
        dispatch = _dispatch_lp(scenario, commitment)
        if dispatch is None:
            continue
        total = fixed_cost + dispatch
        if best is None or total < best:
            best = total
    return best
