"""Inertia aggregation and frequency-response constraints for the MILP.

The nadir condition couples system inertia H and the PFR requirement P as
H * P >= k, with

    k = f_o * T_p * (loss - E)^2 / (4 * df_nadir)

obtained by integrating the swing equation with the linear-ramp delivery
profile (EFR fully delivered well before the nadir, PFR ramping to full over
T_p, damping omitted) and bounding the dip at the nadir time
t* = (loss - E) * T_p / P. The product constraint is bilinear, so it enters
the MILP as a set of chord (secant) cuts of the convex hyperbola P = k / H:
every chord lies above the curve between its endpoints, hence requiring P to
sit above ALL chords simultaneously over-approximates the true requirement.
The approximation is conservative everywhere inside the gridded inertia range
and exact at the grid points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mip_interface import MipModel
from .system_model import Scenario

NADIR_TAG = "nadir_chord"
FLOOR_TAG = "adequacy_floor"


class LinearizationError(ValueError):
    """Chord grid cannot cover the inertia values a schedule may produce."""


def nadir_constant(freq) -> float:
    """MW^2*s constant k such that the nadir condition is H * P_req >= k.

    Returns 0 when EFR alone covers the in-feed loss (E >= loss): the nadir
    never dips and no PFR is needed for it.
    """
    remainder = freq.infeed_loss_mw - freq.efr_mw
    if remainder <= 0:
        return 0.0
    return (freq.nominal_hz * freq.pfr_delivery_s * remainder ** 2
            / (4.0 * freq.nadir_deviation_hz))


def pfr_offset_per_mw(h_mvas: float, freq) -> float:
    """|dP_req/dE| on the exact hyperbola: how much PFR 1 MW of EFR displaces."""
    remainder = max(0.0, freq.infeed_loss_mw - freq.efr_mw)
    return (2.0 * freq.nominal_hz * freq.pfr_delivery_s * remainder
            / (4.0 * freq.nadir_deviation_hz * h_mvas))


@dataclass(frozen=True)
class ChordSegmentSet:
    """Secant cuts of P = k/H over an inertia grid, uniform in 1/H.

    For segment i through (H_i, k/H_i) and (H_{i+1}, k/H_{i+1}):
    slope beta_i = -k/(H_i*H_{i+1}) and intercept alpha_i = k*(H_i+H_{i+1})
    / (H_i*H_{i+1}); max_i(alpha_i + beta_i*H) >= k/H on [H_0, H_N] with
    equality at every grid point.
    """

    k: float
    h_grid: np.ndarray          # ascending, strictly positive
    alphas: np.ndarray          # MW
    betas: np.ndarray           # MW per MVA*s, negative

    @property
    def n_segments(self) -> int:
        return len(self.alphas)

    @property
    def h_min(self) -> float:
        return float(self.h_grid[0])

    @property
    def h_max(self) -> float:
        return float(self.h_grid[-1])

    def envelope(self, h) -> np.ndarray | float:
        """Piecewise-linear over-approximation of k/H, valid on [h_min, h_max]."""
        scalar = np.ndim(h) == 0
        h_arr = np.atleast_1d(np.asarray(h, dtype=float))
        vals = self.alphas[:, None] + self.betas[:, None] * h_arr[None, :]
        out = vals.max(axis=0)
        return float(out[0]) if scalar else out

    def exact(self, h) -> np.ndarray | float:
        return self.k / np.asarray(h, dtype=float)

    def binding_segment(self, h: float) -> int:
        vals = self.alphas + self.betas * h
        return int(np.argmax(vals))


def build_chord_segments(k: float, h_min: float, h_max: float,
                         n_segments: int) -> ChordSegmentSet:
    """Grid [h_min, h_max] uniformly in 1/H and take the chord on each cell.

    Uniform spacing in 1/H balances the relative over-approximation error
    across segments. k = 0 collapses to a single zero segment.
    """
    if n_segments < 1:
        raise ValueError("need at least one segment")
    if k == 0.0:
        return ChordSegmentSet(k=0.0, h_grid=np.array([h_min, h_max]),
                               alphas=np.zeros(1), betas=np.zeros(1))
    if not 0 < h_min < h_max:
        raise ValueError(f"need 0 < h_min < h_max, got [{h_min}, {h_max}]")
    inv = np.linspace(1.0 / h_max, 1.0 / h_min, n_segments + 1)
    grid = np.sort(1.0 / inv)
    grid[0], grid[-1] = h_min, h_max  # exact endpoints despite rounding
    lo, hi = grid[:-1], grid[1:]
    betas = -k / (lo * hi)
    alphas = k * (lo + hi) / (lo * hi)
    return ChordSegmentSet(k=k, h_grid=grid, alphas=alphas, betas=betas)


def possible_inertia_range(scenario: Scenario) -> tuple[float, float]:
    """Bounds on H any commitment can produce: [must-run floor, full fleet]."""
    must_run = sum(g.unit_capacity_mw * g.inertia_s * g.n_units
                   for g in scenario.groups if g.must_run)
    fleet = sum(g.unit_capacity_mw * g.inertia_s * g.n_units for g in scenario.groups)
    load = scenario.profile.demand_mw * scenario.freq.load_inertia_s
    lo = must_run + (float(load.min()) if len(load) else 0.0)
    hi = fleet + (float(load.max()) if len(load) else 0.0)
    return lo, hi


# ---------------------------------------------------------------------------
# Constraint builders (append to a MipModel through a UcVariableIndex)
# ---------------------------------------------------------------------------

def add_inertia_expression(m: MipModel, idx, scenario: Scenario) -> None:
    """H_t = sum_g C_g*h_g*u_{t,g} + d_t*h_l, as an equality defining H_t."""
    hl = scenario.freq.load_inertia_s
    for t in range(scenario.profile.horizon):
        coeffs = {idx.inertia[t]: 1.0}
        for g in scenario.groups:
            coeffs[idx.u[(t, g.name)]] = -g.unit_capacity_mw * g.inertia_s
        m.add_constraint(f"inertia_t{t:04d}", coeffs, "=",
                         float(scenario.profile.demand_mw[t]) * hl)


def add_nadir_constraints(m: MipModel, idx, scenario: Scenario,
                          segments: ChordSegmentSet) -> None:
    """Chord cuts P_req >= alpha_i + beta_i*H_t plus the damped adequacy floor.

    The chord grid must cover every inertia value the fleet can reach;
    outside the grid the envelope under-approximates k/H and would silently
    weaken the nadir condition, so coverage is validated here.
    """
    lo, hi = possible_inertia_range(scenario)
    if segments.k > 0 and (lo < segments.h_min - 1e-6 or hi > segments.h_max + 1e-6):
        raise LinearizationError(
            f"chord grid [{segments.h_min}, {segments.h_max}] does not cover the "
            f"reachable inertia range [{lo}, {hi}]")
    freq = scenario.freq
    d_ref = scenario.damping_demand_series()
    for t in range(scenario.profile.horizon):
        for i in range(segments.n_segments):
            m.add_constraint(
                f"nadir_t{t:04d}_seg{i:02d}",
                {idx.p_req[t]: 1.0, idx.inertia[t]: -float(segments.betas[i])},
                ">=", float(segments.alphas[i]))
        floor = (freq.infeed_loss_mw - freq.efr_mw
                 - freq.damping_per_hz * float(d_ref[t]) * freq.nadir_deviation_hz)
        m.add_constraint(f"pfr_floor_t{t:04d}", {idx.p_req[t]: 1.0}, ">=", floor)


def qss_floor_mw(scenario: Scenario) -> np.ndarray:
    """Per-hour SFR floor: loss - D*d_ref*df_qss (minus EFR only when opted in)."""
    freq = scenario.freq
    d_ref = scenario.damping_demand_series()
    floor = freq.infeed_loss_mw - freq.damping_per_hz * d_ref * freq.qss_deviation_hz
    if freq.efr_offsets_qss:
        floor = floor - freq.efr_mw
    return floor


def add_qss_constraint(m: MipModel, idx, scenario: Scenario) -> None:
    """S_req_t >= the QSS floor. EFR does not count against it by default:
    a sub-second product arrests the dip but the post-event settle is restored
    by sustained response, so the floor keeps its full volume unless the
    scenario opts in to the offset."""
    floor = qss_floor_mw(scenario)
    for t in range(scenario.profile.horizon):
        m.add_constraint(f"qss_t{t:04d}", {idx.s_req[t]: 1.0}, ">=", float(floor[t]))


def add_provision_limits(m: MipModel, idx, scenario: Scenario) -> None:
    """Headroom and capability caps on every provider.

    Thermal PFR: min(u*F_pr, slope*(u*C - P_gen)) split into two linear cuts;
    thermal SFR: min(u*F_se, u*C - P_gen); must-run (nuclear) groups provide
    nothing. Storage PFR+SFR share one discharge-headroom budget:
    P_s + S_s <= min(F_max, P_dmax - P_d).
    """
    for t in range(scenario.profile.horizon):
        for g in scenario.groups:
            pv, sv = idx.pfr_thermal[(t, g.name)], idx.sfr_thermal[(t, g.name)]
            uv, gen = idx.u[(t, g.name)], idx.p_gen[(t, g.name)]
            if g.must_run:
                m.add_constraint(f"pfr_cap_{g.name}_t{t:04d}", {pv: 1.0}, "<=", 0.0)
                m.add_constraint(f"sfr_cap_{g.name}_t{t:04d}", {sv: 1.0}, "<=", 0.0)
                continue
            m.add_constraint(f"pfr_cap_{g.name}_t{t:04d}",
                             {pv: 1.0, uv: -g.pfr_max_mw}, "<=", 0.0)
            m.add_constraint(f"pfr_headroom_{g.name}_t{t:04d}",
                             {pv: 1.0, uv: -g.governor_slope * g.unit_capacity_mw,
                              gen: g.governor_slope}, "<=", 0.0)
            m.add_constraint(f"sfr_cap_{g.name}_t{t:04d}",
                             {sv: 1.0, uv: -g.sfr_max_mw}, "<=", 0.0)
            m.add_constraint(f"sfr_headroom_{g.name}_t{t:04d}",
                             {sv: 1.0, uv: -g.unit_capacity_mw, gen: 1.0}, "<=", 0.0)
        for s in scenario.storage:
            pv, sv = idx.pfr_storage[(t, s.name)], idx.sfr_storage[(t, s.name)]
            m.add_constraint(f"fr_cap_{s.name}_t{t:04d}",
                             {pv: 1.0, sv: 1.0}, "<=", s.fr_max_mw)
            m.add_constraint(f"fr_headroom_{s.name}_t{t:04d}",
                             {pv: 1.0, sv: 1.0, idx.p_discharge[(t, s.name)]: 1.0},
                             "<=", s.p_discharge_max_mw)


def add_adequacy_constraints(m: MipModel, idx, scenario: Scenario) -> None:
    """Total provision covers the requirement, per product and hour."""
    for t in range(scenario.profile.horizon):
        p_coeffs = {idx.p_req[t]: -1.0}
        s_coeffs = {idx.s_req[t]: -1.0}
        for g in scenario.groups:
            p_coeffs[idx.pfr_thermal[(t, g.name)]] = 1.0
            s_coeffs[idx.sfr_thermal[(t, g.name)]] = 1.0
        for s in scenario.storage:
            p_coeffs[idx.pfr_storage[(t, s.name)]] = 1.0
            s_coeffs[idx.sfr_storage[(t, s.name)]] = 1.0
        m.add_constraint(f"pfr_adequacy_t{t:04d}", p_coeffs, ">=", 0.0)
        m.add_constraint(f"sfr_adequacy_t{t:04d}", s_coeffs, ">=", 0.0)


# ---------------------------------------------------------------------------
# Requirement reporting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrRequirementBreakdown:
    """Per-hour requirements implied by a committed inertia trajectory.

    p_req/s_req are the binding values (chord envelope vs adequacy floor for
    PFR; the QSS floor for SFR); `binding` names which PFR constraint won.
    """

    inertia_mvas: np.ndarray
    p_req_mw: np.ndarray
    s_req_mw: np.ndarray
    binding: tuple[str, ...]


def requirement_breakdown(scenario: Scenario, inertia_mvas: np.ndarray,
                          segments: ChordSegmentSet) -> FrRequirementBreakdown:
    """Evaluate the binding FR requirements at a given inertia trajectory."""
    freq = scenario.freq
    d_ref = scenario.damping_demand_series()
    h = np.asarray(inertia_mvas, dtype=float)
    env = np.atleast_1d(segments.envelope(h))
    floor = (freq.infeed_loss_mw - freq.efr_mw
             - freq.damping_per_hz * d_ref * freq.nadir_deviation_hz)
    p_req = np.maximum(np.maximum(env, floor), 0.0)
    tags = []
    for t in range(len(h)):
        if env[t] >= floor[t]:
            tags.append(f"{NADIR_TAG}_{segments.binding_segment(float(h[t]))}")
        else:
            tags.append(FLOOR_TAG)
    s_req = np.maximum(qss_floor_mw(scenario), 0.0)
    return FrRequirementBreakdown(inertia_mvas=h, p_req_mw=p_req, s_req_mw=s_req,
                                  binding=tuple(tags))
