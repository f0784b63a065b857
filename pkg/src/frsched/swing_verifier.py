"""Time-domain swing-equation check of a frequency-response portfolio.

Integrates, with a classic fixed-step fourth-order Runge-Kutta scheme,

    2 * (H / f_o) * d(df)/dt = -loss + R(t) - D * d * df(t)

where df is the frequency deviation in Hz (negative below nominal) and R(t)
is the multi-speed delivery profile: EFR ramps linearly to full over its
delivery time, PFR over its own, and from t = 30 s the sustained response is
the larger of the delivered PFR and the scheduled SFR (a handover never
withdraws response; if SFR is below the delivered PFR the trace is flagged).

This module is the compliance oracle for schedules produced elsewhere: it
knows nothing about the scheduling constraints, only the physics above.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


class SimulationError(ValueError):
    """Unusable simulation setup (e.g. no inertia against a positive loss)."""


@dataclass(frozen=True)
class ResponsePortfolio:
    """Everything one hour hands the verifier: inertia, demand, and FR volumes."""

    inertia_mvas: float          # H, capacity-weighted (MVA*s == MW*s at unity pf)
    demand_mw: float             # hourly demand entering the damping term
    efr_mw: float                # E
    pfr_mw: float                # scheduled PFR requirement
    sfr_mw: float                # scheduled SFR requirement
    infeed_loss_mw: float
    damping_per_hz: float = 0.0
    nominal_hz: float = 50.0
    efr_delivery_s: float = 1.0
    pfr_delivery_s: float = 10.0
    sfr_start_s: float = 30.0

    def response_at(self, t: float) -> float:
        """Delivered response R(t) in MW."""
        efr = self.efr_mw * min(t / self.efr_delivery_s, 1.0)
        pfr = self.pfr_mw * min(t / self.pfr_delivery_s, 1.0)
        if t < self.sfr_start_s:
            return efr + pfr
        pfr_at_handover = self.pfr_mw * min(self.sfr_start_s / self.pfr_delivery_s, 1.0)
        return efr + max(pfr_at_handover, self.sfr_mw)

    @property
    def sfr_below_pfr(self) -> bool:
        """True when the handover holds PFR because SFR is the smaller volume."""
        pfr_at_handover = self.pfr_mw * min(self.sfr_start_s / self.pfr_delivery_s, 1.0)
        return self.sfr_mw < pfr_at_handover


@dataclass(frozen=True)
class FrequencyTrace:
    dt_s: float
    delta_f_hz: np.ndarray       # signed deviation; negative below nominal
    response_mw: np.ndarray
    nadir_deviation_hz: float    # largest dip below nominal, >= 0
    nadir_time_s: float
    qss_mean_hz: float           # signed mean of the last 10 s
    sfr_below_pfr: bool

    @property
    def qss_deviation_hz(self) -> float:
        """Settling shortfall below nominal; a settle above nominal counts as 0."""
        return max(0.0, -self.qss_mean_hz)

    @property
    def t_end_s(self) -> float:
        return (len(self.delta_f_hz) - 1) * self.dt_s


def simulate(portfolio: ResponsePortfolio, dt: float = 0.05,
             t_end: float = 120.0) -> FrequencyTrace:
    """Integrate the post-contingency deviation over [0, t_end].

    Parameters
    ----------
    portfolio : ResponsePortfolio
    dt : float
        Fixed step; must resolve the fastest ramp (dt <= efr_delivery_s / 10).
    t_end : float
        At least 60 s so a settling value exists.

    Returns
    -------
    FrequencyTrace with the full sampled deviation, the nadir (value and
    time), and the mean deviation over the final 10 s.
    """
    p = portfolio
    if dt <= 0 or dt > p.efr_delivery_s / 10.0 + 1e-12:
        raise SimulationError(f"dt={dt} too coarse for EFR delivery {p.efr_delivery_s}s "
                              "(need dt <= delivery/10)")
    if t_end < 60.0:
        raise SimulationError(f"t_end={t_end} too short; need at least 60 s")
    if p.inertia_mvas <= 0 and p.infeed_loss_mw > 0:
        raise SimulationError("no inertia against a positive in-feed loss: "
                              "rate of change of frequency is unbounded")
    n = int(round(t_end / dt))
    f = np.empty(n + 1)
    r = np.empty(n + 1)
    f[0] = 0.0
    if p.inertia_mvas <= 0:
        # loss is zero here; frequency never moves
        f[:] = 0.0
        r[:] = [p.response_at(i * dt) for i in range(n + 1)]
        return _finish(p, dt, f, r)
    scale = p.nominal_hz / (2.0 * p.inertia_mvas)
    damp = p.damping_per_hz * p.demand_mw

    def rate(t, df):
        return scale * (-p.infeed_loss_mw + p.response_at(t) - damp * df)

    for i in range(n):
        t = i * dt
        y = f[i]
        k1 = rate(t, y)
        k2 = rate(t + dt / 2, y + dt * k1 / 2)
        k3 = rate(t + dt / 2, y + dt * k2 / 2)
        k4 = rate(t + dt, y + dt * k3)
        f[i + 1] = y + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        r[i] = p.response_at(t)
    r[n] = p.response_at(n * dt)
    return _finish(p, dt, f, r)


def _finish(p: ResponsePortfolio, dt: float, f: np.ndarray, r: np.ndarray) -> FrequencyTrace:
    imin = int(np.argmin(f))
    t_min, f_min = imin * dt, float(f[imin])
    if 0 < imin < len(f) - 1:
        # between samples the deviation is near-quadratic (exactly so with
        # zero damping), so refine the nadir with the interpolating parabola
        a, b, c = float(f[imin - 1]), f_min, float(f[imin + 1])
        denom = a - 2 * b + c
        if denom > 0:
            shift = 0.5 * (a - c) / denom
            t_min += shift * dt
            f_min = b - 0.125 * (a - c) ** 2 / denom
    tail = max(1, int(round(10.0 / dt)))
    return FrequencyTrace(
        dt_s=dt, delta_f_hz=f, response_mw=np.asarray(r, dtype=float),
        nadir_deviation_hz=max(0.0, -f_min),
        nadir_time_s=t_min,
        qss_mean_hz=float(np.mean(f[-tail:])),
        sfr_below_pfr=p.sfr_below_pfr,
    )


@dataclass(frozen=True)
class ComplianceReport:
    passed: bool
    nadir_deviation_hz: float
    nadir_limit_hz: float
    qss_deviation_hz: float
    qss_limit_hz: float
    failures: tuple[str, ...]
    sfr_below_pfr: bool

    @property
    def nadir_margin_hz(self) -> float:
        return self.nadir_limit_hz - self.nadir_deviation_hz

    @property
    def qss_margin_hz(self) -> float:
        return self.qss_limit_hz - self.qss_deviation_hz


def check_compliance(trace: FrequencyTrace, nadir_limit_hz: float,
                     qss_limit_hz: float, tol: float = 1e-3) -> ComplianceReport:
    """Pass iff the dip stays within nadir_limit and the settle within qss_limit.

    Limits bound the under-frequency excursion; a trace settling above nominal
    has QSS deviation 0. Exact equality with a limit passes (closed tolerance).
    """
    if trace.t_end_s < 60.0 - 1e-9:
        raise SimulationError("trace too short for compliance checking (< 60 s)")
    failures = []
    if trace.nadir_deviation_hz > nadir_limit_hz + tol:
        failures.append(f"nadir limit exceeded: deviation {trace.nadir_deviation_hz:.4f} Hz "
                        f"> {nadir_limit_hz:.4f} Hz")
    if trace.qss_deviation_hz > qss_limit_hz + tol:
        failures.append(f"qss limit exceeded: deviation {trace.qss_deviation_hz:.4f} Hz "
                        f"> {qss_limit_hz:.4f} Hz")
    return ComplianceReport(
        passed=not failures,
        nadir_deviation_hz=trace.nadir_deviation_hz, nadir_limit_hz=nadir_limit_hz,
        qss_deviation_hz=trace.qss_deviation_hz, qss_limit_hz=qss_limit_hz,
        failures=tuple(failures), sfr_below_pfr=trace.sfr_below_pfr,
    )


def write_trace_csv(trace: FrequencyTrace, path) -> None:
    """Dump the trace as time_s,delta_f_hz,response_mw rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s", "delta_f_hz", "response_mw"])
        for i, (df, r) in enumerate(zip(trace.delta_f_hz, trace.response_mw)):
            writer.writerow([round(i * trace.dt_s, 9), repr(float(df)), repr(float(r))])
