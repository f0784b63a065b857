"""Solver-agnostic MIP container, LP/MPS export, and pluggable solve backends.

The container stores a minimization problem as plain lists of variables,
sparse linear constraints, and a sparse objective, so a model can be built
once and then exported to text or handed to any backend. Two backends ship:
an in-process one on top of scipy's HiGHS binding, and a subprocess one that
writes a model file, invokes an external solver executable, and parses its
solution file.
"""

from __future__ import annotations

import math
import os
import re
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, milp

CONTINUOUS = "continuous"
INTEGER = "integer"

STATUS_OPTIMAL = "optimal"
STATUS_FEASIBLE = "feasible"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_ERROR = "error"

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class ModelError(ValueError):
    """Raised when a model violates its structural invariants."""


class ExportError(ValueError):
    """Raised when a model cannot be written in the requested format."""


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # CONTINUOUS or INTEGER
    lower: float
    upper: float


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: tuple[tuple[int, float], ...]  # (variable index, coefficient)
    sense: str  # "<=", "=", ">="
    rhs: float


class MipModel:
    """Minimization MIP: variables, sparse linear constraints, sparse objective.

    Variables and constraints keep registration order, which makes every
    export and solve deterministic.
    """

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective: dict[int, float] = {}
        self._var_index: dict[str, int] = {}
        self._con_names: set[str] = set()

    def add_variable(self, name: str, kind: str = CONTINUOUS,
                     lower: float = 0.0, upper: float = math.inf) -> int:
        if name in self._var_index:
            raise ModelError(f"duplicate variable name {name!r}")
        if kind not in (CONTINUOUS, INTEGER):
            raise ModelError(f"unknown variable kind {kind!r}")
        if lower > upper:
            raise ModelError(f"variable {name!r} has lower bound above upper bound")
        if kind == INTEGER and not (math.isfinite(lower) and math.isfinite(upper)):
            raise ModelError(f"integer variable {name!r} must have finite bounds")
        idx = len(self.variables)
        self.variables.append(Variable(name, kind, float(lower), float(upper)))
        self._var_index[name] = idx
        return idx

    def add_constraint(self, name: str, coeffs, sense: str, rhs: float) -> int:
        """Add sum(coef * var) <sense> rhs; coeffs is {index: coef} or pairs."""
        if name in self._con_names:
            raise ModelError(f"duplicate constraint name {name!r}")
        if sense not in ("<=", "=", ">="):
            raise ModelError(f"unknown constraint sense {sense!r}")
        merged: dict[int, float] = {}
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        for idx, coef in items:
            if not 0 <= idx < len(self.variables):
                raise ModelError(f"constraint {name!r} references unknown variable index {idx}")
            merged[idx] = merged.get(idx, 0.0) + float(coef)
        normalized = tuple(sorted((i, c) for i, c in merged.items() if c != 0.0))
        self.constraints.append(Constraint(name, normalized, sense, float(rhs)))
        self._con_names.add(name)
        return len(self.constraints) - 1

    def add_objective_term(self, idx: int, coef: float) -> None:
        if not 0 <= idx < len(self.variables):
            raise ModelError(f"objective references unknown variable index {idx}")
        self.objective[idx] = self.objective.get(idx, 0.0) + float(coef)

    def variable_index(self, name: str) -> int:
        return self._var_index[name]

    def validate(self) -> None:
        """Raise ModelError if any structural invariant is broken."""
        seen = set()
        for v in self.variables:
            if v.name in seen:
                raise ModelError(f"duplicate variable name {v.name!r}")
            seen.add(v.name)
            if v.kind == INTEGER and not (math.isfinite(v.lower) and math.isfinite(v.upper)):
                raise ModelError(f"integer variable {v.name!r} must have finite bounds")
            if v.lower > v.upper:
                raise ModelError(f"variable {v.name!r} has crossing bounds")
        for c in self.constraints:
            for idx, _ in c.coeffs:
                if not 0 <= idx < len(self.variables):
                    raise ModelError(f"constraint {c.name!r} references unknown variable index {idx}")
        for idx in self.objective:
            if not 0 <= idx < len(self.variables):
                raise ModelError(f"objective references unknown variable index {idx}")


@dataclass
class Solution:
    status: str
    objective: float | None = None
    values: dict[str, float] = field(default_factory=dict)
    wall_time_s: float = 0.0
    mip_gap: float | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status in (STATUS_OPTIMAL, STATUS_FEASIBLE)


def objective_value(model: MipModel, values: dict[str, float]) -> float:
    """Evaluate the model objective at a value assignment."""
    return sum(coef * values[model.variables[idx].name]
               for idx, coef in model.objective.items())


def constraint_violations(model: MipModel, values: dict[str, float],
                          tol: float = 1e-6) -> list[str]:
    """Independent feasibility pass: every constraint, bound, and integrality.

    Returns human-readable violation strings; empty means feasible within tol.
    """
    out = []
    for v in model.variables:
        x = values[v.name]
        if x < v.lower - tol or x > v.upper + tol:
            out.append(f"bound {v.name}: {x} outside [{v.lower}, {v.upper}]")
        if v.kind == INTEGER and abs(x - round(x)) > tol:
            out.append(f"integrality {v.name}: {x}")
    for c in model.constraints:
        lhs = sum(coef * values[model.variables[idx].name] for idx, coef in c.coeffs)
        if c.sense == "<=" and lhs > c.rhs + tol:
            out.append(f"constraint {c.name}: {lhs} <= {c.rhs} violated")
        elif c.sense == ">=" and lhs < c.rhs - tol:
            out.append(f"constraint {c.name}: {lhs} >= {c.rhs} violated")
        elif c.sense == "=" and abs(lhs - c.rhs) > tol:
            out.append(f"constraint {c.name}: {lhs} = {c.rhs} violated")
    return out


# ---------------------------------------------------------------------------
# Text export
# ---------------------------------------------------------------------------

def _check_names(model: MipModel) -> None:
    for v in model.variables:
        if not _NAME_RE.match(v.name):
            raise ExportError(f"variable name {v.name!r} is not portable to LP/MPS text")
    for c in model.constraints:
        if not _NAME_RE.match(c.name):
            raise ExportError(f"constraint name {c.name!r} is not portable to LP/MPS text")


def _num(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _lp_expr(model: MipModel, coeffs) -> str:
    parts = []
    for idx, coef in coeffs:
        name = model.variables[idx].name
        sign = "-" if coef < 0 else "+"
        if not parts and sign == "+":
            parts.append(f"{_num(abs(coef))} {name}")
        else:
            parts.append(f"{sign} {_num(abs(coef))} {name}")
    return " ".join(parts) if parts else "0"


def export_lp(model: MipModel) -> str:
    """Write the model as CPLEX-style LP text (deterministic ordering)."""
    _check_names(model)
    lines = [f"\\ {model.name}", "Minimize"]
    obj = sorted(model.objective.items())
    lines.append(" obj: " + _lp_expr(model, obj))
    lines.append("Subject To")
    for c in model.constraints:
        op = {"<=": "<=", ">=": ">=", "=": "="}[c.sense]
        lines.append(f" {c.name}: {_lp_expr(model, c.coeffs)} {op} {_num(c.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if v.lower == -math.inf and v.upper == math.inf:
            lines.append(f" {v.name} free")
        elif v.upper == math.inf:
            lines.append(f" {v.name} >= {_num(v.lower)}")
        elif v.lower == -math.inf:
            lines.append(f" {v.name} <= {_num(v.upper)}")
        else:
            lines.append(f" {_num(v.lower)} <= {v.name} <= {_num(v.upper)}")
    integers = [v.name for v in model.variables if v.kind == INTEGER]
    if integers:
        lines.append("General")
        for name in integers:
            lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_mps(model: MipModel) -> str:
    """Write the model as free-form MPS text (deterministic ordering)."""
    _check_names(model)
    lines = [f"NAME {model.name}", "ROWS", " N  COST"]
    for c in model.constraints:
        tag = {"<=": "L", ">=": "G", "=": "E"}[c.sense]
        lines.append(f" {tag}  {c.name}")
    # column-major entries: objective first, then constraints in order
    entries: dict[int, list[tuple[str, float]]] = {i: [] for i in range(len(model.variables))}
    for idx, coef in sorted(model.objective.items()):
        entries[idx].append(("COST", coef))
    for c in model.constraints:
        for idx, coef in c.coeffs:
            entries[idx].append((c.name, coef))
    lines.append("COLUMNS")
    in_integer = False
    marker = 0
    for i, v in enumerate(model.variables):
        if v.kind == INTEGER and not in_integer:
            lines.append(f"    MARKER{marker}  'MARKER'  'INTORG'")
            marker += 1
            in_integer = True
        elif v.kind != INTEGER and in_integer:
            lines.append(f"    MARKER{marker}  'MARKER'  'INTEND'")
            marker += 1
            in_integer = False
        for row, coef in entries[i]:
            lines.append(f"    {v.name}  {row}  {_num(coef)}")
        if not entries[i]:
            # column must still exist; a zero objective entry keeps readers happy
            lines.append(f"    {v.name}  COST  0")
    if in_integer:
        lines.append(f"    MARKER{marker}  'MARKER'  'INTEND'")
    lines.append("RHS")
    for c in model.constraints:
        if c.rhs != 0.0:
            lines.append(f"    RHS  {c.name}  {_num(c.rhs)}")
    lines.append("BOUNDS")
    for v in model.variables:
        if v.lower == -math.inf and v.upper == math.inf:
            lines.append(f" FR BND  {v.name}")
            continue
        if v.lower == -math.inf:
            lines.append(f" MI BND  {v.name}")
        elif v.lower != 0.0:
            lines.append(f" LO BND  {v.name}  {_num(v.lower)}")
        if v.upper != math.inf:
            lines.append(f" UP BND  {v.name}  {_num(v.upper)}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def export_model(model: MipModel, format: str) -> str:
    """Export to `lp_text` or `mps_text`; output is byte-stable across calls."""
    model.validate()
    if format in ("lp_text", "lp"):
        return export_lp(model)
    if format in ("mps_text", "mps"):
        return export_mps(model)
    raise ExportError(f"unknown export format {format!r}")


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------

class SolverBackend:
    """Adapter interface: turn a MipModel into a Solution."""

    name = "abstract"

    def solve(self, model: MipModel, gap_tolerance: float, time_limit: float) -> Solution:
        raise NotImplementedError


class ScipyBackend(SolverBackend):
    """In-process backend on scipy.optimize.milp (HiGHS)."""

    name = "scipy-highs"

    def solve(self, model: MipModel, gap_tolerance: float, time_limit: float) -> Solution:
        n = len(model.variables)
        if n == 0:
            return Solution(STATUS_OPTIMAL, objective=0.0, values={}, mip_gap=0.0)
        c = np.zeros(n)
        for idx, coef in model.objective.items():
            c[idx] = coef
        integrality = np.array([1 if v.kind == INTEGER else 0 for v in model.variables])
        lb = np.array([v.lower for v in model.variables])
        ub = np.array([v.upper for v in model.variables])
        constraints = []
        if model.constraints:
            rows, cols, vals = [], [], []
            clo = np.empty(len(model.constraints))
            cup = np.empty(len(model.constraints))
            for i, con in enumerate(model.constraints):
                for idx, coef in con.coeffs:
                    rows.append(i)
                    cols.append(idx)
                    vals.append(coef)
                if con.sense == "<=":
                    clo[i], cup[i] = -np.inf, con.rhs
                elif con.sense == ">=":
                    clo[i], cup[i] = con.rhs, np.inf
                else:
                    clo[i], cup[i] = con.rhs, con.rhs
            a = sp.csr_matrix((vals, (rows, cols)), shape=(len(model.constraints), n))
            constraints = [LinearConstraint(a, clo, cup)]
        t0 = time.perf_counter()
        res = milp(c=c, constraints=constraints, integrality=integrality,
                   bounds=Bounds(lb, ub),
                   options={"mip_rel_gap": gap_tolerance, "time_limit": time_limit})
        wall = time.perf_counter() - t0
        if res.status == 2:
            return Solution(STATUS_INFEASIBLE, wall_time_s=wall, detail=res.message)
        if res.status == 3:
            return Solution(STATUS_UNBOUNDED, wall_time_s=wall, detail=res.message)
        if res.x is None:
            return Solution(STATUS_ERROR, wall_time_s=wall,
                            detail=f"no incumbent: {res.message}")
        values = _clean_values(model, res.x)
        gap = getattr(res, "mip_gap", None)
        gap = float(gap) if gap is not None and np.isfinite(gap) else (0.0 if res.status == 0 else None)
        status = STATUS_OPTIMAL if res.status == 0 else STATUS_FEASIBLE
        return Solution(status, objective=float(res.fun), values=values,
                        wall_time_s=wall, mip_gap=gap, detail=res.message)


def _clean_values(model: MipModel, x: np.ndarray) -> dict[str, float]:
    values = {}
    for v, xi in zip(model.variables, x):
        xi = float(xi)
        if v.kind == INTEGER and abs(xi - round(xi)) <= 1e-6:
            xi = float(round(xi))
        values[v.name] = xi
    return values


def parse_highs_solution(text: str) -> tuple[str, float | None, dict[str, float]]:
    """Parse a HiGHS-style solution file: model status, objective, column values."""
    status = STATUS_ERROR
    objective = None
    values: dict[str, float] = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if line == "Model status":
            i += 1
            word = lines[i].strip().lower()
            status = {"optimal": STATUS_OPTIMAL, "infeasible": STATUS_INFEASIBLE,
                      "unbounded": STATUS_UNBOUNDED, "feasible": STATUS_FEASIBLE,
                      }.get(word, STATUS_ERROR)
        elif line.startswith("Objective"):
            objective = float(line.split()[1])
        elif line.startswith("# Columns"):
            ncols = int(line.split()[2])
            for j in range(ncols):
                name, val = lines[i + 1 + j].split()
                values[name] = float(val)
            i += ncols
        elif line.startswith("# Rows"):
            break
        i += 1
    return status, objective, values


class SubprocessBackend(SolverBackend):
    """Backend that shells out to an external MIP solver executable.

    The executable and its argument template come from configuration; the
    template must contain ``{model_file}`` and ``{solution_file}`` and may
    carry any extra flags, e.g. ``"{model_file} --solution {solution_file}"``.
    The solution file is parsed in the HiGHS solution-file layout.
    """

    name = "subprocess"

    def __init__(self, executable: str,
                 args_template: str = "{model_file} {solution_file}",
                 model_format: str = "mps_text"):
        self.executable = executable
        self.args_template = args_template
        self.model_format = model_format

    def solve(self, model: MipModel, gap_tolerance: float, time_limit: float) -> Solution:
        text = export_model(model, self.model_format)
        suffix = ".lp" if self.model_format.startswith("lp") else ".mps"
        t0 = time.perf_counter()
        with tempfile.TemporaryDirectory(prefix="frsched_solve_") as tmp:
            model_file = os.path.join(tmp, "model" + suffix)
            solution_file = os.path.join(tmp, "model.sol")
            with open(model_file, "w") as fh:
                fh.write(text)
            args = [a.format(model_file=model_file, solution_file=solution_file)
                    for a in self.args_template.split()]
            try:
                proc = subprocess.run([self.executable, *args],
                                      capture_output=True, text=True,
                                      timeout=time_limit)
            except FileNotFoundError:
                return Solution(STATUS_ERROR,
                                detail=f"backend unavailable: {self.executable!r} not found")
            except subprocess.TimeoutExpired:
                return Solution(STATUS_ERROR,
                                detail=f"time limit {time_limit}s exceeded with no incumbent",
                                wall_time_s=time.perf_counter() - t0)
            wall = time.perf_counter() - t0
            if not os.path.exists(solution_file):
                return Solution(STATUS_ERROR, wall_time_s=wall,
                                detail=f"solver wrote no solution file "
                                       f"(exit {proc.returncode}): {proc.stderr[-500:]}")
            with open(solution_file) as fh:
                status, objective, raw = parse_highs_solution(fh.read())
        if status not in (STATUS_OPTIMAL, STATUS_FEASIBLE):
            return Solution(status, wall_time_s=wall, detail="reported by external solver")
        values = {v.name: raw.get(v.name, 0.0) for v in model.variables}
        values = _clean_values(model, np.array([values[v.name] for v in model.variables]))
        if objective is None:
            objective = objective_value(model, values)
        return Solution(status, objective=objective, values=values, wall_time_s=wall,
                        mip_gap=None if status == STATUS_FEASIBLE else 0.0)


def solve(model: MipModel, backend: SolverBackend | None = None,
          gap_tolerance: float = 1e-4, time_limit: float = 600.0) -> Solution:
    """Solve a validated model with the given backend (scipy/HiGHS by default)."""
    model.validate()
    if backend is None:
        backend = ScipyBackend()
    return backend.solve(model, gap_tolerance, time_limit)
