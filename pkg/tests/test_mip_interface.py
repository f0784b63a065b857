"""MIP container, LP/MPS export, backends, and the enumeration cross-check."""

import math
import re
import sys
from pathlib import Path

import numpy as np
import pytest

from frsched.mip_interface import (CONTINUOUS, INTEGER, ExportError, MipModel,
                                   ModelError, ScipyBackend, SubprocessBackend,
                                   constraint_violations, export_model,
                                   objective_value, parse_highs_solution, solve)
from oracles import enumerate_mip

STUB = str(Path(__file__).parent / "stub_solver.py")


def simple_model():
    m = MipModel("simple")
    x = m.add_variable("x", CONTINUOUS, 0.0, 10.0)
    m.add_objective_term(x, 1.0)
    m.add_constraint("c0", {x: 1.0}, ">=", 3.0)
    return m


# ---------------------------------------------------------------------------
# Container invariants
# ---------------------------------------------------------------------------

def test_duplicate_names_rejected():
    m = MipModel()
    m.add_variable("x")
    with pytest.raises(ModelError):
        m.add_variable("x")
    m.add_constraint("c", {0: 1.0}, "<=", 1.0)
    with pytest.raises(ModelError):
        m.add_constraint("c", {0: 1.0}, "<=", 2.0)


def test_integer_needs_finite_bounds():
    m = MipModel()
    with pytest.raises(ModelError):
        m.add_variable("n", INTEGER, 0.0, math.inf)


def test_unknown_variable_index_rejected():
    m = MipModel()
    m.add_variable("x")
    with pytest.raises(ModelError):
        m.add_constraint("c", {5: 1.0}, "<=", 1.0)
    with pytest.raises(ModelError):
        m.add_objective_term(7, 1.0)


def test_constraint_coefficients_merge_and_drop_zeros():
    m = MipModel()
    x = m.add_variable("x")
    y = m.add_variable("y")
    m.add_constraint("c", [(x, 1.0), (x, 2.0), (y, 0.0)], "<=", 4.0)
    assert m.constraints[0].coeffs == ((x, 3.0),)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def test_lp_export_contains_bound_and_constraint_lines():
    text = export_model(simple_model(), "lp_text")
    lines = text.splitlines()
    assert lines[1] == "Minimize"
    assert " obj: 1 x" in lines
    assert " c0: 1 x >= 3" in lines
    assert " 0 <= x <= 10" in lines
    assert lines.index("Minimize") < lines.index("Subject To") < lines.index("Bounds")
    assert lines[-1] == "End"


def test_empty_model_exports_valid_text():
    m = MipModel("empty")
    lp = export_model(m, "lp_text")
    assert "Minimize" in lp and "Subject To" in lp and lp.rstrip().endswith("End")
    mps = export_model(m, "mps_text")
    assert mps.startswith("NAME") and mps.rstrip().endswith("ENDATA")


def test_export_is_deterministic():
    def build():
        m = MipModel("det")
        x = m.add_variable("x", CONTINUOUS, 0, 5)
        n = m.add_variable("n", INTEGER, 0, 3)
        m.add_objective_term(n, 2.5)
        m.add_objective_term(x, -1.0)
        m.add_constraint("c1", {x: 1.0, n: -2.0}, "<=", 4.0)
        m.add_constraint("c2", {n: 1.0}, ">=", 1.0)
        return m
    for fmt in ("lp_text", "mps_text"):
        assert export_model(build(), fmt) == export_model(build(), fmt)


def test_illegal_names_rejected_by_export():
    m = MipModel()
    m.add_variable("bad name")
    with pytest.raises(ExportError):
        export_model(m, "lp_text")
    m2 = MipModel()
    m2.add_variable("3x")
    with pytest.raises(ExportError):
        export_model(m2, "mps_text")
    with pytest.raises(ExportError):
        export_model(MipModel(), "xml")


def test_mps_marks_integer_columns():
    m = MipModel()
    n = m.add_variable("n", INTEGER, 0, 3)
    x = m.add_variable("x", CONTINUOUS, 0, 1)
    m.add_objective_term(n, 1.0)
    m.add_objective_term(x, 1.0)
    text = export_model(m, "mps_text")
    intorg = text.index("'INTORG'")
    intend = text.index("'INTEND'")
    assert intorg < text.index("    n  COST") < intend < text.index("    x  COST")


# ---------------------------------------------------------------------------
# LP re-import round trip (parser local to the test, export under test)
# ---------------------------------------------------------------------------

def parse_lp(text):
    """Minimal reader for the canonical LP layout this package writes."""
    section = None
    obj, cons, bounds, integers = {}, [], {}, set()
    term_re = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?(?:e-?\d+)?)\s+(\w+)")

    def read_expr(expr):
        out = {}
        for sign, coef, name in term_re.findall(expr):
            out[name] = out.get(name, 0.0) + (-1 if sign == "-" else 1) * float(coef)
        return out

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        if line in ("Minimize", "Subject To", "Bounds", "General", "End"):
            section = line
            continue
        if section == "Minimize":
            obj = read_expr(line.split(":", 1)[1])
        elif section == "Subject To":
            name, rest = line.split(":", 1)
            mm = re.match(r"(.*?)(<=|>=|=)\s*(-?\d+(?:\.\d+)?(?:e-?\d+)?)$", rest.strip())
            cons.append((name.strip(), read_expr(mm.group(1)), mm.group(2),
                         float(mm.group(3))))
        elif section == "Bounds":
            if line.endswith("free"):
                bounds[line.split()[0]] = (-math.inf, math.inf)
            elif "<=" in line:
                lo, name, hi = line.split("<=")
                bounds[name.strip()] = (float(lo), float(hi))
            elif ">=" in line:
                name, lo = line.split(">=")
                bounds[name.strip()] = (float(lo), math.inf)
        elif section == "General":
            integers.add(line)
    return obj, cons, bounds, integers


def test_lp_round_trip_solves_identically():
    m = MipModel("rt")
    x = m.add_variable("x", CONTINUOUS, 0, 8)
    n = m.add_variable("n", INTEGER, 0, 5)
    m.add_objective_term(x, 1.5)
    m.add_objective_term(n, 7.0)
    m.add_constraint("lo", {x: 1.0, n: 2.0}, ">=", 6.2)
    obj, cons, bounds, integers = parse_lp(export_model(m, "lp_text"))
    m2 = MipModel("rt2")
    for v in m.variables:
        lo, hi = bounds[v.name]
        m2.add_variable(v.name, INTEGER if v.name in integers else CONTINUOUS, lo, hi)
    for name, expr, sense, rhs in cons:
        m2.add_constraint(name, {m2.variable_index(k): c for k, c in expr.items()},
                          sense, rhs)
    for name, coef in obj.items():
        m2.add_objective_term(m2.variable_index(name), coef)
    s1, s2 = solve(m), solve(m2)
    assert s1.status == s2.status == "optimal"
    assert s1.objective == pytest.approx(s2.objective, abs=1e-9)
    assert s1.values == s2.values


# ---------------------------------------------------------------------------
# Solving
# ---------------------------------------------------------------------------

def test_min_x_at_lower_constraint():
    sol = solve(simple_model())
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(3.0, abs=1e-9)
    assert sol.values["x"] == pytest.approx(3.0, abs=1e-9)


def test_infeasible_status():
    m = MipModel()
    x = m.add_variable("x")
    m.add_constraint("lo", {x: 1.0}, ">=", 3.0)
    m.add_constraint("hi", {x: 1.0}, "<=", 2.0)
    assert solve(m).status == "infeasible"


def test_integer_rounds_up():
    m = MipModel()
    y = m.add_variable("y", INTEGER, 0, 5)
    m.add_objective_term(y, 4.0)
    m.add_constraint("c", {y: 1.0}, ">=", 2.3)
    sol = solve(m)
    assert sol.values["y"] == 3.0
    assert sol.objective == pytest.approx(12.0, abs=1e-9)


def test_empty_model_solves_to_zero():
    sol = solve(MipModel())
    assert sol.status == "optimal" and sol.objective == 0.0


def test_unbounded_status():
    m = MipModel()
    x = m.add_variable("x", CONTINUOUS, -math.inf, math.inf)
    m.add_objective_term(x, 1.0)
    assert solve(m).status == "unbounded"


def random_model(rng, n_int, n_cont, n_cons):
    """Random bounded model, feasible by construction around an interior point."""
    m = MipModel("rand")
    point = []
    for i in range(n_int):
        lo = int(rng.integers(-2, 3))
        hi = lo + int(rng.integers(1, 4))
        m.add_variable(f"n{i}", INTEGER, lo, hi)
        point.append(float(rng.integers(lo, hi + 1)))
    for i in range(n_cont):
        hi = float(rng.uniform(2, 10))
        m.add_variable(f"x{i}", CONTINUOUS, 0.0, hi)
        point.append(float(rng.uniform(0, hi)))
    for i in range(n_int + n_cont):
        m.add_objective_term(i, float(np.round(rng.uniform(-5, 5), 3)))
    for c in range(n_cons):
        size = int(rng.integers(1, min(4, n_int + n_cont) + 1))
        chosen = rng.choice(n_int + n_cont, size=size, replace=False)
        coeffs = {int(i): float(np.round(rng.uniform(-3, 3), 3)) for i in chosen}
        lhs = sum(coef * point[i] for i, coef in coeffs.items())
        sense = ["<=", ">="][int(rng.integers(0, 2))]
        slack = float(rng.uniform(0, 2))
        rhs = lhs + slack if sense == "<=" else lhs - slack
        m.add_constraint(f"c{c}", coeffs, sense, np.round(rhs, 6))
    return m


def test_solutions_pass_independent_feasibility_check():
    rng = np.random.default_rng(3)
    for trial in range(20):
        m = random_model(rng, n_int=3, n_cont=3, n_cons=5)
        sol = solve(m, gap_tolerance=1e-9)
        assert sol.status == "optimal", f"trial {trial}"
        assert constraint_violations(m, sol.values, tol=1e-6) == []
        assert sol.objective == pytest.approx(objective_value(m, sol.values), abs=1e-6)


def test_matches_enumeration_oracle_on_small_models():
    rng = np.random.default_rng(17)
    checked = 0
    for trial in range(15):
        n_int = int(rng.integers(2, 7))
        m = random_model(rng, n_int=n_int, n_cont=2, n_cons=4)
        assert sum(v.kind == INTEGER for v in m.variables) <= 12
        sol = solve(m, gap_tolerance=1e-9)
        oracle = enumerate_mip(m)
        assert oracle is not None and sol.status == "optimal"
        assert sol.objective == pytest.approx(oracle[0], abs=1e-6), f"trial {trial}"
        checked += 1
    assert checked == 15


# ---------------------------------------------------------------------------
# Subprocess backend (driven through the stub executable)
# ---------------------------------------------------------------------------

def stub_backend(extra=""):
    return SubprocessBackend(sys.executable,
                             f"{STUB} {{model_file}} {{solution_file}}{extra}",
                             model_format="mps_text")


def test_subprocess_backend_round_trip():
    m = MipModel("sub")
    x = m.add_variable("x", CONTINUOUS, 0, 10)
    n = m.add_variable("n", INTEGER, 0, 4)
    m.add_objective_term(x, 2.0)
    m.add_objective_term(n, 3.0)
    m.add_constraint("need", {x: 1.0, n: 1.0}, ">=", 3.5)
    via_scipy = solve(m, ScipyBackend())
    via_sub = solve(m, stub_backend())
    assert via_sub.status in ("optimal", "feasible")
    assert via_sub.objective == pytest.approx(via_scipy.objective, abs=1e-6)
    assert constraint_violations(m, via_sub.values, tol=1e-6) == []


def test_subprocess_backend_reports_infeasible():
    m = MipModel()
    x = m.add_variable("x")
    m.add_constraint("lo", {x: 1.0}, ">=", 3.0)
    m.add_constraint("hi", {x: 1.0}, "<=", 2.0)
    assert solve(m, stub_backend()).status == "infeasible"


def test_subprocess_backend_unavailable_executable():
    backend = SubprocessBackend("/nonexistent/solver-binary")
    sol = solve(simple_model(), backend)
    assert sol.status == "error"
    assert "backend unavailable" in sol.detail


def test_subprocess_backend_time_limit():
    sol = solve(simple_model(), stub_backend(extra=" --sleep 5"), time_limit=0.5)
    assert sol.status == "error"
    assert "time limit" in sol.detail


def test_parse_highs_solution_layout():
    status, objective, values = parse_highs_solution(
        "Model status\nOptimal\n\n# Primal solution values\nFeasible\n"
        "Objective 12.5\n# Columns 2\nx 3.0\ny 1.5\n# Rows 1\nc0 4.5\n")
    assert status == "optimal"
    assert objective == 12.5
    assert values == {"x": 3.0, "y": 1.5}
