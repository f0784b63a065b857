#!/usr/bin/env python3
"""Stand-in MIP solver executable for subprocess-backend tests.

Usage: stub_solver.py MODEL.mps SOLUTION.sol [--sleep SECONDS]

Reads a free-form MPS file, solves it in-process, and writes a HiGHS-style
solution file. Exists so the subprocess plumbing (model write, invocation,
solution parse) can be exercised without a real third-party solver binary.
"""

import sys
import time


def parse_mps(text):
    rows = {}          # name -> sense
    row_order = []
    cols = {}          # var -> list[(row, coef)]
    col_order = []
    integers = set()
    rhs = {}
    bounds = {}        # var -> [lo, up]
    section = None
    in_integer = False
    for raw in text.splitlines():
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        head = raw.split()
        if raw[0] not in " \t":
            section = head[0]
            continue
        if section == "ROWS":
            sense, name = head
            if sense != "N":
                rows[name] = {"L": "<=", "G": ">=", "E": "="}[sense]
                row_order.append(name)
        elif section == "COLUMNS":
            if len(head) >= 3 and head[1] == "'MARKER'":
                in_integer = head[2] == "'INTORG'"
                continue
            var, row, coef = head[0], head[1], float(head[2])
            if var not in cols:
                cols[var] = []
                col_order.append(var)
                if in_integer:
                    integers.add(var)
            cols[var].append((row, coef))
        elif section == "RHS":
            rhs[head[1]] = float(head[2])
        elif section == "BOUNDS":
            kind, _, var = head[0], head[1], head[2]
            entry = bounds.setdefault(var, [0.0, float("inf")])
            if kind == "LO":
                entry[0] = float(head[3])
            elif kind == "UP":
                entry[1] = float(head[3])
            elif kind == "FR":
                entry[0], entry[1] = float("-inf"), float("inf")
            elif kind == "MI":
                entry[0] = float("-inf")
    return rows, row_order, cols, col_order, integers, rhs, bounds


def main():
    model_file, solution_file = sys.argv[1], sys.argv[2]
    if "--sleep" in sys.argv:
        time.sleep(float(sys.argv[sys.argv.index("--sleep") + 1]))
    with open(model_file) as fh:
        rows, row_order, cols, col_order, integers, rhs, bnds = parse_mps(fh.read())

    from frsched.mip_interface import (CONTINUOUS, INTEGER, MipModel,
                                       ScipyBackend)
    m = MipModel("stub")
    for var in col_order:
        lo, up = bnds.get(var, [0.0, float("inf")])
        m.add_variable(var, INTEGER if var in integers else CONTINUOUS, lo, up)
    by_row = {}
    for var, entries in cols.items():
        vi = m.variable_index(var)
        for row, coef in entries:
            if row == "COST":
                m.add_objective_term(vi, coef)
            else:
                by_row.setdefault(row, []).append((vi, coef))
    for row in row_order:
        m.add_constraint(row, by_row.get(row, []), rows[row], rhs.get(row, 0.0))
    sol = ScipyBackend().solve(m, 1e-9, 300.0)

    with open(solution_file, "w") as fh:
        fh.write("Model status\n")
        fh.write({"optimal": "Optimal", "feasible": "Feasible",
                  "infeasible": "Infeasible", "unbounded": "Unbounded",
                  }.get(sol.status, "Error") + "\n\n")
        fh.write("# Primal solution values\n")
        if sol.ok:
            fh.write("Feasible\n")
            fh.write(f"Objective {sol.objective!r}\n")
            fh.write(f"# Columns {len(sol.values)}\n")
            for name in col_order:
                fh.write(f"{name} {sol.values[name]!r}\n")
        else:
            fh.write("None\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
