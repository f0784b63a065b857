"""Batch command-line front end: run, sweep, verify, export-model.

Exit codes: 0 success, 1 validation/config/file problems, 2 solver or
verification failures. The external-solver backend is selected with
``--solver subprocess`` and configured through the environment:
FRSCHED_SOLVER names the executable, FRSCHED_SOLVER_ARGS the argument
template (default "{model_file} {solution_file}").
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .mip_interface import ScipyBackend, SubprocessBackend, export_model
from .scenario_runner import (ComplianceError, ScenarioError, SolveSettings,
                              SolverError, build_scheduling_model, efr_sweep,
                              effectiveness_grid, run_scenario,
                              verify_result_files, write_grid_csv,
                              write_result_files, write_sweep_csv)
from .system_model import ConfigError, ProfileError, load_scenario, validate_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _make_backend(args):
    if args.solver == "scipy":
        return ScipyBackend()
    if args.solver == "subprocess":
        exe = os.environ.get("FRSCHED_SOLVER")
        if not exe:
            raise ScenarioError("--solver subprocess needs FRSCHED_SOLVER set to "
                                "the solver executable path")
        template = os.environ.get("FRSCHED_SOLVER_ARGS", "{model_file} {solution_file}")
        return SubprocessBackend(exe, template)
    raise ScenarioError(f"unknown solver {args.solver!r}")


def _settings(args) -> SolveSettings:
    return SolveSettings(backend=_make_backend(args),
                         gap_tolerance=args.gap,
                         time_limit_s=args.time_limit,
                         window_hours=args.windows,
                         n_segments=args.segments,
                         verify=not args.no_verify)


def _add_solve_flags(p):
    p.add_argument("--solver", default="scipy", choices=["scipy", "subprocess"])
    p.add_argument("--gap", type=float, default=1e-4, help="relative MIP gap")
    p.add_argument("--time-limit", type=float, default=600.0,
                   help="seconds per horizon window")
    p.add_argument("--windows", type=int, default=168,
                   help="rolling window length in hours")
    p.add_argument("--segments", type=int, default=16,
                   help="chords in the nadir linearization")
    p.add_argument("--no-verify", action="store_true",
                   help="skip the per-hour swing-equation check")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frsched",
                     description="Co-schedule energy, inertia, and multi-speed "
                                 "frequency response; verify every schedule "
                                 "against a swing-equation simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="solve one scenario and write results")
    p.add_argument("config", help="scenario YAML file")
    p.add_argument("--efr", type=float, default=None, help="EFR capacity in MW")
    p.add_argument("--out", default="results", help="output directory")
    _add_solve_flags(p)

    p = sub.add_parser("sweep", help="solve at several EFR levels")
    p.add_argument("config")
    p.add_argument("--levels", default="0,100,200",
                   help="comma-separated MW levels, ascending, starting at 0")
    p.add_argument("--grid-bins", type=int, default=8,
                   help="bins per axis in the effectiveness grid")
    p.add_argument("--out", default="results")
    _add_solve_flags(p)

    p = sub.add_parser("verify", help="re-check a saved run against the swing model")
    p.add_argument("results_dir", help="directory holding summary.json + hourly.csv")

    p = sub.add_parser("export-model", help="write the MILP as LP/MPS text, no solve")
    p.add_argument("config")
    p.add_argument("--format", default="lp", choices=["lp", "mps"])
    p.add_argument("--efr", type=float, default=None)
    p.add_argument("--segments", type=int, default=16)
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    return parser


def _cmd_run(args) -> int:
    scenario = load_scenario(args.config)
    result = run_scenario(scenario, efr_mw=args.efr, settings=_settings(args))
    write_result_files(result, args.out)
    print(f"{result.scenario_name}: total cost {result.total_cost:,.0f} "
          f"(energy {result.energy_cost:,.0f} + balancing {result.balancing_cost:,.0f}), "
          f"mean PFR requirement {result.p_req_mw.mean():.1f} MW, "
          f"mean SFR requirement {result.s_req_mw.mean():.1f} MW")
    print(f"wrote {Path(args.out) / 'summary.json'} and {Path(args.out) / 'hourly.csv'}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    scenario = load_scenario(args.config)
    try:
        levels = [float(x) for x in args.levels.split(",") if x.strip()]
    except ValueError:
        raise ScenarioError(f"--levels must be comma-separated numbers, got {args.levels!r}")
    sweep = efr_sweep(scenario, levels, settings=_settings(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(sweep, out / "sweep.csv")
    top = max(levels)
    if top > 0:
        grid = effectiveness_grid(sweep.results[0.0], sweep.results[top], top,
                                  n_bins=args.grid_bins)
        write_grid_csv(grid, out / "grid.csv")
        print(f"inertia-demand correlation: {grid.h_d_correlation:+.3f}")
    for row in sweep.rows:
        print(f"EFR {row.efr_mw:7.1f} MW: cost {row.total_cost:14,.0f}  "
              f"abatement {sweep.abatement(row.efr_mw):12,.0f}  "
              f"mean PFR {row.mean_p_req_mw:8.1f} MW  "
              f"mean SFR {row.mean_s_req_mw:8.1f} MW")
    print(f"wrote {out / 'sweep.csv'}" + (f" and {out / 'grid.csv'}" if top > 0 else ""))
    return EXIT_OK


def _cmd_verify(args) -> int:
    checked, failures = verify_result_files(args.results_dir)
    if failures:
        for line in failures:
            print(line, file=sys.stderr)
        print(f"{len(failures)} of {checked} hours failed the swing check",
              file=sys.stderr)
        return EXIT_SOLVER
    print(f"all {checked} hours pass the swing check")
    return EXIT_OK


def _cmd_export(args) -> int:
    scenario = load_scenario(args.config)
    violations = validate_scenario(scenario)
    if violations:
        raise ScenarioError("scenario invalid:\n  " + "\n  ".join(violations))
    if args.efr is not None:
        from dataclasses import replace
        scenario = replace(scenario, freq=replace(scenario.freq, efr_mw=args.efr))
    from . import fr_requirements as frq
    lo, hi = frq.possible_inertia_range(scenario)
    k = frq.nadir_constant(scenario.freq)
    segments = (frq.build_chord_segments(k, lo, hi, args.segments) if k > 0
                else frq.build_chord_segments(0.0, max(lo, 1.0), max(hi, 2.0), 1))
    model, _ = build_scheduling_model(scenario, include_fr=True, segments=segments,
                                      name=scenario.name)
    text = export_model(model, "lp_text" if args.format == "lp" else "mps_text")
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"run": _cmd_run, "sweep": _cmd_sweep, "verify": _cmd_verify,
                "export-model": _cmd_export}
    try:
        return handlers[args.command](args)
    except (ScenarioError, ConfigError, ProfileError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SolverError, ComplianceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    raise SystemExit(main())
