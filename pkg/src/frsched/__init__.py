"""Unit-commitment co-scheduling of energy, inertia, and multi-speed frequency response."""

from .fr_requirements import (ChordSegmentSet, FrRequirementBreakdown,
                              build_chord_segments, nadir_constant,
                              pfr_offset_per_mw, possible_inertia_range,
                              requirement_breakdown)
from .mip_interface import (MipModel, ScipyBackend, Solution, SolverBackend,
                            SubprocessBackend, constraint_violations,
                            export_model, solve)
from .scenario_runner import (EffectivenessGrid, ScenarioResult, SolveSettings,
                              SweepResult, effectiveness_grid, efr_sweep,
                              run_scenario, seasonal_report)
from .swing_verifier import (ComplianceReport, FrequencyTrace, ResponsePortfolio,
                             check_compliance, simulate)
from .system_model import (FrequencyParams, GeneratorGroup, InitialGroupState,
                           Scenario, StorageUnit, Technology, TimeSeriesProfile,
                           load_profiles, load_scenario, save_scenario,
                           validate_scenario)

__version__ = "0.1.0"
