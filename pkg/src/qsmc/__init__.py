"""Sliding-mode control of finite-level quantum systems under Hamiltonian uncertainty."""
from .amplification import (AmplitudeAmplifier, build_Q, recovery_state,
                            select_iteration_count)
from .bangbang import ControlSchedule, design_single_switch, schedule_library
from .errors import (AmplificationError, ConfigError, ConsistencyError, DimensionError,
                     InfeasibleSchedule, InvalidBlochVector, InvalidModel,
                     IterationBudgetExceeded, QSMCError)
from .models import (HamiltonianModel, UncertaintyRealization, five_level_model_I, get_model,
                     three_level_model, two_level_model)
from .period import (UNBOUNDED, three_level_period, three_level_worst_case, two_level_failure,
                     two_level_period)
from .quantum import (BlochVector, basis_state, bloch_from_state, fidelity, gate_fidelity,
                      measure_projective, propagate, unitary)
from .scenario import Scenario, ScenarioReport, load_scenario, parse_scenario, run_scenario
from .sliding import SlidingMode, in_domain, surface_value, verify_invariance

__version__ = "0.1.0"

__all__ = [
    "AmplitudeAmplifier", "build_Q", "recovery_state", "select_iteration_count",
    "ControlSchedule", "design_single_switch", "schedule_library",
    "AmplificationError", "ConfigError", "ConsistencyError", "DimensionError",
    "InfeasibleSchedule", "InvalidBlochVector", "InvalidModel", "IterationBudgetExceeded",
    "QSMCError", "HamiltonianModel", "UncertaintyRealization", "five_level_model_I", "get_model",
    "three_level_model", "two_level_model", "UNBOUNDED", "three_level_period",
    "three_level_worst_case", "two_level_failure", "two_level_period", "BlochVector",
    "basis_state", "bloch_from_state", "fidelity", "gate_fidelity", "measure_projective",
    "propagate", "unitary", "Scenario", "ScenarioReport", "load_scenario", "parse_scenario",
    "run_scenario", "SlidingMode", "in_domain", "surface_value", "verify_invariance",
]
