"""Stochastic colony signaling models: shared-medium signal exchange,
threshold-gated receptor activation, colony growth, and signal interference.
"""

from .fit import GrowthFit, fit_logistic, logistic
from .network import (LEDGER_NAMES, build_colony_network, initial_colony_state,
                      interference_names)
from .params import (COUNT_PER_NM_FL, MECHANISMS, InterferenceParams,
                     QuorumParams, concentrations, delta_a_of, growth_rate,
                     lambda_c_of)
from .simulate import (ColonyRun, activation_time, duplicate_split,
                       duplication_times, simulate_colony)

__all__ = [
    "COUNT_PER_NM_FL",
    "MECHANISMS",
    "ColonyRun",
    "GrowthFit",
    "InterferenceParams",
    "LEDGER_NAMES",
    "QuorumParams",
    "activation_time",
    "build_colony_network",
    "concentrations",
    "delta_a_of",
    "duplicate_split",
    "duplication_times",
    "fit_logistic",
    "growth_rate",
    "initial_colony_state",
    "interference_names",
    "lambda_c_of",
    "logistic",
    "simulate_colony",
]
