"""Generic continuous-time Markov chain machinery.

Exact trajectory simulation (Gillespie direct method with breakpoint
barriers for staircase inputs), dense generator enumeration, stationary
distributions, and master-equation integration share the types here.
"""

from .cme import CmeResult, cme_expectations, STATE_CAP
from .generator import (Generator, network_to_generator,
                        stationary_distribution)
from .network import Component, EventChannel, ReactionNetwork, StateSchema, Trajectory
from .rng import run_stream, stream, substream
from .ssa import (DEFAULT_EVENT_CAP, EnsembleStats, ensemble_mean, simulate,
                  ssa_step)

__all__ = [
    "CmeResult", "Component", "DEFAULT_EVENT_CAP", "EnsembleStats",
    "EventChannel", "Generator", "ReactionNetwork", "STATE_CAP",
    "StateSchema", "Trajectory", "cme_expectations", "ensemble_mean",
    "network_to_generator", "run_stream", "simulate", "ssa_step",
    "stationary_distribution", "stream", "substream",
]
