"""State schemas, event channels, reaction networks, and trajectories.

A state is a vector of non-negative integer components, some with hard
capacities and some flagged as cumulative counters (ledgers that only ever
grow and never influence rates). Channels carry a propensity function of
(state, t) plus either a fixed integer delta or a custom effect callable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import ModelDefinitionError


@dataclass(frozen=True)
class Component:
    """One named integer coordinate of the state vector.

    capacity is an inclusive upper bound (None = unbounded). counter marks
    cumulative bookkeeping coordinates: they are excluded from state-space
    enumeration and rates must not read them.
    """

    name: str
    capacity: int | None = None
    counter: bool = False

    def __post_init__(self):
        if self.capacity is not None and self.capacity < 0:
            raise ModelDefinitionError(f"component {self.name}: capacity must be >= 0")
        if self.counter and self.capacity is not None:
            raise ModelDefinitionError(f"component {self.name}: counters are unbounded")


class StateSchema:
    """Ordered component list with name lookup and bounds checking."""

    def __init__(self, components: Sequence[Component]):
        names = [c.name for c in components]
        if len(set(names)) != len(names):
            raise ModelDefinitionError("component names must be unique")
        self.components = tuple(components)
        self.names = tuple(names)
        self._index = {n: i for i, n in enumerate(names)}
        self.capacities = tuple(c.capacity for c in components)

    def __len__(self):
        return len(self.components)

    def index(self, name: str) -> int:
        return self._index[name]

    def state(self, **values) -> list[int]:
        """Build a state list, unspecified components zero."""
        s = [0] * len(self.components)
        for name, v in values.items():
            s[self._index[name]] = int(v)
        self.validate(s)
        return s

    def validate(self, state) -> None:
        if len(state) != len(self.components):
            raise ModelDefinitionError(
                f"state has {len(state)} entries, schema has {len(self.components)}")
        for v, comp in zip(state, self.components):
            if v < 0 or (comp.capacity is not None and v > comp.capacity):
                raise ModelDefinitionError(
                    f"component {comp.name}={v} outside [0, {comp.capacity}]")

    def core_indices(self) -> list[int]:
        """Indices of non-counter components (the dynamical coordinates)."""
        return [i for i, c in enumerate(self.components) if not c.counter]


@dataclass(frozen=True)
class EventChannel:
    """A reaction: propensity(state, t) -> rate, plus its state update.

    Exactly one of delta / effect must be given. delta maps component name
    to an integer change. effect(state_list, rng) mutates the state in
    place and may draw from rng (stochastic effects); it is exempt from
    enumeration but not from bounds checking.
    """

    name: str
    propensity: Callable
    delta: dict[str, int] | None = None
    effect: Callable | None = None

    def __post_init__(self):
        if (self.delta is None) == (self.effect is None):
            raise ModelDefinitionError(
                f"channel {self.name}: give exactly one of delta or effect")


class ReactionNetwork:
    """Channels over a schema, with optional time breakpoints.

    breakpoints are the instants where any propensity may jump (staircase
    inputs); between consecutive breakpoints every propensity must be
    constant in t. The simulator treats them as barriers: a holding time
    that would cross one is discarded at the barrier and redrawn, which is
    exact for piecewise-constant rates.
    """

    def __init__(self, schema: StateSchema, channels: Sequence[EventChannel],
                 breakpoints=(), name: str = ""):
        chan_names = [c.name for c in channels]
        if len(set(chan_names)) != len(chan_names):
            raise ModelDefinitionError("channel names must be unique")
        self.schema = schema
        self.channels = tuple(channels)
        bp = np.asarray(sorted(set(float(b) for b in breakpoints)), dtype=float)
        if bp.size and bp[0] <= 0:
            raise ModelDefinitionError("breakpoints must be strictly positive times")
        self.breakpoints = bp
        self.name = name
        # Precompute (index, change) pairs for the fast loop.
        self._compiled = []
        for ch in self.channels:
            if ch.delta is not None:
                pairs = tuple((schema.index(k), int(v)) for k, v in ch.delta.items()
                              if int(v) != 0)
                self._compiled.append((ch, pairs))
            else:
                self._compiled.append((ch, None))

    def propensities(self, state, t: float) -> list[float]:
        """Evaluate every channel at (state, t), validating each value."""
        out = []
        for ch in self.channels:
            p = ch.propensity(state, t)
            if not (p >= 0.0) or p == float("inf"):
                raise ModelDefinitionError(
                    f"channel {ch.name}: propensity {p!r} at state {list(state)}, t={t}")
            out.append(p)
        return out


@dataclass
class Trajectory:
    """Uniformly sampled path: samples[k] is the state held just before times[k]."""

    times: np.ndarray
    samples: np.ndarray
    names: tuple[str, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.samples.shape != (self.times.size, len(self.names)):
            raise ValueError("samples shape must be (n_times, n_components)")

    def component(self, name: str) -> np.ndarray:
        return self.samples[:, self.names.index(name)]

    @property
    def event_count(self) -> int:
        return self.metadata.get("event_count", 0)

    @property
    def truncated(self) -> bool:
        return bool(self.metadata.get("truncated", False))
