"""Piecewise-constant input signals (staircase profiles).

Simulations treat these as exogenous drive: the value is constant on
[times[k], times[k+1]) and every step location is a mandatory barrier for
the event clock, so rates stay exact between barriers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PiecewiseConstant:
    """Right-continuous staircase: value(t) = values[k] for times[k] <= t < times[k+1].

    times must start at 0 and increase strictly; values may be any finite
    non-negative floats. Evaluation before times[0] is an error by
    construction (times[0] == 0 and simulations start at t = 0).
    """

    times: np.ndarray
    values: np.ndarray

    def __init__(self, times, values):
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or values.ndim != 1 or times.size != values.size:
            raise ValueError("times and values must be 1-D and equally long")
        if times.size == 0:
            raise ValueError("profile needs at least one segment")
        if times[0] != 0.0:
            raise ValueError("profile must start at t = 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("profile times must increase strictly")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("profile values must be finite and non-negative")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, value):
        return cls([0.0], [float(value)])

    def __call__(self, t):
        k = np.searchsorted(self.times, t, side="right") - 1
        if np.any(k < 0):
            raise ValueError("profile evaluated before t = 0")
        return self.values[k]

    @property
    def breakpoints(self):
        """Interior step locations (the t = 0 start is not a barrier)."""
        return self.times[1:]


@dataclass(frozen=True)
class EnvironmentProfile:
    """Donor and acceptor availability seen by a cell, with its time unit.

    sigma_d and sigma_a are dimensionless occupancies/concentrations in the
    model's own units; time_unit tags what one unit of t means ("s" or "h")
    so outputs can be labeled without guessing.
    """

    sigma_d: PiecewiseConstant
    sigma_a: PiecewiseConstant
    time_unit: str = "s"

    @classmethod
    def constant(cls, sigma_d, sigma_a, time_unit="s"):
        return cls(PiecewiseConstant.constant(sigma_d),
                   PiecewiseConstant.constant(sigma_a), time_unit)

    @property
    def breakpoints(self):
        bp = np.union1d(self.sigma_d.breakpoints, self.sigma_a.breakpoints)
        return bp

    def segments(self, horizon):
        """Yield (t_start, sigma_d, sigma_a) for each constant piece in [0, horizon)."""
        starts = np.union1d([0.0], self.breakpoints)
        starts = starts[starts < horizon]
        for t0 in starts:
            yield float(t0), float(self.sigma_d(t0)), float(self.sigma_a(t0))
