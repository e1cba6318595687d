"""Master-equation integration: dp/dt = p^T Q with an adaptive explicit scheme.

Works on dense enumerated generators, optionally piecewise in time (the
generator is swapped at each breakpoint, matching staircase inputs). Sized
for a few thousand states; bigger models should use the stochastic
simulator and ensemble averaging instead.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import expm_multiply

from ..errors import ModelDefinitionError, StateSpaceTooLargeError
from .generator import Generator

STATE_CAP = 4096


class CmeResult:
    """Distribution snapshots plus expectations of requested components."""

    def __init__(self, times, dist, expectations):
        self.times = times
        self.dist = dist
        self.expectations = expectations

    def expectation(self, name):
        return self.expectations[name]


def _segments(gen_or_segments, horizon):
    if isinstance(gen_or_segments, Generator):
        segs = [(0.0, gen_or_segments)]
    else:
        segs = [(float(t0), g) for t0, g in gen_or_segments]
    if not segs or segs[0][0] != 0.0:
        raise ValueError("segments must start at t = 0")
    starts = [t0 for t0, _ in segs]
    if any(b <= a for a, b in zip(starts, starts[1:])):
        raise ValueError("segment start times must increase strictly")
    n = segs[0][1].n_states
    for _, g in segs:
        if g.n_states != n:
            raise ModelDefinitionError("all segments must share one state space")
    ends = starts[1:] + [math.inf]
    return [(t0, min(t1, horizon), g)
            for (t0, g), t1 in zip(segs, ends) if t0 < horizon]


def cme_expectations(gen_or_segments, init_dist, horizon, step=None,
                     components=None, eval_times=None,
                     rtol=1e-10, atol=1e-13, state_cap=STATE_CAP,
                     method="dop853") -> CmeResult:
    """Integrate the master equation and report component expectations.

    init_dist must sum to 1 within 1e-9. Output instants are k*step up to
    the horizon unless eval_times (strictly increasing) overrides them.
    method "dop853" integrates the ODE with the given tolerances; "expm"
    propagates by the action of the matrix exponential, which is exact per
    constant-rate segment and much faster when the same system is solved
    repeatedly (e.g. inside a fitting loop). Raises if the state space
    exceeds state_cap, if total probability mass drifts beyond 1e-8
    anywhere in the output, or if any entry dips below -1e-6 (small
    negative excursions are integrator noise and are kept).
    """
    horizon = float(horizon)
    segs = _segments(gen_or_segments, horizon)
    gen0 = segs[0][2]
    n = gen0.n_states
    if n > state_cap:
        raise StateSpaceTooLargeError(
            f"{n} states exceeds the dense-integration cap {state_cap}; "
            "use the stochastic simulator with ensemble averaging")
    p = np.asarray(init_dist, dtype=float).copy()
    if p.shape != (n,):
        raise ValueError(f"init_dist must have length {n}")
    if abs(p.sum() - 1.0) > 1e-9 or np.any(p < 0):
        raise ValueError("init_dist must be a probability vector")

    if eval_times is None:
        if step is None:
            raise ValueError("give either step or eval_times")
        n_out = int(math.floor(horizon / step + 1e-9)) + 1
        out_times = np.minimum(np.arange(n_out) * step, horizon)
    else:
        out_times = np.asarray(eval_times, dtype=float)
        if out_times.size == 0 or np.any(np.diff(out_times) <= 0):
            raise ValueError("eval_times must increase strictly")
        if out_times[0] < 0 or out_times[-1] > horizon + 1e-12:
            raise ValueError("eval_times must lie within [0, horizon]")

    if method not in ("dop853", "expm"):
        raise ValueError(f"unknown integration method {method!r}")
    dist = np.empty((out_times.size, n))
    at_start = out_times <= 0.0
    dist[at_start] = p
    for t0, t1, gen in segs:
        if t1 <= t0:
            continue
        idx = np.nonzero((out_times > t0) & (out_times <= t1))[0]
        if method == "expm":
            qt = csr_matrix(gen.q.T)
            offs = out_times[idx] - t0
            t_prev = t0
            emitted = False
            if offs.size >= 2:
                h = (offs[-1] - offs[0]) / (offs.size - 1)
                if h > 0 and np.allclose(np.diff(offs), h, rtol=0, atol=1e-9 * h):
                    # uniform grid: one exponential-action series per segment
                    series = expm_multiply(qt, p, start=offs[0], stop=offs[-1],
                                           num=offs.size, endpoint=True)
                    dist[idx] = series
                    p = series[-1].copy()
                    t_prev = out_times[idx[-1]]
                    emitted = True
            if not emitted:
                for i in idx:
                    dt = out_times[i] - t_prev
                    if dt > 0.0:
                        p = expm_multiply(qt * dt, p)
                    dist[i] = p
                    t_prev = out_times[i]
            if t1 > t_prev:
                p = expm_multiply(qt * (t1 - t_prev), p)
            continue
        t_eval = np.unique(np.concatenate([out_times[idx], [t1]]))
        qt = np.ascontiguousarray(gen.q.T)
        sol = solve_ivp(lambda t, y: qt @ y, (t0, t1), p, method="DOP853",
                        t_eval=t_eval, rtol=rtol, atol=atol)
        if not sol.success:
            raise ModelDefinitionError(
                f"master-equation integration failed: {sol.message}")
        cols = np.searchsorted(sol.t, out_times[idx])
        dist[idx] = sol.y[:, cols].T
        p = sol.y[:, -1].copy()

    mass_err = np.max(np.abs(dist.sum(axis=1) - 1.0))
    if mass_err > 1e-8 or dist.min() < -1e-6:
        raise ModelDefinitionError(
            f"probability mass drifted by {mass_err:.2e} (min entry "
            f"{dist.min():.2e}); tighten tolerances or shorten the horizon")

    expectations = {}
    if components:
        if gen0.states is None or gen0.names is None:
            raise ValueError("generator has no state labels to take expectations over")
        for name in components:
            vals = gen0.component_values(name).astype(float)
            expectations[name] = dist @ vals
    return CmeResult(out_times, dist, expectations)
