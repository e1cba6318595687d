"""Exact stochastic simulation (Gillespie direct method) over reaction networks.

Draw discipline, fixed for reproducibility: each attempted step consumes one
uniform for the holding time (dt = -log1p(-u)/total), then one uniform for
channel selection by cumulative scan in declared channel order, then any
draws the selected channel's stochastic effect makes. If the holding time
would cross a breakpoint barrier, the clock advances to the barrier and the
selection uniform is never drawn; rates are re-evaluated and the holding
time redrawn, which is exact for piecewise-constant rates.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import BoundsViolationError, ModelDefinitionError
from .network import ReactionNetwork, Trajectory
from .rng import run_stream, stream

DEFAULT_EVENT_CAP = 5_000_000_000


def _validate_propensity(name, p, state, t):
    # NaN fails p >= 0.0, so one branch catches negatives and NaN alike.
    if not (p >= 0.0) or p == math.inf:
        raise ModelDefinitionError(
            f"channel {name}: propensity {p!r} at state {list(state)}, t={t}")


def _apply(network, compiled_entry, state, rng):
    ch, pairs = compiled_entry
    if pairs is not None:
        caps = network.schema.capacities
        for idx, dv in pairs:
            v = state[idx] + dv
            cap = caps[idx]
            if v < 0 or (cap is not None and v > cap):
                raise BoundsViolationError(
                    f"channel {ch.name}: component {network.schema.names[idx]} "
                    f"would become {v}")
            state[idx] = v
    else:
        ch.effect(state, rng)
        network.schema.validate(state)


def ssa_step(network: ReactionNetwork, state, t: float, rng):
    """One exact jump: returns (dt, channel_name, next_state).

    Zero total propensity returns (inf, None, state) without consuming any
    randomness. The caller owns breakpoint handling; propensities are
    evaluated at the given t.
    """
    work = list(state)
    props = network.propensities(work, t)
    total = 0.0
    for p in props:
        total += p
    if total == 0.0:
        return math.inf, None, tuple(state)
    dt = -math.log1p(-rng.random()) / total
    r = rng.random() * total
    acc = 0.0
    chosen = None
    for i, p in enumerate(props):
        acc += p
        if r < acc:
            chosen = i
            break
    if chosen is None:  # r landed on the rounding edge; take the last live channel
        chosen = max(i for i, p in enumerate(props) if p > 0.0)
    _apply(network, network._compiled[chosen], work, rng)
    return dt, network.channels[chosen].name, tuple(work)


def simulate(network: ReactionNetwork, init, horizon: float, sample_period: float,
             seed, max_events: int = DEFAULT_EVENT_CAP, metadata=None) -> Trajectory:
    """Simulate one trajectory and sample it on a uniform grid.

    Samples sit at k*sample_period for k = 0..floor(horizon/sample_period),
    each recording the state held just before the sample instant (an event
    landing exactly on the instant is not yet visible). Deterministic given
    (network, init, seed). If max_events is exceeded the trajectory is
    returned truncated and flagged in metadata.
    """
    if horizon <= 0 or sample_period <= 0:
        raise ValueError("horizon and sample_period must be positive")
    schema = network.schema
    state = list(init)
    schema.validate(state)

    n_samples = int(math.floor(horizon / sample_period + 1e-9)) + 1
    # k*period can exceed horizon by one ulp; the final sample means "at the
    # horizon", so clamp instead of dropping it.
    sample_times = np.minimum(np.arange(n_samples) * sample_period, horizon)
    samples = np.empty((n_samples, len(schema)), dtype=np.int64)

    rng = stream(seed)
    barriers = [b for b in network.breakpoints if b < horizon]
    barriers.append(horizon)
    bi = 0
    t = 0.0
    k = 0
    events = 0
    truncated = False

    channels = network.channels
    compiled = network._compiled
    props = [0.0] * len(channels)

    while True:
        total = 0.0
        for i, ch in enumerate(channels):
            p = ch.propensity(state, t)
            if not (p >= 0.0) or p == math.inf:
                _validate_propensity(ch.name, p, state, t)
            props[i] = p
            total += p

        barrier = barriers[bi]
        if total > 0.0:
            t_next = t - math.log1p(-rng.random()) / total
        else:
            t_next = math.inf

        if t_next >= barrier:
            # No event before the barrier: emit samples and advance.
            while k < n_samples and sample_times[k] <= barrier:
                samples[k] = state
                k += 1
            t = barrier
            bi += 1
            if bi == len(barriers):
                break
            continue

        # An event fires at t_next; samples up to and including that instant
        # still see the pre-event state.
        while k < n_samples and sample_times[k] <= t_next:
            samples[k] = state
            k += 1
        r = rng.random() * total
        acc = 0.0
        chosen = None
        for i in range(len(channels)):
            acc += props[i]
            if r < acc:
                chosen = i
                break
        if chosen is None:
            chosen = max(i for i in range(len(channels)) if props[i] > 0.0)
        _apply(network, compiled[chosen], state, rng)
        events += 1
        t = t_next
        if events >= max_events:
            truncated = True
            break

    meta = dict(metadata or {})
    meta.update(event_count=events, truncated=truncated,
                network=network.name or None)
    if not isinstance(seed, np.random.Generator):
        meta["seed"] = seed
    return Trajectory(times=sample_times[:k], samples=samples[:k],
                      names=schema.names, metadata=meta)


class EnsembleStats:
    """Per-instant mean and population variance over an ensemble of runs."""

    def __init__(self, times, mean, variance, n_runs, names):
        self.times = times
        self.mean = mean
        self.variance = variance
        self.n_runs = n_runs
        self.names = names

    def component_mean(self, name):
        return self.mean[:, self.names.index(name)]

    def component_variance(self, name):
        return self.variance[:, self.names.index(name)]

    def standard_error(self, name):
        """SE of the mean, with the n/(n-1) sample correction (0 for n=1)."""
        if self.n_runs < 2:
            return np.zeros(self.times.size)
        var = self.component_variance(name) * self.n_runs / (self.n_runs - 1)
        return np.sqrt(var / self.n_runs)


def ensemble_mean(network, init, horizon, sample_period, n_runs, base_seed,
                  max_events=DEFAULT_EVENT_CAP) -> EnsembleStats:
    """Run n_runs independent trajectories and accumulate mean/variance.

    Run r draws from the stream keyed by (base_seed, r); accumulation walks
    runs in index order, so the result is independent of any execution
    schedule. Failures are re-raised tagged with the run index.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    mean = None
    m2 = None
    times = None
    for r in range(n_runs):
        try:
            traj = simulate(network, init, horizon, sample_period,
                            run_stream(base_seed, r), max_events=max_events)
        except Exception as exc:
            raise type(exc)(f"ensemble run {r}: {exc}") from exc
        x = traj.samples.astype(float)
        if mean is None:
            times = traj.times
            mean = np.zeros_like(x)
            m2 = np.zeros_like(x)
        delta = x - mean
        mean += delta / (r + 1)
        m2 += delta * (x - mean)
    return EnsembleStats(times, mean, m2 / n_runs, n_runs, network.schema.names)
