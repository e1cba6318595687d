"""Colony simulation drivers.

Colony growth is autonomous (its rate depends only on the cell count), so a
run factorizes exactly into two stages with independent random substreams:
stage one draws the duplication time staircase from substream(seed, 0), stage
two runs the chemistry against those times as barriers using
substream(seed, 1). Two runs sharing a base seed therefore share the same
growth history, which makes paired comparisons (open vs closed vessel, with
vs without an interferer) variance-reduced in the growth direction.

Aggregate mode uses the compiled kernel. Per-cell mode tracks receptor,
complex, and synthase counts for every cell individually and emits the same
aggregate columns; exchange through the shared medium makes the aggregate law
identical, which the test suite checks.

Units: state columns are molecule counts (token counts times the batching
quantum); concentration columns are nanomolar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..engine.rng import substream
from .params import (COUNT_PER_NM_FL, InterferenceParams, QuorumParams,
                     delta_a_of, growth_rate)
from . import kernel

DEFAULT_HORIZON = 12.0
DEFAULT_SAMPLE_PERIOD = 1.0 / 6.0

COUNT_COLUMNS = ("N", "A", "R_tot", "C_tot", "S_tot",
                 "produced_A", "leaked_A", "degraded_C", "V_expr")


def duplication_times(params: QuorumParams, n0: int, horizon: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Times at which the colony gains a cell, up to the horizon.

    The colony-level duplication rate with n cells is n * growth_rate(n), so
    waiting times are exponential with that rate; the walk stops when the
    rate hits zero (carrying capacity) or the horizon is passed.
    """
    if n0 < 1:
        raise ValueError("n0 must be at least 1")
    times = []
    t = 0.0
    n = n0
    while True:
        rate = n * growth_rate(n, params)
        if rate <= 0.0:
            break
        t -= math.log1p(-rng.random()) / rate
        if t >= horizon:
            break
        times.append(t)
        n += 1
    return np.array(times, dtype=np.float64)


def _sample_grid(horizon: float, period: float) -> np.ndarray:
    if horizon <= 0 or period <= 0:
        raise ValueError("horizon and sample_period must be positive")
    n_samples = int(math.floor(horizon / period + 1e-9)) + 1
    return np.minimum(np.arange(n_samples) * period, horizon)


@dataclass(frozen=True)
class ColonyRun:
    """Sampled trajectory of one colony run.

    Count columns hold molecule counts; eta columns hold concentrations in
    nanomolar. metadata records the seed, event count, and how the run ended.
    """

    times: np.ndarray
    columns: dict[str, np.ndarray]
    params: QuorumParams
    metadata: dict = field(default_factory=dict)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.columns)

    def component(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise KeyError(f"unknown column {name!r}; have {sorted(self.columns)}")
        return self.columns[name]


def _attach_concentrations(times, counts, rows, params, has_interference):
    q = params.quanta
    cols: dict[str, np.ndarray] = {}
    n_col = counts[:rows, 0].copy()
    cols["N"] = n_col
    for j, name in enumerate(("A", "R_tot", "C_tot", "S_tot"), start=1):
        cols[name] = counts[:rows, j] * q
    if has_interference:
        cols["I"] = counts[:rows, 5] * q
    for j, name in enumerate(("produced_A", "leaked_A", "degraded_C", "V_expr"),
                             start=6):
        cols[name] = counts[:rows, j] * q
    v_tot = np.array([params.v_tot_fl(int(n)) for n in n_col])
    v_cell = n_col * params.phi_cell_fl
    denom_tot = v_tot * COUNT_PER_NM_FL
    denom_cell = v_cell * COUNT_PER_NM_FL
    cols["eta_A_nM"] = cols["A"] / denom_tot
    cols["eta_R_nM"] = cols["R_tot"] / denom_cell
    cols["eta_C_nM"] = cols["C_tot"] / denom_cell
    cols["eta_S_nM"] = cols["S_tot"] / denom_cell
    return times[:rows].copy(), cols


def simulate_colony(params: QuorumParams, *, mode: str = "aggregate",
                    horizon: float = DEFAULT_HORIZON,
                    sample_period: float = DEFAULT_SAMPLE_PERIOD,
                    seed: int = 0,
                    interference: InterferenceParams | None = None,
                    initial_signals: int = 0,
                    n0: int = 1,
                    stop_on_activation: bool = False,
                    check_ledger: bool = False,
                    max_events: int = 2 ** 62,
                    compiled: bool = True) -> ColonyRun:
    """Run one colony realization and return its sampled trajectory.

    mode "aggregate" evolves colony totals with the compiled kernel; mode
    "per_cell" tracks each cell's receptor, complex, and synthase counts and
    reports the same aggregate columns. stop_on_activation ends the run at
    the first sample whose signal concentration reaches the activation
    threshold. check_ledger verifies the signal bookkeeping identity after
    every event and aborts on the first violation.
    """
    if mode not in ("aggregate", "per_cell"):
        raise ValueError(f"mode must be 'aggregate' or 'per_cell', got {mode!r}")
    if initial_signals < 0:
        raise ValueError("initial_signals must be non-negative")
    growth_rng = substream(seed, 0)
    chem_rng = substream(seed, 1)
    dup = duplication_times(params, n0, horizon, growth_rng)
    sample_times = _sample_grid(horizon, sample_period)

    if mode == "aggregate":
        init = np.zeros(9, dtype=np.int64)
        init[4] = initial_signals
        counts, rows, events, status = kernel.run_aggregate(
            params, dup, horizon, sample_times, chem_rng,
            interference=interference, init=init, max_events=max_events,
            check_ledger=check_ledger, stop_at_threshold=stop_on_activation,
            n0=n0, compiled=compiled)
    else:
        counts, rows, events, status = _per_cell_run(
            params, dup, horizon, sample_times, chem_rng,
            interference=interference, initial_signals=initial_signals,
            max_events=max_events, check_ledger=check_ledger,
            stop_at_threshold=stop_on_activation, n0=n0)

    if status == kernel.STATUS_LEDGER_BROKEN:
        raise RuntimeError(
            f"signal ledger identity violated after {events} events")
    times, cols = _attach_concentrations(sample_times, counts, rows, params,
                                         interference is not None)
    meta = {"seed": seed, "mode": mode, "event_count": events,
            "truncated": status == kernel.STATUS_TRUNCATED,
            "stopped_on_activation": status == kernel.STATUS_ACTIVATED,
            "duplications": int(dup.size)}
    return ColonyRun(times=times, columns=cols, params=params, metadata=meta)


def activation_time(run: ColonyRun, params: QuorumParams | None = None):
    """First sample time at which the signal concentration reaches the
    activation threshold, or None if it never does within the run."""
    p = params if params is not None else run.params
    eta = run.component("eta_A_nM")
    hit = np.nonzero(eta >= p.eta_a_th_nm)[0]
    if hit.size == 0:
        return None
    return float(run.times[hit[0]])


def duplicate_split(cell: Sequence[int], rng: np.random.Generator):
    """Split one cell's (receptor, complex, synthase) holdings between two
    daughters, each item going to the first daughter with probability 1/2.

    Draw order is fixed: receptor split, then complex, then synthase.
    """
    first = []
    second = []
    for count in cell:
        if count < 0:
            raise ValueError("cell counts must be non-negative")
        keep = int(rng.binomial(int(count), 0.5)) if count else 0
        first.append(keep)
        second.append(int(count) - keep)
    return tuple(first), tuple(second)


def _per_cell_run(params, dup, horizon, sample_times, rng, *, interference,
                  initial_signals, max_events, check_ledger,
                  stop_at_threshold, n0):
    """Pure-python per-cell chemistry against the precomputed growth barriers.

    Extra draws relative to aggregate mode, in order: the owning cell for any
    event that touches a specific cell's holdings (one uniform, cumulative
    scan over per-cell weights), and at each duplication one uniform for the
    dividing cell plus the three binomial splits of duplicate_split.
    """
    q = float(params.quanta)
    seg = kernel.prepare_segments(params, dup, horizon, interference, n0=n0)
    seg_end = seg["seg_end"]
    bind_target = seg["bind_target"]
    mu_i = seg["mu_i"]

    r_i = [0] * n0
    c_i = [0] * n0
    s_i = [0] * n0
    a = 0
    ipool = int(initial_signals)
    produced = leaked = degraded = vexpr = 0

    eps_s1, eps_r1, eps_v1 = (params.eps0[0] / q, params.eps0[1] / q,
                              params.eps0[2] / q)
    epsc_s, epsc_r, epsc_v = params.eps_c[0], params.eps_c[1], params.eps_c[2]

    n_samples = sample_times.shape[0]
    out = np.zeros((n_samples, 10), dtype=np.int64)
    m = 0
    events = 0
    t = 0.0
    kseg = 0
    n_segments = seg_end.shape[0]
    props = np.zeros(13)

    def emit(limit):
        nonlocal m
        n_now = n0 + kseg
        while m < n_samples and sample_times[m] <= limit:
            out[m, 0] = n_now
            out[m, 1] = a
            out[m, 2] = sum(r_i)
            out[m, 3] = sum(c_i)
            out[m, 4] = sum(s_i)
            out[m, 5] = ipool
            out[m, 6] = produced
            out[m, 7] = leaked
            out[m, 8] = degraded
            out[m, 9] = vexpr
            m += 1
            if stop_at_threshold and a >= seg["th_seg"][kseg]:
                return True
        return False

    def pick_cell(weights):
        total_w = sum(weights)
        u = rng.random() * total_w
        acc = 0.0
        last_live = 0
        for idx, w in enumerate(weights):
            acc += w
            if w > 0.0:
                last_live = idx
            if u < acc:
                return idx
        return last_live

    while True:
        r_tot = sum(r_i)
        c_tot = sum(c_i)
        s_tot = sum(s_i)
        props[0] = params.beta * s_tot
        props[1] = params.upsilon_c * c_tot
        props[2] = seg["delta_a_seg"][kseg] * a
        props[3] = seg["eps_r_seg"][kseg] + epsc_r * c_tot
        props[4] = params.delta_r * r_tot
        props[5] = (seg["kc_seg"][kseg] * a * r_tot
                    if a >= seg["th_seg"][kseg] else 0.0)
        props[6] = params.delta_c * c_tot
        props[7] = seg["eps_s_seg"][kseg] + epsc_s * c_tot
        props[8] = params.delta_s * s_tot
        props[9] = seg["eps_v_seg"][kseg] + epsc_v * c_tot
        props[10] = mu_i
        props[11] = seg["delta_i_seg"][kseg] * ipool
        bound = (r_tot, s_tot, a)[bind_target]
        props[12] = seg["kbind_seg"][kseg] * ipool * bound
        total = float(props.sum())

        barrier = seg_end[kseg]
        t_next = (t - math.log1p(-rng.random()) / total) if total > 0.0 else math.inf

        if t_next >= barrier:
            if emit(barrier):
                return out, m, events, kernel.STATUS_ACTIVATED
            t = barrier
            kseg += 1
            if kseg == n_segments:
                return out, m, events, kernel.STATUS_DONE
            # barrier below the horizon is a duplication instant
            j = int(rng.integers(0, len(r_i)))
            parent = (r_i[j], c_i[j], s_i[j])
            first, second = duplicate_split(parent, rng)
            r_i[j], c_i[j], s_i[j] = first
            r_i.append(second[0])
            c_i.append(second[1])
            s_i.append(second[2])
            continue

        if emit(t_next):
            return out, m, events, kernel.STATUS_ACTIVATED

        u = rng.random() * total
        acc = 0.0
        chosen = -1
        for jdx in range(13):
            acc += props[jdx]
            if u < acc:
                chosen = jdx
                break
        if chosen < 0:
            for jdx in range(12, -1, -1):
                if props[jdx] > 0.0:
                    chosen = jdx
                    break

        if chosen == 0:
            a += 1
            produced += 1
        elif chosen == 1:
            j = pick_cell(c_i)
            c_i[j] -= 1
            r_i[j] += 1
            a += 1
        elif chosen == 2:
            a -= 1
            leaked += 1
        elif chosen == 3:
            j = pick_cell([eps_r1 + epsc_r * cc for cc in c_i])
            r_i[j] += 1
        elif chosen == 4:
            j = pick_cell(r_i)
            r_i[j] -= 1
        elif chosen == 5:
            j = pick_cell(r_i)
            r_i[j] -= 1
            c_i[j] += 1
            a -= 1
        elif chosen == 6:
            j = pick_cell(c_i)
            c_i[j] -= 1
            degraded += 1
        elif chosen == 7:
            j = pick_cell([eps_s1 + epsc_s * cc for cc in c_i])
            s_i[j] += 1
        elif chosen == 8:
            j = pick_cell(s_i)
            s_i[j] -= 1
        elif chosen == 9:
            vexpr += 1
        elif chosen == 10:
            ipool += 1
        elif chosen == 11:
            ipool -= 1
        else:
            ipool -= 1
            if bind_target == 0:
                j = pick_cell(r_i)
                r_i[j] -= 1
            elif bind_target == 1:
                j = pick_cell(s_i)
                s_i[j] -= 1
            else:
                a -= 1
                leaked += 1

        events += 1
        t = t_next
        if check_ledger and produced != a + sum(c_i) + leaked + degraded:
            return out, m, events, kernel.STATUS_LEDGER_BROKEN
        if events >= max_events:
            return out, m, events, kernel.STATUS_TRUNCATED
