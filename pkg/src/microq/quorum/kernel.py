"""Compiled event loop for aggregate colony runs at reference scale.

Mirrors the engine's exact simulation semantics: one uniform for the holding
time (dt = -log1p(-u)/total), one for channel selection by cumulative scan in
the canonical channel order, barrier preemption consumes no selection draw,
and samples record the state held just before each sample instant. Colony
growth is precomputed (it is autonomous), so duplication times enter as
barriers; all colony-size-dependent coefficients are tabulated per growth
segment by prepare_segments.

Interference channels are always present structurally; with no interfering
signal their coefficients are 0.0 and they contribute +0.0 to every total,
leaving the event sequence identical draw for draw.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .params import COUNT_PER_NM_FL, InterferenceParams, QuorumParams, delta_a_of

STATUS_DONE = 0
STATUS_TRUNCATED = 1
STATUS_LEDGER_BROKEN = 2
STATUS_ACTIVATED = 3

COLUMNS = ("N", "A", "R_tot", "C_tot", "S_tot", "I",
           "produced_A", "leaked_A", "degraded_C", "V_expr")

BIND_RECEPTOR, BIND_SYNTHASE, BIND_AUTOINDUCER = 0, 1, 2


def prepare_segments(params: QuorumParams, dup_times, horizon,
                     interference: InterferenceParams | None, n0: int = 1):
    """Per-growth-segment coefficient tables for the kernel.

    Segment k holds n0+k cells and ends at dup_times[k] (the last ends at the
    horizon). Bimolecular coefficients fold the token and volume conversions:
    rate = coef * tokens_a * tokens_b.
    """
    dup_times = np.asarray(dup_times, dtype=np.float64)
    q = float(params.quanta)
    n = n0 + np.arange(dup_times.size + 1, dtype=np.int64)
    seg_end = np.append(dup_times, np.float64(horizon))
    v_tot = np.array([params.v_tot_fl(int(k)) for k in n])
    delta_a = np.array([delta_a_of(int(k), params) for k in n])
    kc = params.gamma * q / (v_tot * COUNT_PER_NM_FL ** 2)
    th = params.eta_a_th_nm * v_tot * COUNT_PER_NM_FL / q
    eps_r = n * params.eps0[1] / q
    eps_s = n * params.eps0[0] / q
    eps_v = n * params.eps0[2] / q
    if interference is None:
        delta_i = np.zeros_like(v_tot)
        kbind = np.zeros_like(v_tot)
        mu_i = 0.0
        target = BIND_RECEPTOR
    else:
        delta_i = np.array([interference.delta_i_of(int(k)) for k in n])
        kbind = (interference.binding_coefficient() * q
                 / (v_tot * COUNT_PER_NM_FL ** 2))
        mu_i = interference.mu_i / q
        target = {"receptor_inhibition": BIND_RECEPTOR,
                  "synthase_blocking": BIND_SYNTHASE,
                  "autoinducer_degradation": BIND_AUTOINDUCER}[interference.mechanism]
    return dict(seg_end=seg_end, n_seg=n, delta_a_seg=delta_a, kc_seg=kc,
                th_seg=th, eps_r_seg=eps_r, eps_s_seg=eps_s, eps_v_seg=eps_v,
                delta_i_seg=delta_i, kbind_seg=kbind, mu_i=mu_i,
                bind_target=target)


@njit(cache=True)
def colony_core(seg_end, n_seg, delta_a_seg, kc_seg, th_seg,
                eps_r_seg, eps_s_seg, eps_v_seg, delta_i_seg, kbind_seg,
                beta, upsilon, delta_r, delta_c, delta_s,
                epsc_r, epsc_s, epsc_v, mu_i, bind_target,
                sample_times, init, max_events, check_ledger,
                stop_at_threshold, rng):
    a, r, c, s = init[0], init[1], init[2], init[3]
    ipool = init[4]
    produced, leaked, degraded, vexpr = init[5], init[6], init[7], init[8]

    n_samples = sample_times.shape[0]
    out = np.zeros((n_samples, 10), dtype=np.int64)
    props = np.zeros(13)
    n_segments = seg_end.shape[0]
    kseg = 0
    t = 0.0
    m = 0
    events = 0

    while True:
        props[0] = beta * s
        props[1] = upsilon * c
        props[2] = delta_a_seg[kseg] * a
        props[3] = eps_r_seg[kseg] + epsc_r * c
        props[4] = delta_r * r
        props[5] = kc_seg[kseg] * a * r if a >= th_seg[kseg] else 0.0
        props[6] = delta_c * c
        props[7] = eps_s_seg[kseg] + epsc_s * c
        props[8] = delta_s * s
        props[9] = eps_v_seg[kseg] + epsc_v * c
        props[10] = mu_i
        props[11] = delta_i_seg[kseg] * ipool
        if bind_target == 0:
            bound = r
        elif bind_target == 1:
            bound = s
        else:
            bound = a
        props[12] = kbind_seg[kseg] * ipool * bound

        total = 0.0
        for j in range(13):
            total += props[j]

        barrier = seg_end[kseg]
        if total > 0.0:
            t_next = t - math.log1p(-rng.random()) / total
        else:
            t_next = math.inf

        if t_next >= barrier:
            while m < n_samples and sample_times[m] <= barrier:
                out[m, 0] = n_seg[kseg]
                out[m, 1] = a
                out[m, 2] = r
                out[m, 3] = c
                out[m, 4] = s
                out[m, 5] = ipool
                out[m, 6] = produced
                out[m, 7] = leaked
                out[m, 8] = degraded
                out[m, 9] = vexpr
                m += 1
                if stop_at_threshold and a >= th_seg[kseg]:
                    return out, m, events, STATUS_ACTIVATED
            t = barrier
            kseg += 1
            if kseg == n_segments:
                return out, m, events, STATUS_DONE
            continue

        while m < n_samples and sample_times[m] <= t_next:
            out[m, 0] = n_seg[kseg]
            out[m, 1] = a
            out[m, 2] = r
            out[m, 3] = c
            out[m, 4] = s
            out[m, 5] = ipool
            out[m, 6] = produced
            out[m, 7] = leaked
            out[m, 8] = degraded
            out[m, 9] = vexpr
            m += 1
            if stop_at_threshold and a >= th_seg[kseg]:
                return out, m, events, STATUS_ACTIVATED

        u = rng.random() * total
        acc = 0.0
        chosen = -1
        for j in range(13):
            acc += props[j]
            if u < acc:
                chosen = j
                break
        if chosen < 0:
            for j in range(12, -1, -1):
                if props[j] > 0.0:
                    chosen = j
                    break

        if chosen == 0:
            a += 1
            produced += 1
        elif chosen == 1:
            c -= 1
            a += 1
            r += 1
        elif chosen == 2:
            a -= 1
            leaked += 1
        elif chosen == 3:
            r += 1
        elif chosen == 4:
            r -= 1
        elif chosen == 5:
            a -= 1
            r -= 1
            c += 1
        elif chosen == 6:
            c -= 1
            degraded += 1
        elif chosen == 7:
            s += 1
        elif chosen == 8:
            s -= 1
        elif chosen == 9:
            vexpr += 1
        elif chosen == 10:
            ipool += 1
        elif chosen == 11:
            ipool -= 1
        else:
            ipool -= 1
            if bind_target == 0:
                r -= 1
            elif bind_target == 1:
                s -= 1
            else:
                a -= 1
                leaked += 1

        events += 1
        t = t_next
        if check_ledger and produced != a + c + leaked + degraded:
            return out, m, events, STATUS_LEDGER_BROKEN
        if events >= max_events:
            return out, m, events, STATUS_TRUNCATED


def run_aggregate(params, dup_times, horizon, sample_times, rng,
                  interference=None, init=None, max_events=2 ** 62,
                  check_ledger=False, stop_at_threshold=False, n0=1,
                  compiled=True):
    """Drive the kernel over one prepared chemistry run; returns token-count
    samples (columns per COLUMNS), rows written, event count, and status."""
    seg = prepare_segments(params, dup_times, horizon, interference, n0=n0)
    if init is None:
        init = np.zeros(9, dtype=np.int64)
    core = colony_core if compiled else colony_core.py_func
    out, rows, events, status = core(
        seg["seg_end"], seg["n_seg"], seg["delta_a_seg"], seg["kc_seg"],
        seg["th_seg"], seg["eps_r_seg"], seg["eps_s_seg"], seg["eps_v_seg"],
        seg["delta_i_seg"], seg["kbind_seg"],
        float(params.beta), float(params.upsilon_c), float(params.delta_r),
        float(params.delta_c), float(params.delta_s),
        float(params.eps_c[1]), float(params.eps_c[0]), float(params.eps_c[2]),
        float(seg["mu_i"]), np.int64(seg["bind_target"]),
        np.asarray(sample_times, dtype=np.float64),
        np.asarray(init, dtype=np.int64), np.int64(max_events),
        bool(check_ledger), bool(stop_at_threshold), rng)
    return out, rows, events, status
