"""Multi-cell electron relay chains and their reduced single-queue abstraction.

Full cable: N cells in a line, each with carrier pool m, ATP pool n, and a
high-potential outer pool qH fed by the upstream neighbor. Interior low/high
membrane pools are merged (fast-transfer shortcut), so an anaerobic emission
by cell i lands directly in cell i+1's qH; the last cell's anaerobic output
is counted as terminal throughput. Integer ledgers (injected electrons,
aerobic exits, terminal throughput) make conservation checkable exactly.

Reduced cable: one queue E in [0, E_max] with admission fraction alpha(E)
and exit rate mu(E); electrons enter at alpha(E) times the offered
intensity and leave one at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .electron import CellParams
from .engine import Component, EventChannel, ReactionNetwork, StateSchema
from .engine import simulate as engine_simulate
from .profiles import PiecewiseConstant


def _as_profile(value) -> PiecewiseConstant:
    if isinstance(value, PiecewiseConstant):
        return value
    return PiecewiseConstant.constant(float(value))


def _per_cell(value, n, kind):
    if isinstance(value, (list, tuple)):
        if len(value) != n:
            raise ValueError(f"{kind} list must have {n} entries")
        return [_as_profile(v) for v in value]
    return [_as_profile(value)] * n


@dataclass(frozen=True)
class CableParams:
    """Cable of n_cells cells sharing CellParams unless a list is given.

    zeta_a scales anaerobic hand-off (lambda_EXT), zeta_u the unconventional
    draw from the high-potential pool (mu_EXT_H); q_cap bounds each qH pool.
    sigma_d / sigma_a may be scalars, staircases, or per-cell lists of either.
    """

    n_cells: int
    cell: CellParams | list = field(default_factory=CellParams)
    sigma_d: object = 0.0
    sigma_a: object = 0.0
    zeta_a: float = 0.01
    zeta_u: float = 0.01
    q_cap: int = 20

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError("n_cells must be >= 1")
        if self.zeta_a < 0 or self.zeta_u < 0:
            raise ValueError("coupling coefficients must be >= 0")
        if self.q_cap < 1:
            raise ValueError("q_cap must be >= 1")

    def cells(self) -> list[CellParams]:
        if isinstance(self.cell, (list, tuple)):
            if len(self.cell) != self.n_cells:
                raise ValueError(f"cell list must have {self.n_cells} entries")
            return list(self.cell)
        return [self.cell] * self.n_cells

    def donor_profiles(self):
        return _per_cell(self.sigma_d, self.n_cells, "sigma_d")

    def acceptor_profiles(self):
        return _per_cell(self.sigma_a, self.n_cells, "sigma_a")


LEDGER_NAMES = ("injected", "aerobic_exits", "throughput")


def build_cable(params: CableParams) -> ReactionNetwork:
    """Reaction network over (m, n, qH) per cell plus electron ledgers.

    Channels per cell: donor intake; conventional synthesis (from m) routed
    aerobic at mu_OUT or anaerobic at lambda_EXT as two racing channels;
    unconventional synthesis (from qH) at total rate mu_EXT_H, split between
    the same two routes in proportion mu_OUT : lambda_EXT; ATP consumption.
    Anaerobic output of cell i feeds cell i+1's qH; the last cell's feeds
    the throughput counter. injected == sum(m) + sum(qH) + aerobic_exits +
    throughput holds exactly along every trajectory.
    """
    n_cells = params.n_cells
    cells = params.cells()
    sig_d = params.donor_profiles()
    sig_a = params.acceptor_profiles()
    zeta_a, zeta_u, q_cap = params.zeta_a, params.zeta_u, params.q_cap

    comps = []
    for i in range(n_cells):
        c = cells[i]
        comps += [Component(f"cell{i + 1}.m", capacity=c.m_ch_cap),
                  Component(f"cell{i + 1}.n", capacity=c.n_atp_cap),
                  Component(f"cell{i + 1}.qH", capacity=q_cap)]
    comps += [Component(name, counter=True) for name in LEDGER_NAMES]
    schema = StateSchema(comps)

    i_inj = schema.index("injected")
    i_aer = schema.index("aerobic_exits")
    i_thr = schema.index("throughput")

    def make_cell_channels(i):
        c = cells[i]
        sd, sa = sig_d[i], sig_a[i]
        im, i_n, iq = 3 * i, 3 * i + 1, 3 * i + 2
        last = i == n_cells - 1
        iq_next = None if last else 3 * (i + 1) + 2

        def mu_out(s, t):
            return c.zeta * (1.0 - s[i_n] / c.n_atp_cap) * sa(t)

        def lam_ext(s, t):
            recv = 1.0 if last else (1.0 - s[iq_next] / q_cap)
            return zeta_a * (1.0 - s[i_n] / c.n_atp_cap) * recv

        def mu_ext_h(s, t):
            return zeta_u * (s[iq] / q_cap) * (1.0 - s[i_n] / c.n_atp_cap)

        def p_donor(s, t):
            return c.rho * (1.0 - s[im] / c.m_ch_cap) * sd(t)

        def p_conv_aer(s, t):
            return mu_out(s, t) if s[im] > 0 else 0.0

        def p_conv_anaer(s, t):
            return lam_ext(s, t) if s[im] > 0 else 0.0

        def p_unconv_aer(s, t):
            total = mu_ext_h(s, t)
            if total == 0.0:
                return 0.0
            a, b = mu_out(s, t), lam_ext(s, t)
            return total * a / (a + b) if a + b > 0.0 else 0.0

        def p_unconv_anaer(s, t):
            total = mu_ext_h(s, t)
            if total == 0.0:
                return 0.0
            a, b = mu_out(s, t), lam_ext(s, t)
            return total * b / (a + b) if a + b > 0.0 else 0.0

        def p_consume(s, t):
            return c.beta * sd(t) if s[i_n] > 0 else 0.0

        name = f"cell{i + 1}"
        m_name, n_name, q_name = f"{name}.m", f"{name}.n", f"{name}.qH"
        fwd = "throughput" if last else f"cell{i + 2}.qH"
        return [
            EventChannel(f"{name}.donor_in", p_donor,
                         delta={m_name: +1, "injected": +1}),
            EventChannel(f"{name}.conv_aerobic", p_conv_aer,
                         delta={m_name: -1, n_name: +1, "aerobic_exits": +1}),
            EventChannel(f"{name}.conv_anaerobic", p_conv_anaer,
                         delta={m_name: -1, n_name: +1, fwd: +1}),
            EventChannel(f"{name}.unconv_aerobic", p_unconv_aer,
                         delta={q_name: -1, n_name: +1, "aerobic_exits": +1}),
            EventChannel(f"{name}.unconv_anaerobic", p_unconv_anaer,
                         delta={q_name: -1, n_name: +1, fwd: +1}),
            EventChannel(f"{name}.consume", p_consume, delta={n_name: -1}),
        ]

    channels = []
    for i in range(n_cells):
        channels += make_cell_channels(i)
    breakpoints = set()
    for prof in (*sig_d, *sig_a):
        breakpoints.update(prof.breakpoints.tolist())
    return ReactionNetwork(schema, channels, breakpoints=sorted(breakpoints),
                           name=f"cable-{n_cells}")


def simulate_cable(params: CableParams, init=None, horizon=1.0, period=0.1,
                   seed=0, max_events=None):
    net = build_cable(params)
    if init is None:
        init = [0] * len(net.schema)
    kwargs = {} if max_events is None else {"max_events": max_events}
    return engine_simulate(net, init, horizon, period, seed, **kwargs)


def ledger_balance(trajectory) -> np.ndarray:
    """injected - (in-flight + aerobic exits + throughput) per sample; all zeros
    for a conserving cable."""
    names = trajectory.names
    in_flight = np.zeros(trajectory.times.size, dtype=np.int64)
    for nm in names:
        if nm.endswith(".m") or nm.endswith(".qH"):
            in_flight += trajectory.component(nm)
    out = (trajectory.component("injected")
           - in_flight
           - trajectory.component("aerobic_exits")
           - trajectory.component("throughput"))
    return out


def alpha_of(i: int, alpha_min: float, e_max: int) -> float:
    """Admitted fraction at occupancy i: 1 at empty, alpha_min trend, 0 at full."""
    if not 0 <= i <= e_max:
        raise ValueError(f"i={i} outside [0, {e_max}]")
    if not 0.0 <= alpha_min <= 1.0:
        raise ValueError("alpha_min must lie in [0, 1]")
    if i >= e_max:
        return 0.0
    return 1.0 - (1.0 - alpha_min) * i / e_max


def mu_of(i: int, e_max: int) -> float:
    """Exit rate at occupancy i, rising linearly from 0.6 to 1.4."""
    if not 0 <= i <= e_max:
        raise ValueError(f"i={i} outside [0, {e_max}]")
    return 0.6 + 0.8 * i / e_max


@dataclass(frozen=True)
class ReducedCableParams:
    """Single-queue cable: admission table alpha, exit-rate table mu.

    alpha must start at 1, end at 0, stay positive below the top, and never
    increase; mu must be positive wherever an exit is possible (i >= 1).
    """

    e_max: int
    alpha: np.ndarray
    mu: np.ndarray
    alpha_min: float | None = None

    def __init__(self, e_max, alpha, mu, alpha_min=None):
        e_max = int(e_max)
        alpha = np.asarray(alpha, dtype=float)
        mu = np.asarray(mu, dtype=float)
        if e_max < 1:
            raise ValueError("e_max must be >= 1")
        if alpha.shape != (e_max + 1,) or mu.shape != (e_max + 1,):
            raise ValueError(f"alpha and mu must have length {e_max + 1}")
        if alpha[0] != 1.0:
            raise ValueError("alpha(0) must be 1")
        if alpha[e_max] != 0.0:
            raise ValueError("alpha(E_max) must be 0")
        if np.any(alpha[:e_max] <= 0.0):
            raise ValueError("alpha(i) must be > 0 for i < E_max")
        if np.any(np.diff(alpha) > 1e-15):
            raise ValueError("alpha must be non-increasing")
        if np.any(mu[1:] <= 0.0):
            raise ValueError("mu(i) must be > 0 for i >= 1")
        object.__setattr__(self, "e_max", e_max)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "alpha_min", alpha_min)

    @classmethod
    def from_clogging(cls, e_max: int, alpha_min: float) -> "ReducedCableParams":
        alpha = np.array([alpha_of(i, alpha_min, e_max) for i in range(e_max + 1)])
        mu = np.array([mu_of(i, e_max) for i in range(e_max + 1)])
        return cls(e_max, alpha, mu, alpha_min=alpha_min)


def _intensity_of(policy, e_max):
    """Normalize a policy argument to (per-state table, staircase) forms."""
    lam = getattr(policy, "lambda_bar", policy)
    if isinstance(lam, PiecewiseConstant):
        return None, lam
    if np.isscalar(lam):
        return np.full(e_max + 1, float(lam)), None
    arr = np.asarray(lam, dtype=float)
    if arr.shape != (e_max + 1,):
        raise ValueError(f"per-state intensity table must have length {e_max + 1}")
    return arr, None


def reduced_network(params: ReducedCableParams, policy) -> ReactionNetwork:
    table, staircase = _intensity_of(policy, params.e_max)
    alpha, mu = params.alpha, params.mu
    schema = StateSchema([Component("E", capacity=params.e_max),
                          Component("exits", counter=True)])
    if staircase is None:
        def p_in(s, t):
            return alpha[s[0]] * table[s[0]]
        breakpoints = ()
    else:
        def p_in(s, t):
            return alpha[s[0]] * staircase(t)
        breakpoints = staircase.breakpoints

    def p_out(s, t):
        return mu[s[0]] if s[0] > 0 else 0.0

    channels = [EventChannel("enter", p_in, delta={"E": +1}),
                EventChannel("exit", p_out, delta={"E": -1, "exits": +1})]
    return ReactionNetwork(schema, channels, breakpoints=breakpoints,
                           name="reduced-cable")


def simulate_reduced(params: ReducedCableParams, policy, horizon, period, seed,
                     init: int = 0, max_events=None):
    """Birth-death run of the reduced cable; exits tallied as a counter.

    policy may be a per-state intensity table (or object carrying one as
    .lambda_bar), a constant, or a staircase lambda(t).
    """
    net = reduced_network(params, policy)
    kwargs = {} if max_events is None else {"max_events": max_events}
    return engine_simulate(net, [int(init), 0], horizon, period, seed, **kwargs)
