"""Single-cell electron transport: carrier intake, ATP synthesis, consumption.

State (m_ch, n_atp): charged-carrier count and ATP count, both capped. Intake
slows linearly as the carrier pool fills; synthesis drains one carrier into
one ATP unit and slows linearly as the ATP pool fills; consumption burns ATP
at a rate tied to the donor level (metabolism runs while food is present).
Time units follow the profile's declared unit; coefficients are per that unit.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .engine import (Component, EventChannel, ReactionNetwork, StateSchema,
                     cme_expectations, network_to_generator)
from .errors import ModelDefinitionError
from .profiles import EnvironmentProfile, PiecewiseConstant

# Placeholder kinetics for shipped configs; not calibrated to any organism.
DEFAULT_RHO = 0.01
DEFAULT_ZETA = 0.01
DEFAULT_BETA = 0.01


def donor_staircase(peak=30.0, t_on=80.0, t_off=1300.0, steps=10) -> PiecewiseConstant:
    """Canonical feeding experiment: donor 0 until t_on, then a staircase
    descending from peak in equal steps, reaching 0 at t_off.

    Only the envelope (peak at t_on, zero from t_off) is physically pinned;
    the equal-step interior is this package's convention.
    """
    if not (0 < t_on < t_off) or peak <= 0 or steps < 1:
        raise ValueError("need 0 < t_on < t_off, peak > 0, steps >= 1")
    width = (t_off - t_on) / steps
    times = [0.0] + [t_on + k * width for k in range(steps + 1)]
    values = [0.0] + [peak * (steps - k) / steps for k in range(steps)] + [0.0]
    return PiecewiseConstant(times, values)


def feeding_profile(peak=30.0, t_on=80.0, t_off=1300.0, steps=10,
                    sigma_a=1.0) -> EnvironmentProfile:
    """Donor staircase with constant acceptor, in seconds."""
    return EnvironmentProfile(donor_staircase(peak, t_on, t_off, steps),
                              PiecewiseConstant.constant(sigma_a), time_unit="s")


@dataclass(frozen=True)
class CellParams:
    """Kinetic coefficients and pool capacities for one cell.

    rho scales carrier intake, zeta synthesis, beta consumption (all per
    time unit). electrons_per_unit records how many physical electrons one
    carrier unit stands for; it never enters the dynamics.
    """

    rho: float = DEFAULT_RHO
    zeta: float = DEFAULT_ZETA
    beta: float = DEFAULT_BETA
    m_ch_cap: int = 20
    n_atp_cap: int = 20
    electrons_per_unit: int = 1

    def __post_init__(self):
        if self.m_ch_cap < 1 or self.n_atp_cap < 1:
            raise ValueError("pool capacities must be >= 1")
        if min(self.rho, self.zeta, self.beta) < 0:
            raise ValueError("rate coefficients must be >= 0")


class CellRates(NamedTuple):
    lambda_ch: float
    mu_ch: float
    mu_out: float
    mu_atp: float


def cell_rates(state, sigma_d, sigma_a, params: CellParams) -> CellRates:
    """Instantaneous rates at (m_ch, n_atp) under the given concentrations.

    Intake: rho*(1 - m/M)*sigma_d. Synthesis and aerobic release share one
    rate zeta*(1 - n/N)*sigma_a (each synthesized unit leaves through the
    oxygen pathway in the isolated cell). Consumption: beta*sigma_d.
    """
    m, n = state
    if not (0 <= m <= params.m_ch_cap and 0 <= n <= params.n_atp_cap):
        raise ValueError(f"state {state} outside pool bounds")
    if sigma_d < 0 or sigma_a < 0:
        raise ValueError("concentrations must be >= 0")
    lam = params.rho * (1.0 - m / params.m_ch_cap) * sigma_d
    mu_syn = params.zeta * (1.0 - n / params.n_atp_cap) * sigma_a
    mu_atp = params.beta * sigma_d
    return CellRates(lam, mu_syn, mu_syn, mu_atp)


def build_isolated_cell(params: CellParams, profile: EnvironmentProfile) -> ReactionNetwork:
    """Three-channel network over the (m_ch, n_atp) box driven by the profile."""
    m_cap, n_cap = params.m_ch_cap, params.n_atp_cap
    rho, zeta, beta = params.rho, params.zeta, params.beta
    sig_d, sig_a = profile.sigma_d, profile.sigma_a

    channels = [
        EventChannel("carrier_in",
                     lambda s, t: rho * (1.0 - s[0] / m_cap) * sig_d(t),
                     delta={"m_ch": +1}),
        EventChannel("atp_synthesis",
                     lambda s, t: (zeta * (1.0 - s[1] / n_cap) * sig_a(t)
                                   if s[0] > 0 else 0.0),
                     delta={"m_ch": -1, "n_atp": +1}),
        EventChannel("atp_consumption",
                     lambda s, t: beta * sig_d(t) if s[1] > 0 else 0.0,
                     delta={"n_atp": -1}),
    ]
    schema = [Component("m_ch", capacity=m_cap), Component("n_atp", capacity=n_cap)]
    return ReactionNetwork(StateSchema(schema), channels,
                           breakpoints=profile.breakpoints, name="isolated-cell")


def cell_generator_segments(params: CellParams, profile: EnvironmentProfile,
                            horizon: float):
    """Piecewise-constant generator list [(t_start, Generator), ...] for the CME."""
    net = build_isolated_cell(params, profile)
    return [(t0, network_to_generator(net, t=t0))
            for t0, _, _ in profile.segments(horizon)]


class AtpPrediction(NamedTuple):
    times: np.ndarray
    atp: np.ndarray
    cme: object


def predict_atp(params: CellParams, profile: EnvironmentProfile, horizon: float,
                step: float, init=(0, 0), conversion: float | None = None,
                eval_times=None) -> AtpPrediction:
    """Expected ATP count over time by master-equation integration.

    conversion, if given, rescales counts to a physical unit (e.g. mM per
    count). eval_times overrides the uniform step grid when observations sit
    at irregular instants.
    """
    segs = cell_generator_segments(params, profile, horizon)
    gen0 = segs[0][1]
    init_dist = np.zeros(gen0.n_states)
    init_dist[gen0.state_index(init)] = 1.0
    res = cme_expectations(segs, init_dist, horizon, step=step,
                           components=["n_atp"], eval_times=eval_times,
                           method="expm")
    atp = res.expectation("n_atp")
    if conversion is not None:
        atp = atp * conversion
    return AtpPrediction(res.times, atp, res)


@dataclass(frozen=True)
class FitResult:
    rho: float
    zeta: float
    beta: float
    residual: float
    init_residual: float
    converged: bool
    n_evaluations: int

    @property
    def params(self):
        return (self.rho, self.zeta, self.beta)


def fit_parameters(observed_times, observed_atp, profile: EnvironmentProfile,
                   capacities=(20, 20), init_guess=(DEFAULT_RHO, DEFAULT_ZETA, DEFAULT_BETA),
                   conversion: float = 1.0, max_iter: int = 500,
                   init=(0, 0)) -> FitResult:
    """Least-squares fit of (rho, zeta, beta) to an observed ATP series.

    Nelder-Mead simplex over log-coefficients (keeps them positive) against
    sum of squared errors of conversion * E[n_atp](t_k). The search is
    local: trial points more than a factor of 100 from the init guess in
    any coefficient are rejected, which also keeps degenerate flat valleys
    in noisy data from dragging the integrator into extreme-rate corners.
    Deterministic; the returned point is the best one evaluated, so the
    residual never exceeds the init guess's. converged=False flags hitting
    the iteration cap.
    """
    t_obs = np.asarray(observed_times, dtype=float)
    y_obs = np.asarray(observed_atp, dtype=float)
    if t_obs.ndim != 1 or t_obs.size != y_obs.size:
        raise ValueError("observed series must be two equal-length vectors")
    if t_obs.size < 3:
        raise ValueError("need at least 3 observations to fit 3 coefficients")
    if np.any(np.diff(t_obs) <= 0) or t_obs[0] < 0:
        raise ValueError("observation times must increase strictly from t >= 0")
    if min(init_guess) <= 0:
        raise ValueError("init guess coefficients must be positive")
    m_cap, n_cap = capacities
    horizon = float(t_obs[-1])

    x_center = np.log(np.asarray(init_guess, dtype=float))
    window = math.log(100.0)

    def objective(log_coeffs):
        if np.max(np.abs(log_coeffs - x_center)) > window:
            return math.inf  # outside the local search window
        rho, zeta, beta = np.exp(log_coeffs)
        p = CellParams(rho=rho, zeta=zeta, beta=beta,
                       m_ch_cap=m_cap, n_atp_cap=n_cap)
        try:
            pred = predict_atp(p, profile, horizon, step=None, init=init,
                               eval_times=t_obs)
        except ModelDefinitionError:
            return math.inf  # integration broke down at this trial point
        err = conversion * pred.atp - y_obs
        return float(err @ err)

    x0 = x_center
    init_residual = objective(x0)
    # xatol acts on log-coefficients, so 1e-5 is a 0.001% spread; fatol
    # scales with the data so noisy series still terminate.
    fatol = 1e-9 * max(1.0, init_residual)
    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"maxiter": max_iter, "xatol": 1e-5, "fatol": fatol,
                            "initial_simplex": None})
    rho, zeta, beta = np.exp(res.x)
    best = float(res.fun)
    if best > init_residual:  # scipy keeps the best simplex point; belt and braces
        rho, zeta, beta = init_guess
        best = init_residual
    return FitResult(rho=float(rho), zeta=float(zeta), beta=float(beta),
                     residual=best, init_residual=init_residual,
                     converged=bool(res.success), n_evaluations=int(res.nfev))
