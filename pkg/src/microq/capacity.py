"""Information-rate analysis of the reduced cable as a signaling channel.

The sender modulates the offered electron intensity within [lambda_min,
lambda_max]; the cable admits a fraction alpha(E) and the receiver watches
arrivals. info_rate gives the per-state mutual-information rate of the
two-point input distribution with mean intensity x; average_rate weights it
by the product-form steady state; optimize_policy runs average-reward
policy iteration over a discretized action grid, and myopic_policy is the
closed-form per-state greedy optimum (state-independent).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .cable import ReducedCableParams
from .engine import Generator, stationary_distribution
from .errors import ConvergenceError, ReducibleChainError


@dataclass(frozen=True)
class SignalingBounds:
    """Allowed mean-intensity window, 0 < lambda_min < lambda_max."""

    lambda_min: float
    lambda_max: float

    def __post_init__(self):
        if not 0.0 < self.lambda_min < self.lambda_max:
            raise ValueError("need 0 < lambda_min < lambda_max")

    def contains(self, x) -> bool:
        return bool(np.all(x >= self.lambda_min) and np.all(x <= self.lambda_max))


@dataclass(frozen=True)
class SignalingPolicy:
    """Mean input intensity per cable occupancy, entries within bounds."""

    lambda_bar: np.ndarray
    bounds: SignalingBounds

    def __init__(self, lambda_bar, bounds: SignalingBounds):
        lam = np.asarray(lambda_bar, dtype=float)
        if lam.ndim != 1 or lam.size < 2:
            raise ValueError("lambda_bar must be a per-state vector")
        if not bounds.contains(lam):
            raise ValueError("policy intensities must lie within bounds")
        object.__setattr__(self, "lambda_bar", lam)
        object.__setattr__(self, "bounds", bounds)

    def __len__(self):
        return self.lambda_bar.size


def info_rate(x: float, i: int, params: ReducedCableParams,
              bounds: SignalingBounds) -> float:
    """Mutual-information rate (bits per unit time) of mean intensity x in
    state i.

    Zero at both endpoints: at lambda_max the input is deterministic, at
    lambda_min the two terms cancel exactly.
    """
    lo, hi = bounds.lambda_min, bounds.lambda_max
    if not lo <= x <= hi:
        raise ValueError(f"intensity {x} outside [{lo}, {hi}]")
    if not 0 <= i <= params.e_max:
        raise ValueError(f"state {i} outside [0, {params.e_max}]")
    alpha = params.alpha[i]
    log_ratio = np.log2(hi / lo)
    return alpha * (x * np.log2(hi / x)
                    - ((hi - x) / (hi - lo)) * lo * log_ratio)


def myopic_intensity(bounds: SignalingBounds) -> float:
    """Closed-form argmax of info_rate in x, the same for every state."""
    lo, hi = bounds.lambda_min, bounds.lambda_max
    return (hi / np.e) * (lo / hi) ** (-lo / (hi - lo))


def myopic_policy(bounds: SignalingBounds, e_max: int) -> SignalingPolicy:
    return SignalingPolicy(np.full(e_max + 1, myopic_intensity(bounds)), bounds)


def steady_state(policy: SignalingPolicy, params: ReducedCableParams) -> np.ndarray:
    """Product-form stationary law of the controlled birth-death chain.

    pi(i) proportional to prod_{k<i} alpha(k)*lambda_bar(k)/mu(k+1), built in
    log space. A zero birth rate below the top disconnects the chain.
    """
    e_max = params.e_max
    lam = np.asarray(policy.lambda_bar, dtype=float)
    if lam.shape != (e_max + 1,):
        raise ValueError(f"policy must cover states 0..{e_max}")
    flow = params.alpha[:e_max] * lam[:e_max]
    if np.any(flow <= 0.0):
        dead = int(np.argmax(flow <= 0.0))
        raise ReducibleChainError(
            f"birth rate is zero at state {dead} < E_max; chain is reducible")
    log_pi = np.concatenate(([0.0], np.cumsum(np.log(flow) - np.log(params.mu[1:]))))
    return np.exp(log_pi - logsumexp(log_pi))


def average_rate(policy: SignalingPolicy, params: ReducedCableParams) -> float:
    """Steady-state expected info_rate under the policy, in bits per unit time."""
    pi = steady_state(policy, params)
    rewards = np.array([info_rate(policy.lambda_bar[i], i, params, policy.bounds)
                        for i in range(params.e_max + 1)])
    return float(pi @ rewards)


def birth_death_generator(policy: SignalingPolicy,
                          params: ReducedCableParams) -> Generator:
    """Dense generator of the controlled chain, for nullspace cross-checks."""
    n = params.e_max + 1
    q = np.zeros((n, n))
    up = params.alpha * policy.lambda_bar
    for i in range(n - 1):
        q[i, i + 1] = up[i]
    for i in range(1, n):
        q[i, i - 1] = params.mu[i]
    np.fill_diagonal(q, -q.sum(axis=1))
    return Generator(q)


@dataclass(frozen=True)
class CapacityResult:
    policy: SignalingPolicy
    rate: float
    steady_state: np.ndarray
    iterations: int


def default_action_grid(bounds: SignalingBounds, n_actions: int = 201) -> np.ndarray:
    """Uniform grid over the bounds with the myopic intensity spliced in, so
    the constant-myopic policy is always feasible for the optimizer."""
    if n_actions < 2:
        raise ValueError("need at least 2 actions spanning the bounds")
    grid = np.linspace(bounds.lambda_min, bounds.lambda_max, n_actions)
    mp = myopic_intensity(bounds)
    if not np.any(np.isclose(grid, mp, rtol=0.0, atol=1e-12)):
        grid = np.sort(np.append(grid, mp))
    return grid


def optimize_policy(params: ReducedCableParams, bounds: SignalingBounds,
                    actions=None, n_actions: int = 201,
                    tolerance: float = 1e-10,
                    max_sweeps: int = 10_000) -> CapacityResult:
    """Average-reward policy iteration over a finite action grid.

    The chain is uniformized at Lambda = max_i [alpha(i)*lambda_max + mu(i)];
    each evaluation solves the bias/gain system exactly with h(0) = 0, and
    improvement takes per-state argmaxes with ties broken toward the smallest
    action. An explicit actions array is used verbatim; the default grid is
    default_action_grid (myopic intensity included), which makes the result
    never worse than the myopic policy. Stops when the policy repeats or the
    gain stops improving by more than tolerance.
    """
    e_max = params.e_max
    if actions is None:
        actions = default_action_grid(bounds, n_actions)
    else:
        actions = np.sort(np.unique(np.asarray(actions, dtype=float)))
        if actions.size < 2:
            raise ValueError("need at least 2 actions spanning the bounds")
        if not bounds.contains(actions):
            raise ValueError("actions must lie within bounds")

    n = e_max + 1
    alpha, mu = params.alpha, params.mu
    big_lambda = float(np.max(alpha * bounds.lambda_max + mu))
    rewards = np.empty((n, actions.size))
    for i in range(n):
        for k, a in enumerate(actions):
            rewards[i, k] = info_rate(a, i, params, bounds)

    def evaluate(choice):
        # h(0) = 0; unknowns are (gain, h(1..E)). Row i states
        # gain + (I - P_choice) h = r / Lambda on the uniformized chain.
        up = alpha * actions[choice] / big_lambda
        down = np.concatenate(([0.0], mu[1:])) / big_lambda
        a_mat = np.zeros((n, n))
        a_mat[:, 0] = 1.0
        for i in range(n):
            row = np.zeros(n)
            row[i] += 1.0
            if i < n - 1:
                row[i] -= 1.0 - up[i] - down[i]
                row[i + 1] -= up[i]
            else:
                row[i] -= 1.0 - down[i]
            if i > 0:
                row[i - 1] -= down[i]
            a_mat[i, 1:] += row[1:]
        b = rewards[np.arange(n), choice] / big_lambda
        sol = np.linalg.solve(a_mat, b)
        gain = sol[0]
        h = np.concatenate(([0.0], sol[1:]))
        return gain, h

    # Starting at the action closest to the myopic intensity makes the
    # result never worse than myopic even when iteration stalls at once.
    start = int(np.argmin(np.abs(actions - myopic_intensity(bounds))))
    choice = np.full(n, start, dtype=np.intp)
    gain = -np.inf
    for sweep in range(1, max_sweeps + 1):
        new_gain, h = evaluate(choice)
        h_up = np.concatenate((h[1:], [h[-1]]))
        scores = rewards + (alpha * (h_up - h))[:, None] * actions[None, :]
        new_choice = np.argmax(scores, axis=1)
        if np.array_equal(new_choice, choice) or (np.isfinite(gain)
                                                  and new_gain - gain < tolerance):
            policy = SignalingPolicy(actions[choice], bounds)
            pi = steady_state(policy, params)
            return CapacityResult(policy, average_rate(policy, params), pi, sweep)
        choice = new_choice
        gain = new_gain
    raise ConvergenceError(
        f"policy iteration did not settle within {max_sweeps} sweeps",
        last_value=gain * big_lambda)


def enumerate_policies(params: ReducedCableParams, bounds: SignalingBounds,
                       actions) -> CapacityResult:
    """Brute-force maximum of average_rate over every grid policy.

    Exponential in E_max; a desk-scale oracle for optimize_policy.
    """
    actions = np.sort(np.unique(np.asarray(actions, dtype=float)))
    best = None
    for combo in itertools.product(actions, repeat=params.e_max + 1):
        policy = SignalingPolicy(np.array(combo), bounds)
        rate = average_rate(policy, params)
        if best is None or rate > best[0]:
            best = (rate, policy)
    rate, policy = best
    return CapacityResult(policy, rate, steady_state(policy, params), 0)


def sweep_alpha_min(values, e_max: int, bounds: SignalingBounds,
                    n_actions: int = 201, tolerance: float = 1e-10):
    """Optimal-vs-myopic rates per clogging floor; rows are CSV-ready
    (alpha_min, rate_opt, rate_mp, gap_pct)."""
    rows = []
    for v in values:
        params = ReducedCableParams.from_clogging(e_max, float(v))
        opt = optimize_policy(params, bounds, n_actions=n_actions,
                              tolerance=tolerance)
        mp = average_rate(myopic_policy(bounds, e_max), params)
        rows.append((float(v), opt.rate, mp, 100.0 * (opt.rate - mp) / mp))
    return rows
