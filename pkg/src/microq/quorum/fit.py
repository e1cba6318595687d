"""Logistic growth-curve fitting for colony density measurements."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit


def logistic(t, n0: float, capacity: float, rho: float):
    """Logistic growth curve n(t) = K / (1 + (K/n0 - 1) e^{-rho t})."""
    t = np.asarray(t, dtype=float)
    return capacity / (1.0 + (capacity / n0 - 1.0) * np.exp(-rho * t))


@dataclass(frozen=True)
class GrowthFit:
    """Fitted logistic parameters.

    ok is False when the data show no net growth or the fit failed; rho is
    then reported as 0 and capacity as the mean level. residual is the root
    mean square misfit of log density.
    """

    rho: float
    capacity: float
    n0: float
    ok: bool
    residual: float

    def __call__(self, t):
        return logistic(t, self.n0, self.capacity, self.rho)


def fit_logistic(times, density) -> GrowthFit:
    """Least-squares logistic fit in log space.

    Fitting log density with log-transformed parameters keeps every iterate
    positive and weights the early exponential phase and the plateau evenly.
    The result is deterministic for given input arrays.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(density, dtype=float)
    if t.ndim != 1 or y.shape != t.shape:
        raise ValueError("times and density must be 1-d arrays of equal length")
    if t.size < 4:
        raise ValueError("need at least 4 points to fit a logistic")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing")
    if np.any(y <= 0):
        raise ValueError("density values must be positive")

    logy = np.log(y)
    if y[-1] <= y[0] * (1.0 + 1e-12):
        level = float(np.exp(np.mean(logy)))
        rms = float(np.sqrt(np.mean((logy - np.log(level)) ** 2)))
        return GrowthFit(rho=0.0, capacity=level, n0=float(y[0]),
                         ok=False, residual=rms)

    def log_model(tt, log_n0, log_cap, log_rho):
        n0 = np.exp(log_n0)
        cap = np.exp(log_cap)
        rho = np.exp(log_rho)
        return np.log(cap) - np.log1p((cap / n0 - 1.0) * np.exp(-rho * tt))

    # initial slope of log density over the rising half estimates rho
    half = y < 0.5 * y.max()
    if half.sum() >= 2:
        slope = np.polyfit(t[half], logy[half], 1)[0]
    else:
        slope = (logy[-1] - logy[0]) / (t[-1] - t[0])
    rho0 = max(float(slope), 1e-6)
    p0 = (float(logy[0]), float(np.log(y.max() * 1.05)), float(np.log(rho0)))
    try:
        popt, _ = curve_fit(log_model, t, logy, p0=p0, maxfev=20000)
    except RuntimeError:
        level = float(np.exp(np.mean(logy)))
        rms = float(np.sqrt(np.mean((logy - np.log(level)) ** 2)))
        return GrowthFit(rho=0.0, capacity=level, n0=float(y[0]),
                         ok=False, residual=rms)
    n0, cap, rho = (float(np.exp(v)) for v in popt)
    rms = float(np.sqrt(np.mean((log_model(t, *popt) - logy) ** 2)))
    return GrowthFit(rho=rho, capacity=cap, n0=n0, ok=True, residual=rms)
