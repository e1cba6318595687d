"""Colony parameters, unit conversions, and the state-dependent rate laws.

Counts are simulated in tokens of `quanta` molecules each; concentrations
convert through 1 nM * 1 fL = 0.602214 molecules. All rates are per hour.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COUNT_PER_NM_FL = 0.602214


@dataclass(frozen=True)
class QuorumParams:
    """Colony model parameters (rates per hour, volumes in fL except v_tot_nl).

    mode selects the volume regime: "open" spreads autoinducers over
    N * phi_ex_fl (colony grows its own environment), "closed" uses the fixed
    vessel volume v_tot_nl. eps0/eps_c order sites as (synthase, receptor,
    virulence). quanta > 1 coarse-grains every molecule pool for speed.
    """

    rho_max: float = 1.0
    n_max: int | None = 1000
    phi_cell_fl: float = 1.0
    mode: str = "closed"
    phi_ex_fl: float = 1.1
    v_tot_nl: float = 0.1
    beta: float = 18.0
    xi_d: float = 0.01
    xi_l1: float = 0.0
    xi_l2: float = 0.0
    eta_a_th_nm: float = 21.4
    eps0: tuple = (80.0, 80.0, 80.0)
    eps_c: tuple = (3.0, 3.0, 3.0)
    delta_r: float = 12.0
    delta_c: float = 1.4
    delta_s: float = 1.0
    upsilon_c: float = 60.0
    gamma: float = 3.5
    quanta: int = 1

    def __post_init__(self):
        if self.mode not in ("open", "closed"):
            raise ValueError(f"unknown volume mode {self.mode!r}")
        for name in ("rho_max", "phi_cell_fl", "beta", "xi_d", "xi_l1",
                     "xi_l2", "eta_a_th_nm", "delta_r", "delta_c", "delta_s",
                     "upsilon_c", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if len(self.eps0) != 3 or len(self.eps_c) != 3:
            raise ValueError("eps0 and eps_c must list the three DNA sites")
        if any(e < 0 for e in (*self.eps0, *self.eps_c)):
            raise ValueError("expression rates must be >= 0")
        if self.n_max is not None and self.n_max < 1:
            raise ValueError("n_max must be >= 1 cell")
        if not (isinstance(self.quanta, (int, np.integer)) and self.quanta >= 1):
            raise ValueError("quanta must be a positive integer")
        if self.mode == "open":
            if self.phi_ex_fl < self.phi_cell_fl:
                raise ValueError("open mode needs phi_ex_fl >= phi_cell_fl")
        else:
            if self.n_max is None:
                raise ValueError("closed mode needs a finite n_max")
            if self.v_tot_nl * 1e6 < self.n_max * self.phi_cell_fl:
                raise ValueError("closed vessel smaller than the grown colony")

    @classmethod
    def reference_closed(cls, quanta: int = 1) -> "QuorumParams":
        """Closed vessel of 0.1 nL, logistic growth to 1000 cells, no leakage."""
        return cls(quanta=quanta)

    @classmethod
    def reference_open(cls, quanta: int = 1) -> "QuorumParams":
        """Packed biofilm in open space: unbounded growth, strong leakage."""
        return cls(mode="open", n_max=None, xi_l1=5000.0, xi_l2=0.1,
                   quanta=quanta)

    def v_cell_fl(self, n) -> float:
        return n * self.phi_cell_fl

    def v_tot_fl(self, n) -> float:
        if self.mode == "open":
            return n * self.phi_ex_fl
        return self.v_tot_nl * 1e6

    def threshold_count(self, n) -> float:
        """Autoinducer molecule count at which eta_A reaches the threshold."""
        return self.eta_a_th_nm * self.v_tot_fl(n) * COUNT_PER_NM_FL


def growth_rate(n, params: QuorumParams) -> float:
    """Per-cell logistic duplication rate; rho_max forever when n_max is None."""
    if n < 1:
        raise ValueError("colony has at least one cell")
    if params.n_max is None:
        return params.rho_max
    return params.rho_max * max(0.0, 1.0 - n / params.n_max)


def delta_a_of(n, params: QuorumParams) -> float:
    """Per-molecule autoinducer loss rate, non-increasing in colony size."""
    if n < 1:
        raise ValueError("colony has at least one cell")
    return params.xi_d + params.xi_l1 / (1.0 + params.xi_l2 * (n - 1))


def concentrations(state, params: QuorumParams) -> dict:
    """nM concentrations of a (N, A, R_TOT, C_TOT, S_TOT) molecule-count state.

    Autoinducers dilute over the total volume, everything else over the cell
    volume.
    """
    n, a, r, c, s = state[:5]
    if n < 1:
        raise ValueError("colony has at least one cell")
    v_tot = params.v_tot_fl(n) * COUNT_PER_NM_FL
    v_cell = params.v_cell_fl(n) * COUNT_PER_NM_FL
    return {"eta_A": a / v_tot, "eta_R": r / v_cell,
            "eta_C": c / v_cell, "eta_S": s / v_cell}


def lambda_c_of(a, r, n, params: QuorumParams) -> float:
    """Complex-formation rate (events/h) from molecule counts; zero below the
    autoinducer activation threshold."""
    if n < 1:
        raise ValueError("colony has at least one cell")
    eta = concentrations((n, a, r, 0, 0), params)
    if eta["eta_A"] < params.eta_a_th_nm:
        return 0.0
    return params.gamma * eta["eta_A"] * eta["eta_R"] * params.v_cell_fl(n)


MECHANISMS = ("receptor_inhibition", "synthase_blocking",
              "autoinducer_degradation")


@dataclass(frozen=True)
class InterferenceParams:
    """One interfering signal: injected at mu_i, lost at the delta_A-style
    rate xi_id + xi_il1/(1 + xi_il2*(n-1)), and consumed by its mechanism.

    mechanism picks the binding channel: receptor_inhibition (removes a
    receptor, coefficient gamma_ir), synthase_blocking (removes a synthase,
    gamma_is), or autoinducer_degradation (removes an autoinducer, delta_ia,
    booked as extra leakage in the ledger).
    """

    mechanism: str
    mu_i: float = 0.0
    xi_id: float = 0.0
    xi_il1: float = 0.0
    xi_il2: float = 0.0
    gamma_ir: float = 0.0
    gamma_is: float = 0.0
    delta_ia: float = 0.0

    def __post_init__(self):
        if self.mechanism not in MECHANISMS:
            raise ValueError(f"unknown interference mechanism {self.mechanism!r}")
        for name in ("mu_i", "xi_id", "xi_il1", "xi_il2", "gamma_ir",
                     "gamma_is", "delta_ia"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def delta_i_of(self, n) -> float:
        return self.xi_id + self.xi_il1 / (1.0 + self.xi_il2 * (n - 1))

    def binding_coefficient(self) -> float:
        if self.mechanism == "receptor_inhibition":
            return self.gamma_ir
        if self.mechanism == "synthase_blocking":
            return self.gamma_is
        return self.delta_ia
