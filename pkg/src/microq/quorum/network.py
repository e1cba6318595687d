"""Aggregate colony chain as a generic reaction network.

One channel per colony-level process, in the canonical order used throughout
the package: duplication, autoinducer synthesis, complex unbinding,
autoinducer loss, receptor creation/degradation, complex formation/
degradation, synthase creation/degradation, virulence expression, then any
interference channels (inject, leak, bind) per signal. Rates follow the
token convention: basal expression, injection, and bimolecular channels are
divided by quanta, per-token channels keep their per-molecule coefficient.
"""

from __future__ import annotations

from ..engine import Component, EventChannel, ReactionNetwork, StateSchema
from .params import (COUNT_PER_NM_FL, InterferenceParams, QuorumParams,
                     delta_a_of, growth_rate)

LEDGER_NAMES = ("produced_A", "leaked_A", "degraded_C")


def interference_names(n_signals: int) -> list[str]:
    return ["I" if k == 0 else f"I{k + 1}" for k in range(n_signals)]


def build_colony_network(params: QuorumParams,
                         interference=()) -> ReactionNetwork:
    """Reaction network over (N, A, R_tot, C_tot, S_tot[, I...]) plus ledgers.

    The autoinducer ledger identity produced_A == A + C_tot + leaked_A +
    degraded_C holds after every event by construction: formation and
    unbinding shuttle molecules between A and C_tot, loss channels book into
    leaked_A or degraded_C, and synthesis books into produced_A.
    """
    if isinstance(interference, InterferenceParams):
        interference = (interference,)
    interference = tuple(interference)
    q = params.quanta
    n_cap = params.n_max

    i_names = interference_names(len(interference))
    comps = [Component("N", capacity=n_cap), Component("A"),
             Component("R_tot"), Component("C_tot"), Component("S_tot")]
    comps += [Component(nm) for nm in i_names]
    comps += [Component(nm, counter=True) for nm in LEDGER_NAMES]
    comps.append(Component("V_expr", counter=True))
    schema = StateSchema(comps)

    # Bimolecular token rate: coef * eta_X * eta_Y * V / quanta with
    # eta = tokens*quanta / (V_fl * 0.602214); the volume of the reaction
    # site (cell or total) cancels one denominator.
    def formation_rate(s, t):
        n, a, r = s[0], s[1], s[2]
        if a * q < params.threshold_count(n):
            return 0.0
        return (params.gamma * q * a * r
                / (params.v_tot_fl(n) * COUNT_PER_NM_FL ** 2))

    eps0_s, eps0_r, eps0_v = params.eps0
    epsc_s, epsc_r, epsc_v = params.eps_c

    channels = [
        EventChannel("duplication",
                     lambda s, t: s[0] * growth_rate(s[0], params),
                     delta={"N": +1}),
        EventChannel("synthesis",
                     lambda s, t: params.beta * s[4],
                     delta={"A": +1, "produced_A": +1}),
        EventChannel("unbinding",
                     lambda s, t: params.upsilon_c * s[3],
                     delta={"C_tot": -1, "A": +1, "R_tot": +1}),
        EventChannel("a_loss",
                     lambda s, t: delta_a_of(s[0], params) * s[1],
                     delta={"A": -1, "leaked_A": +1}),
        EventChannel("r_create",
                     lambda s, t: s[0] * eps0_r / q + s[3] * epsc_r,
                     delta={"R_tot": +1}),
        EventChannel("r_degrade",
                     lambda s, t: params.delta_r * s[2],
                     delta={"R_tot": -1}),
        EventChannel("formation", formation_rate,
                     delta={"A": -1, "R_tot": -1, "C_tot": +1}),
        EventChannel("c_degrade",
                     lambda s, t: params.delta_c * s[3],
                     delta={"C_tot": -1, "degraded_C": +1}),
        EventChannel("s_create",
                     lambda s, t: s[0] * eps0_s / q + s[3] * epsc_s,
                     delta={"S_tot": +1}),
        EventChannel("s_degrade",
                     lambda s, t: params.delta_s * s[4],
                     delta={"S_tot": -1}),
        EventChannel("v_express",
                     lambda s, t: s[0] * eps0_v / q + s[3] * epsc_v,
                     delta={"V_expr": +1}),
    ]

    for k, inter in enumerate(interference):
        i_idx = 5 + k
        i_name = i_names[k]

        def inject(s, t, inter=inter):
            return inter.mu_i / q

        def leak(s, t, inter=inter, i_idx=i_idx):
            return inter.delta_i_of(s[0]) * s[i_idx]

        coef = inter.binding_coefficient()
        if inter.mechanism == "receptor_inhibition":
            target_idx = 2
            bind_delta = {"R_tot": -1, i_name: -1}
        elif inter.mechanism == "synthase_blocking":
            target_idx = 4
            bind_delta = {"S_tot": -1, i_name: -1}
        else:
            target_idx = 1
            bind_delta = {"A": -1, i_name: -1, "leaked_A": +1}

        # The reaction-site volume cancels the partner concentration's
        # denominator in every mechanism, leaving eta_I's V_tot.
        def bind(s, t, coef=coef, i_idx=i_idx, target_idx=target_idx):
            return (coef * q * s[i_idx] * s[target_idx]
                    / (params.v_tot_fl(s[0]) * COUNT_PER_NM_FL ** 2))

        channels += [
            EventChannel(f"{i_name}_inject", inject, delta={i_name: +1}),
            EventChannel(f"{i_name}_leak", leak, delta={i_name: -1}),
            EventChannel(f"{i_name}_bind", bind, delta=bind_delta),
        ]

    return ReactionNetwork(schema, channels, name="colony")


def initial_colony_state(n_signals: int = 0, n0: int = 1) -> list:
    """Fresh colony: n0 cells, every molecule pool and ledger empty."""
    return [n0] + [0] * (4 + n_signals + len(LEDGER_NAMES) + 1)
