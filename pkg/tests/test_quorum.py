"""Colony signaling model tests: rate laws, network structure, ledger
bookkeeping, batching, per-cell equivalence, and growth fitting."""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from microq.engine import simulate
from microq.quorum import (COUNT_PER_NM_FL, ColonyRun, InterferenceParams,
                           QuorumParams, activation_time, build_colony_network,
                           concentrations, delta_a_of, duplicate_split,
                           duplication_times, fit_logistic, growth_rate,
                           initial_colony_state, lambda_c_of, logistic,
                           simulate_colony)
from microq.engine.rng import substream


CLOSED = QuorumParams.reference_closed()
OPEN = QuorumParams.reference_open()


class TestRateLaws:
    def test_growth_rate_zero_at_capacity(self):
        assert growth_rate(CLOSED.n_max, CLOSED) == 0.0

    def test_growth_rate_constant_without_capacity(self):
        for n in (1, 10, 10_000):
            assert growth_rate(n, OPEN) == OPEN.rho_max

    def test_growth_rate_midpoint(self):
        assert growth_rate(500, CLOSED) == pytest.approx(0.5)

    def test_loss_rate_constant_in_closed_vessel(self):
        assert delta_a_of(1, CLOSED) == delta_a_of(1000, CLOSED) == CLOSED.xi_d

    def test_loss_rate_open_vessel_values(self):
        assert delta_a_of(1, OPEN) == pytest.approx(5000.01)
        assert delta_a_of(11, OPEN) == pytest.approx(2500.01)

    def test_loss_rate_non_increasing(self):
        vals = [delta_a_of(n, OPEN) for n in range(1, 300)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_zero_signal_zero_concentration(self):
        eta = concentrations((5, 0, 0, 0, 0), CLOSED)
        assert eta["eta_A"] == 0.0

    def test_threshold_count_conversion(self):
        # 21.4 nM in 0.1 nL is 21.4 * 0.602214e5 molecules
        a = 21.4 * 0.602214e5
        eta = concentrations((1, a, 0, 0, 0), CLOSED)
        assert eta["eta_A"] == pytest.approx(21.4, rel=1e-12)
        assert CLOSED.threshold_count(1) == pytest.approx(a, rel=1e-12)

    def test_open_vessel_volume_tracks_population(self):
        assert OPEN.v_tot_fl(1) == pytest.approx(1.1)
        assert OPEN.v_tot_fl(250) == pytest.approx(275.0)

    def test_formation_rate_zero_below_threshold(self):
        a_below = int(CLOSED.threshold_count(1)) - 10
        assert lambda_c_of(a_below, 1000, 1, CLOSED) == 0.0

    def test_formation_rate_zero_without_receptors(self):
        a_above = int(CLOSED.threshold_count(1)) + 10
        assert lambda_c_of(a_above, 0, 1, CLOSED) == 0.0

    def test_formation_rate_value(self):
        # gamma * eta_A * eta_R * V_cell at eta_A=21.4 nM, eta_R=11.07 nM
        a = 21.4 * 0.602214e5
        r = 11.07 * 0.602214
        rate = lambda_c_of(a, r, 1, CLOSED)
        assert rate == pytest.approx(3.5 * 21.4 * 11.07, rel=1e-9)


class TestParamsValidation:
    def test_rejects_negative_rate(self):
        with pytest.raises(ValueError):
            dataclasses.replace(CLOSED, beta=-1.0)

    def test_rejects_unknown_mode(self):
        with pytest.raises(ValueError, match="mode"):
            dataclasses.replace(CLOSED, mode="sealed")

    def test_open_vessel_needs_room_for_the_cell(self):
        with pytest.raises(ValueError):
            dataclasses.replace(OPEN, phi_ex_fl=0.5)

    def test_closed_vessel_must_hold_the_full_population(self):
        with pytest.raises(ValueError):
            dataclasses.replace(CLOSED, v_tot_nl=1e-4)

    def test_quanta_must_be_positive_integer(self):
        with pytest.raises(ValueError):
            dataclasses.replace(CLOSED, quanta=0)

    def test_expression_tuples_need_three_sites(self):
        with pytest.raises(ValueError):
            dataclasses.replace(CLOSED, eps0=(80.0, 80.0))

    def test_interference_rejects_unknown_mechanism(self):
        with pytest.raises(ValueError, match="mechanism"):
            InterferenceParams(mechanism="sequestration")

    def test_interference_rejects_negative_coefficient(self):
        with pytest.raises(ValueError):
            InterferenceParams(mechanism="receptor_inhibition", gamma_ir=-1.0)


class TestNetworkStructure:
    def test_initial_state_propensity_audit(self):
        net = build_colony_network(CLOSED)
        state = initial_colony_state()
        live = {}
        for ch in net.channels:
            p = ch.propensity(state, 0.0)
            if p != 0.0:
                live[ch.name] = p
        assert live == {
            "duplication": pytest.approx(growth_rate(1, CLOSED)),
            "r_create": pytest.approx(80.0),
            "s_create": pytest.approx(80.0),
            "v_express": pytest.approx(80.0),
        }

    def test_unbinding_restores_both_molecules(self):
        net = build_colony_network(CLOSED)
        ch = next(c for c in net.channels if c.name == "unbinding")
        assert ch.delta == {"C_tot": -1, "A": +1, "R_tot": +1}

    def test_everything_silent_except_duplication(self):
        quiet = dataclasses.replace(CLOSED, beta=0.0,
                                    eps0=(0.0, 0.0, 0.0), eps_c=(0.0, 0.0, 0.0))
        net = build_colony_network(quiet)
        state = initial_colony_state()
        live = [c.name for c in net.channels if c.propensity(state, 0.0) > 0]
        assert live == ["duplication"]

    def test_interference_channels_appended(self):
        inter = InterferenceParams(mechanism="receptor_inhibition",
                                   mu_i=10.0, gamma_ir=1.0)
        net = build_colony_network(CLOSED, interference=inter)
        names = [c.name for c in net.channels]
        assert "I_inject" in names and "I_leak" in names and "I_bind" in names
        assert "I" in net.schema.names


class TestTrajectoryInvariants:
    def test_ledger_identity_on_every_sample(self):
        run = simulate_colony(CLOSED, horizon=6.0, sample_period=0.1, seed=5)
        lhs = run.component("produced_A")
        rhs = (run.component("A") + run.component("C_tot")
               + run.component("leaked_A") + run.component("degraded_C"))
        assert np.array_equal(lhs, rhs)

    def test_ledger_checked_after_every_event(self):
        run = simulate_colony(CLOSED, horizon=5.0, sample_period=0.5, seed=2,
                              check_ledger=True)
        assert run.metadata["event_count"] > 0

    def test_population_and_counters_never_decrease(self):
        run = simulate_colony(CLOSED, horizon=8.0, sample_period=0.1, seed=9)
        for name in ("N", "V_expr", "produced_A", "leaked_A", "degraded_C"):
            assert np.all(np.diff(run.component(name)) >= 0), name

    def test_complexes_only_decay_below_threshold(self):
        # start with complexes but far too little signal to form new ones
        net = build_colony_network(CLOSED)
        idx = {name: i for i, name in enumerate(net.schema.names)}
        state = initial_colony_state()
        state[idx["C_tot"]] = 60
        state[idx["produced_A"]] = 60
        traj = simulate(net, state, horizon=2.0, sample_period=0.05, seed=17)
        c = traj.component("C_tot")
        eta_peak = (traj.component("A").max()
                    / (CLOSED.v_tot_fl(1) * COUNT_PER_NM_FL))
        assert eta_peak < CLOSED.eta_a_th_nm
        assert np.all(np.diff(c) <= 0)

    def test_same_seed_same_trajectory(self):
        a = simulate_colony(CLOSED, horizon=3.0, sample_period=0.5, seed=21)
        b = simulate_colony(CLOSED, horizon=3.0, sample_period=0.5, seed=21)
        for name in a.names:
            assert np.array_equal(a.component(name), b.component(name))

    def test_population_column_matches_duplication_count(self):
        run = simulate_colony(OPEN, horizon=3.0, sample_period=0.5, seed=4)
        assert run.component("N")[-1] == 1 + run.metadata["duplications"]


class TestBatching:
    def test_compiled_and_interpreted_paths_agree_exactly(self):
        p = QuorumParams.reference_closed(quanta=50)
        a = simulate_colony(p, horizon=4.0, sample_period=0.5, seed=11,
                            compiled=True)
        b = simulate_colony(p, horizon=4.0, sample_period=0.5, seed=11,
                            compiled=False)
        for name in a.names:
            assert np.array_equal(a.component(name), b.component(name)), name

    def test_quanta_scale_counts_stay_in_molecules(self):
        coarse = QuorumParams.reference_closed(quanta=100)
        run = simulate_colony(coarse, horizon=6.0, sample_period=1.0, seed=8)
        a = run.component("A")
        assert np.all(a % 100 == 0)
        eta = run.component("eta_A_nM")
        expect = a / (coarse.v_tot_fl(1) * COUNT_PER_NM_FL)
        assert np.allclose(eta, expect, rtol=1e-12)

    def test_zero_interference_leaves_event_sequence_unchanged(self):
        idle = InterferenceParams(mechanism="synthase_blocking")
        base = simulate_colony(CLOSED, horizon=4.0, sample_period=0.5, seed=13)
        with_idle = simulate_colony(CLOSED, horizon=4.0, sample_period=0.5,
                                    seed=13, interference=idle)
        assert np.array_equal(with_idle.component("I"),
                              np.zeros_like(with_idle.component("I")))
        for name in base.names:
            assert np.array_equal(base.component(name),
                                  with_idle.component(name)), name

    def test_zero_interference_identity_holds_per_cell_too(self):
        idle = InterferenceParams(mechanism="receptor_inhibition")
        base = simulate_colony(CLOSED, mode="per_cell", horizon=3.0,
                               sample_period=0.5, seed=13)
        with_idle = simulate_colony(CLOSED, mode="per_cell", horizon=3.0,
                                    sample_period=0.5, seed=13,
                                    interference=idle)
        for name in base.names:
            assert np.array_equal(base.component(name),
                                  with_idle.component(name)), name


class TestInterferenceEffects:
    def test_receptor_inhibition_lowers_receptor_level(self):
        inter = InterferenceParams(mechanism="receptor_inhibition",
                                   mu_i=2e5, gamma_ir=50.0, xi_id=0.1)
        base = simulate_colony(CLOSED, horizon=5.0, sample_period=1.0, seed=3)
        hit = simulate_colony(CLOSED, horizon=5.0, sample_period=1.0, seed=3,
                              interference=inter)
        assert hit.component("R_tot")[-1] < base.component("R_tot")[-1]

    def test_degradation_mechanism_books_into_leak_ledger(self):
        inter = InterferenceParams(mechanism="autoinducer_degradation",
                                   mu_i=2e5, delta_ia=50.0, xi_id=0.1)
        run = simulate_colony(CLOSED, horizon=5.0, sample_period=0.5, seed=3,
                              interference=inter, check_ledger=True)
        base = simulate_colony(CLOSED, horizon=5.0, sample_period=0.5, seed=3)
        assert run.component("leaked_A")[-1] > base.component("leaked_A")[-1]


class TestGrowthStage:
    def test_duplication_times_deterministic(self):
        a = duplication_times(CLOSED, 1, 10.0, substream(99, 0))
        b = duplication_times(CLOSED, 1, 10.0, substream(99, 0))
        assert np.array_equal(a, b)

    def test_duplication_times_stop_at_capacity(self):
        small = dataclasses.replace(CLOSED, n_max=16)
        times = duplication_times(small, 1, 1e6, substream(0, 0))
        assert times.size == 15
        assert np.all(np.diff(times) > 0)

    def test_growth_shared_between_paired_modes(self):
        agg = simulate_colony(CLOSED, horizon=4.0, sample_period=0.5, seed=6)
        per = simulate_colony(CLOSED, mode="per_cell", horizon=4.0,
                              sample_period=0.5, seed=6)
        assert np.array_equal(agg.component("N"), per.component("N"))


class TestDuplicateSplit:
    def test_empty_cell_splits_to_empty_children(self):
        rng = np.random.default_rng(0)
        assert duplicate_split((0, 0, 0), rng) == ((0, 0, 0), (0, 0, 0))

    def test_single_pair_splits_evenly(self):
        rng = np.random.default_rng(1)
        hits = 0
        n = 100_000
        for _ in range(n):
            first, _ = duplicate_split((2, 0, 0), rng)
            hits += first[0] == 1
        assert abs(hits / n - 0.5) < 0.01

    @given(st.tuples(st.integers(0, 40), st.integers(0, 40),
                     st.integers(0, 40)), st.integers(0, 2 ** 31))
    def test_split_conserves_every_species(self, cell, seed):
        rng = np.random.default_rng(seed)
        first, second = duplicate_split(cell, rng)
        assert tuple(f + s for f, s in zip(first, second)) == cell
        assert min(first + second) >= 0


class TestAggregateMatchesEventChain:
    def test_means_agree_with_direct_network_simulation(self):
        # same law, different event decompositions: two-stage batched loop
        # vs the growth-inclusive reaction network
        p = dataclasses.replace(CLOSED, beta=1.8)
        net = build_colony_network(p)
        init = initial_colony_state()
        n_runs = 200
        horizon = 1.5
        cols = ("N", "A", "R_tot")
        ours = {c: [] for c in cols}
        ref = {c: [] for c in cols}
        for r in range(n_runs):
            run = simulate_colony(p, horizon=horizon, sample_period=horizon,
                                  seed=1000 + r)
            traj = simulate(net, init, horizon=horizon, sample_period=horizon,
                            seed=5000 + r)
            for c in cols:
                ours[c].append(run.component(c)[-1])
                ref[c].append(traj.component(c)[-1])
        for c in cols:
            a = np.asarray(ours[c], dtype=float)
            b = np.asarray(ref[c], dtype=float)
            se = math.sqrt(a.var(ddof=1) / n_runs + b.var(ddof=1) / n_runs)
            assert abs(a.mean() - b.mean()) <= 4 * max(se, 1e-9), c

    def test_per_cell_means_match_aggregate(self):
        p = dataclasses.replace(CLOSED, beta=1.8)
        n_runs = 150
        cols = ("N", "A", "R_tot", "C_tot", "S_tot")
        agg = {c: [] for c in cols}
        per = {c: [] for c in cols}
        for r in range(n_runs):
            a = simulate_colony(p, horizon=1.0, sample_period=1.0,
                                seed=300 + r)
            b = simulate_colony(p, mode="per_cell", horizon=1.0,
                                sample_period=1.0, seed=7000 + r)
            for c in cols:
                agg[c].append(a.component(c)[-1])
                per[c].append(b.component(c)[-1])
        for c in cols:
            x = np.asarray(agg[c], dtype=float)
            y = np.asarray(per[c], dtype=float)
            se = math.sqrt(x.var(ddof=1) / n_runs + y.var(ddof=1) / n_runs)
            assert abs(x.mean() - y.mean()) <= 4 * max(se, 1e-9), c


class TestActivation:
    def _run_with_eta(self, eta, period=0.25):
        times = np.arange(len(eta)) * period
        return ColonyRun(times=times,
                         columns={"eta_A_nM": np.asarray(eta, dtype=float)},
                         params=CLOSED, metadata={})

    def test_zero_threshold_activates_at_first_sample(self):
        run = self._run_with_eta([0.0, 1.0, 2.0])
        free = dataclasses.replace(CLOSED, eta_a_th_nm=0.0)
        assert activation_time(run, free) == 0.0

    def test_never_crossing_returns_none(self):
        run = self._run_with_eta([0.0, 1.0, 2.0])
        assert activation_time(run) is None

    def test_crossing_sample_index_maps_to_time(self):
        eta = [0.0] * 13 + [30.0, 35.0]
        run = self._run_with_eta(eta, period=0.25)
        assert activation_time(run) == pytest.approx(13 * 0.25)

    def test_stop_on_activation_halts_at_first_crossing(self):
        p = QuorumParams.reference_closed(quanta=100)
        run = simulate_colony(p, horizon=14.0, sample_period=1 / 6, seed=1,
                              stop_on_activation=True)
        eta = run.component("eta_A_nM")
        assert run.metadata["stopped_on_activation"]
        assert eta[-1] >= p.eta_a_th_nm
        assert np.all(eta[:-1] < p.eta_a_th_nm)
        assert activation_time(run) == pytest.approx(run.times[-1])


class TestLogisticFit:
    def test_recovers_exact_curve(self):
        t = np.linspace(0.0, 24.0, 49)
        y = logistic(t, 1e6, 8e8, 0.65)
        fit = fit_logistic(t, y)
        assert fit.ok
        assert fit.rho == pytest.approx(0.65, rel=0.01)
        assert fit.capacity == pytest.approx(8e8, rel=0.01)

    def test_recovers_under_moderate_noise(self):
        rng = np.random.default_rng(12)
        t = np.linspace(0.0, 24.0, 49)
        y = logistic(t, 1e6, 8e8, 0.65) * (1 + 0.05 * rng.standard_normal(49))
        fit = fit_logistic(t, y)
        assert fit.ok
        assert fit.rho == pytest.approx(0.65, rel=0.10)
        assert fit.capacity == pytest.approx(8e8, rel=0.10)

    def test_constant_series_flagged(self):
        t = np.linspace(0.0, 10.0, 11)
        fit = fit_logistic(t, np.full(11, 3e7))
        assert not fit.ok
        assert fit.rho == 0.0
        assert fit.capacity == pytest.approx(3e7)

    def test_rejects_short_or_nonpositive_series(self):
        with pytest.raises(ValueError):
            fit_logistic([0.0, 1.0, 2.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            fit_logistic([0.0, 1.0, 2.0, 3.0], [1.0, 0.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            fit_logistic([0.0, 1.0, 1.0, 3.0], [1.0, 2.0, 3.0, 4.0])

    def test_fitted_curve_is_callable(self):
        t = np.linspace(0.0, 24.0, 49)
        y = logistic(t, 1e6, 8e8, 0.65)
        fit = fit_logistic(t, y)
        assert fit(t)[-1] == pytest.approx(y[-1], rel=0.01)
