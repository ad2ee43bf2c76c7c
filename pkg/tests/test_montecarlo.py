import math

import numpy as np
import pytest

from ncrw.bessel import transition_probability
from ncrw.correlations import MultiTimePointSet, correlation_function
from ncrw.kernels import KernelSpec
from ncrw.martingales import FiniteConfiguration
from ncrw.montecarlo import (OccupationProduct, One, WalkEnsemble,
                             WalkPath, absorbed_weight_mean,
                             empirical_correlation, estimate_many, exit_time,
                             h_transform_estimator,
                             martingale_determinant_estimator,
                             sample_ensemble, sample_walk, vandermonde_ratio)

from oracles import survival_probability_jump_chain

XI = FiniteConfiguration((0, 2))


def pts(*groups):
    return MultiTimePointSet(tuple(groups))


class TestWalkPath:
    def test_no_jumps_at_zero_horizon(self):
        rng = np.random.default_rng(0)
        p = sample_walk(3, 0.0, rng)
        assert p.jump_times.size == 0
        assert p.position(0.0) == 3

    def test_position_right_continuous(self):
        p = WalkPath(0, 2.0, np.array([0.5, 1.5]), np.array([1, -1]))
        assert p.position(0.4999) == 0
        assert p.position(0.5) == 1
        assert p.position(1.5) == 0
        assert p.position(2.0) == 0
        with pytest.raises(ValueError):
            p.position(2.5)

    def test_invariant_guards(self):
        with pytest.raises(ValueError):
            WalkPath(0, 1.0, np.array([0.5, 0.5]), np.array([1, 1]))
        with pytest.raises(ValueError):
            WalkPath(0, 1.0, np.array([0.5]), np.array([2]))
        with pytest.raises(ValueError):
            WalkPath(0, 1.0, np.array([1.5]), np.array([1]))

    def test_poisson_jump_count(self):
        t, n = 3.0, 20_000
        rng = np.random.default_rng(42)
        counts = [sample_walk(0, t, rng).jump_times.size for _ in range(n)]
        mean = np.mean(counts)
        assert abs(mean - t) <= 3.0 * math.sqrt(t / n)

    def test_empirical_transition_probability(self):
        t, n = 1.0, 20_000
        rng = np.random.default_rng(11)
        hits = {0: 0, 1: 0, 2: 0}
        for _ in range(n):
            d = sample_walk(0, t, rng).position(t)
            if abs(d) in hits:
                hits[abs(d)] += 1
        for d, count in hits.items():
            # both +-d for d > 0
            p = transition_probability(t, 0, d) * (1 if d == 0 else 2)
            se = math.sqrt(p * (1 - p) / n)
            assert abs(count / n - p) <= 3.5 * se


class TestExitTime:
    def test_single_walk_never_exits(self):
        rng = np.random.default_rng(1)
        ens = sample_ensemble(FiniteConfiguration((5,)), 4.0, rng)
        assert exit_time(ens) == math.inf

    def test_adjacent_first_jump_collides(self):
        # start (0, 1): walker 0 stepping up (or 1 stepping down) collides
        p0 = WalkPath(0, 1.0, np.array([0.3]), np.array([1]))
        p1 = WalkPath(1, 1.0, np.array([]), np.array([]))
        ens = WalkEnsemble(FiniteConfiguration((0, 1)), (p0, p1))
        assert exit_time(ens) == 0.3

    def test_separating_jump_keeps_order(self):
        p0 = WalkPath(0, 1.0, np.array([0.3]), np.array([-1]))
        p1 = WalkPath(1, 1.0, np.array([]), np.array([]))
        ens = WalkEnsemble(FiniteConfiguration((0, 1)), (p0, p1))
        assert exit_time(ens) == math.inf

    def test_survival_matches_jump_chain_oracle(self):
        u, horizon = (0, 2), 1.0
        n = 20_000
        hits = 0
        for i in range(n):
            rng = np.random.default_rng((99, i))
            ens = sample_ensemble(FiniteConfiguration(u), horizon, rng)
            hits += exit_time(ens) > horizon
        p_pkg = hits / n
        p_oracle, se_oracle = survival_probability_jump_chain(u, horizon,
                                                              20_000, 123)
        se = math.hypot(se_oracle, math.sqrt(p_pkg * (1 - p_pkg) / n))
        assert abs(p_pkg - p_oracle) <= 3.0 * se


class TestEstimators:
    def test_h_normalization(self):
        r = h_transform_estimator(XI, One(), 1.0, 30_000, 7)
        assert abs(r.mean - 1.0) <= 3.0 * r.std_error

    def test_dmr_normalization_and_ess(self):
        r = martingale_determinant_estimator(XI, One(), 1.0, 30_000, 7)
        assert abs(r.mean - 1.0) <= 3.0 * r.std_error
        assert r.effective_samples >= 1_000

    def test_absorbed_weight_cancellation(self):
        r = absorbed_weight_mean(XI, 1.0, 30_000, 11)
        assert abs(r.mean) <= 3.0 * r.std_error

    def test_estimators_agree_and_match_kernel(self):
        p = pts((0.5, (0,)))
        analytic = correlation_function(KernelSpec(XI), p)
        rh = h_transform_estimator(XI, OccupationProduct(p), 1.0, 30_000, 3)
        rd = martingale_determinant_estimator(XI, OccupationProduct(p), 1.0,
                                              30_000, 3)
        assert abs(rh.mean - analytic) <= 3.0 * rh.std_error
        assert abs(rd.mean - analytic) <= 3.0 * rd.std_error
        joint = math.hypot(rh.std_error, rd.std_error)
        assert abs(rh.mean - rd.mean) <= 3.0 * joint

    def test_horizon_independence(self):
        p = pts((0.5, (0,)))
        r1 = h_transform_estimator(XI, OccupationProduct(p), 1.0, 20_000, 5)
        r2 = h_transform_estimator(XI, OccupationProduct(p), 1.5, 20_000, 6)
        joint = math.hypot(r1.std_error, r2.std_error)
        assert abs(r1.mean - r2.mean) <= 3.0 * joint

    def test_two_time_determinant(self):
        p = pts((0.5, (0,)), (1.0, (1,)))
        analytic = correlation_function(KernelSpec(XI), p)
        r = martingale_determinant_estimator(XI, OccupationProduct(p), 1.0,
                                             30_000, 17)
        assert abs(r.mean - analytic) <= 3.0 * r.std_error

    def test_occupation_bound(self):
        p = pts((0.5, (1,)))
        for estimator in ("h", "dmr"):
            r = estimate_many(XI, [OccupationProduct(p)], 1.0, 20_000, 9,
                              estimator)[0]
            assert -3.0 * r.std_error <= r.mean <= 1.0 + 3.0 * r.std_error

    def test_validation(self):
        with pytest.raises(ValueError):
            estimate_many(XI, [One()], 1.0, 0, 1)
        with pytest.raises(ValueError):
            estimate_many(XI, [One()], 1.0, 10, -1)
        with pytest.raises(ValueError):
            estimate_many(XI, [One()], 1.0, 10, 1, "bogus")
        with pytest.raises(ValueError):
            estimate_many(XI, [OccupationProduct(pts((2.0, (0,))))],
                          1.0, 10, 1)


class TestReproducibility:
    def test_bit_identical_reruns(self):
        a = h_transform_estimator(XI, One(), 1.0, 2_000, 7)
        b = h_transform_estimator(XI, One(), 1.0, 2_000, 7)
        assert a == b

    def test_thread_count_does_not_change_results(self):
        fs = [One(), OccupationProduct(pts((0.5, (0,))))]
        r1 = estimate_many(XI, fs, 1.0, 5_000, 7, "dmr", threads=1)
        r4 = estimate_many(XI, fs, 1.0, 5_000, 7, "dmr", threads=4)
        assert r1 == r4

    def test_seed_changes_results(self):
        a = h_transform_estimator(XI, One(), 1.0, 2_000, 7)
        b = h_transform_estimator(XI, One(), 1.0, 2_000, 8)
        assert a.mean != b.mean


class TestEmpiricalCorrelation:
    def test_initial_configuration_exact_for_h(self):
        p = pts((0.0, (0, 2)))
        table = empirical_correlation(XI, p, "h", 500, 2)
        entry = table.entries[0]
        assert entry.value == 1.0
        assert entry.std_error == 0.0

    def test_pair_correlation_vs_determinant(self):
        p = pts((0.5, (0, 1)))
        analytic = correlation_function(KernelSpec(XI), p)
        table = empirical_correlation(XI, p, "dmr", 30_000, 21, T=1.0)
        entry = table.entries[0]
        assert abs(entry.value - analytic) <= 3.0 * entry.std_error

    def test_vandermonde_ratio(self):
        assert vandermonde_ratio((0, 1, 3), (0, 1, 3)) == 1.0
        assert vandermonde_ratio((0, 2), (0, 1)) == 2.0
        with pytest.raises(ValueError):
            vandermonde_ratio((0, 1), (0, 1, 2))
