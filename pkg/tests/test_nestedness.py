# pylint: skip-file
import numpy as np
import pytest

from polardp.construction import bhattacharyya_bounds, bsc_bhattacharyya, korada_thresholds
from polardp.error import InvalidArgument, UnsupportedOperation
from polardp.model import NestedProcessState, PolarCode, ReliabilityProfile
from polardp.nestedness import (LOG_SENTINEL, actual_nonnested_count, classical_bound, fhat_count, ftilde_count,
                                gamma, induced_threshold, initial_product_state, lemma1_bound, lemma1_step,
                                lemma1_trajectories, product_process_step, product_ratio, product_trajectories, psi,
                                r_value, scaling_experiment, scan_point)


class TestPsi:
    def test_fixed_points(self):
        assert psi(0.0) == 0.0
        assert psi(1.0) == 1.0

    def test_half(self):
        assert psi(0.5) == pytest.approx(0.338562, abs=1e-6)

    def test_below_identity_and_increasing(self):
        grid = np.linspace(0.0, 1.0, 201)
        values = np.array([psi(x) for x in grid])
        assert np.all(values <= grid + 1e-15)
        assert np.all(np.diff(values) > 0)

    def test_domain(self):
        with pytest.raises(InvalidArgument):
            psi(1.5)


class TestLemma1Step:
    def test_branch_one(self):
        state = lemma1_step(NestedProcessState(0.3, 0.1), 1)
        assert (state.eps1, state.eps2) == pytest.approx((0.09, 0.19))
        assert state.depth == 1

    def test_branch_zero(self):
        state = lemma1_step(NestedProcessState(0.3, 0.1), 0)
        assert state.eps1 == pytest.approx(0.51)
        assert state.eps2 == pytest.approx(0.018216, abs=1e-6)

    @pytest.mark.parametrize("branch", [0, 1])
    def test_fixed_point(self, branch):
        state = lemma1_step(NestedProcessState(0.0, 1.0), branch)
        assert (state.eps1, state.eps2) == (0.0, 1.0)

    def test_bad_branch(self):
        with pytest.raises(InvalidArgument):
            lemma1_step(NestedProcessState(0.3, 0.1), 2)


class TestLemma1Bound:
    def test_matches_trajectory_count(self):
        Zp, ZD = bsc_bhattacharyya(0.11), bsc_bhattacharyya(0.3)
        for n in (4, 8, 11):
            delta_p, delta_D = 1e-3, 0.99
            eps1, eps2 = lemma1_trajectories(Zp, ZD, n)
            expected = int(np.count_nonzero((eps1 >= delta_p) & (eps2 > 1.0 - delta_D)))
            assert lemma1_bound(Zp, ZD, n, delta_p, delta_D) == expected

    def test_trajectories_follow_the_step_map(self):
        Zp, ZD = 0.4, 0.8
        eps1, eps2 = lemma1_trajectories(Zp, ZD, 3)
        # index 5 = 0b101: plus, minus, plus
        state = NestedProcessState(Zp, 1.0 - ZD)
        for branch in (1, 0, 1):
            state = lemma1_step(state, branch)
        assert (eps1[5], eps2[5]) == pytest.approx((state.eps1, state.eps2))

    def test_trajectories_are_bhattacharyya_bounds(self):
        Zp, ZD = bsc_bhattacharyya(0.05), bsc_bhattacharyya(0.2)
        eps1, eps2 = lemma1_trajectories(Zp, ZD, 6)
        assert np.allclose(eps1, bhattacharyya_bounds(Zp, 6).z_upper)
        assert np.allclose(eps2, 1.0 - bhattacharyya_bounds(ZD, 6).z_lower)

    def test_unsatisfiable_threshold(self):
        assert lemma1_bound(0.3, 0.6, 10, 1.01, 0.5) == 0

    def test_monotone_in_parameters(self):
        grid = [0.2, 0.4, 0.6, 0.8]
        for ZD in (0.85, 0.9):
            counts = [lemma1_bound(Zp, ZD, 9, 1e-3, 0.999) for Zp in grid]
            assert counts == sorted(counts)
        for Zp in (0.1, 0.3):
            counts = [lemma1_bound(Zp, ZD, 9, 1e-3, 0.999) for ZD in (0.5, 0.7, 0.9, 0.95)]
            assert counts == sorted(counts, reverse=True)

    def test_bound_covers_threshold_sets(self):
        for p, D in ((0.11, 0.21), (0.11, 0.31), (0.05, 0.3)):
            N = 1024
            schedule = korada_thresholds(N, 0.5)
            row = scan_point(N, p, D, delta_p=1e-2, delta_D=1.0 - 1e-4)
            assert row.lemma1_bound >= row.actual_count
            row = scan_point(N, p, D)
            assert row.delta_p == schedule.delta_p
            assert row.lemma1_bound >= row.actual_count

    def test_limits(self):
        with pytest.raises(UnsupportedOperation):
            lemma1_bound(0.3, 0.6, 23, 0.1, 0.9)
        with pytest.raises(InvalidArgument):
            lemma1_bound(0.3, 0.6, 0, 0.1, 0.9)
        with pytest.raises(InvalidArgument):
            lemma1_bound(0.6, 0.3, 4, 0.1, 0.9)


class TestSetCounts:
    def test_actual_count(self):
        assert actual_nonnested_count([1, 2], [0, 1, 2, 3]) == 0
        assert actual_nonnested_count([1, 2, 5], []) == 3
        assert actual_nonnested_count(PolarCode(8, [0, 1, 4]), PolarCode(8, [0, 1, 2])) == 1

    def test_fhat(self):
        z = np.array([0.05, 0.2, 0.4, 0.6, 0.95])
        assert fhat_count(z, 0.1, 0.1) == 0
        assert fhat_count(z, 0.1, 0.6) == 2
        with pytest.raises(InvalidArgument):
            fhat_count(z, 0.6, 0.1)

    def test_ftilde_and_classical(self):
        z = np.array([0.05, 0.2, 0.4, 0.6, 0.95, 0.9999])
        assert ftilde_count(z, 0.1) == 1
        assert classical_bound(z, 0.1, 0.1) == 4

    def test_induced_threshold(self):
        z = np.array([0.1, 0.7, 0.3, 0.9])
        assert induced_threshold(z, 0) == np.inf
        assert induced_threshold(z, 2) == 0.7
        assert np.count_nonzero(z >= induced_threshold(z, 3)) == 3
        with pytest.raises(InvalidArgument):
            induced_threshold(z, 5)


class TestProductProcess:
    def test_gamma(self):
        assert gamma(bsc_bhattacharyya(0.05), bsc_bhattacharyya(0.3)) == pytest.approx(0.14718, abs=1e-4)
        assert gamma(1e-9, 0.5) < 1e-8
        assert gamma(0.5, 1.0 - 1e-9) < 1e-7
        with pytest.raises(InvalidArgument):
            gamma(1.0, 0.5)
        with pytest.raises(InvalidArgument):
            gamma(0.5, 0.0)

    def test_trajectories_follow_the_step_map(self):
        Zp, ZD = 0.3, 0.8
        heps1, heps2 = product_trajectories(Zp, ZD, 4)
        assert heps1.size == 16
        # index 6 = 0b0110: minus, plus, plus, minus
        state = initial_product_state(Zp, ZD)
        for branch in (0, 1, 1, 0):
            state = product_process_step(state, branch)
        assert (heps1[6], heps2[6]) == pytest.approx((state.heps1, state.heps2))
        with pytest.raises(InvalidArgument):
            product_trajectories(0.0, 0.8, 4)

    def test_origin_is_fixed(self):
        state = initial_product_state(0.4, 0.9)
        state = state.__class__(0.0, 0.0, r_value(0.0, 0.0))
        for branch in (0, 1):
            stepped = product_process_step(state, branch)
            assert (stepped.heps1, stepped.heps2) == (0.0, 0.0)
            assert stepped.r_value == -LOG_SENTINEL

    def test_sentinels(self):
        assert r_value(0.0, 1.0) == -LOG_SENTINEL
        assert r_value(0.5, 1.0) == LOG_SENTINEL
        assert r_value(0.5, 0.5) == 0.0

    def test_initial_state(self):
        Zp, ZD = 0.3, 0.8
        state = initial_product_state(Zp, ZD)
        assert state.heps2 == pytest.approx(1.0 - ZD * ZD)
        assert 2.0 ** state.r_value == pytest.approx(gamma(Zp, ZD))

    def test_ratio_bounds(self):
        state = initial_product_state(0.35, 0.85)
        for branch in (0, 1):
            ratio, bound = product_ratio(state, branch)
            assert ratio <= bound * (1.0 + 1e-12)

    def test_non_increasing_and_below_gamma(self):
        rng = np.random.default_rng(2024)
        starts = 0
        while starts < 25:
            Zp = rng.uniform(0.01, 0.6)
            ZD = rng.uniform(Zp, 0.99)
            if gamma(Zp, ZD) >= 0.9:
                continue
            starts += 1
            limit = gamma(Zp, ZD)
            frontier = [initial_product_state(Zp, ZD)]
            for _ in range(10):
                stepped_frontier = []
                for state in frontier:
                    for branch in (0, 1):
                        stepped = product_process_step(state, branch)
                        assert stepped.heps1 * stepped.heps2 < limit
                        unsaturated = all(0.0 < value < 1.0 - 1e-9 for value in
                                          (state.heps1, state.heps2, stepped.heps1, stepped.heps2))
                        if unsaturated:
                            assert stepped.r_value <= state.r_value + 1e-6
                        stepped_frontier.append(stepped)
                frontier = stepped_frontier


class TestScaling:
    def test_all_zero_counts_give_zero_slope(self):
        result = scaling_experiment(0.2, 0.6, [8, 9], schedule=lambda N: (2.0, 0.5))
        assert result.slope == 0.0
        assert result.rows == [(256, 0), (512, 0)]

    def test_tighter_channel_threshold_never_adds(self):
        loose = scaling_experiment(0.1, 0.9, [8, 10], schedule=lambda N: (1.0 / N, 1.0 - 1.0 / N ** 2))
        tight = scaling_experiment(0.1, 0.9, [8, 10], schedule=lambda N: (10.0 / N, 1.0 - 1.0 / N ** 2))
        for (_, loose_count), (_, tight_count) in zip(loose.rows, tight.rows):
            assert tight_count <= loose_count

    def test_default_schedule_rows(self):
        result = scaling_experiment(bsc_bhattacharyya(0.01), bsc_bhattacharyya(0.3), range(8, 11))
        assert [N for N, _ in result.rows] == [256, 512, 1024]

    def test_range_limits(self):
        with pytest.raises(InvalidArgument):
            scaling_experiment(0.1, 0.9, [7, 9])
        with pytest.raises(InvalidArgument):
            scaling_experiment(0.1, 0.9, [23])


class TestScanPoint:
    def test_row_from_codes(self):
        N, p, D = 256, 0.11, 0.3
        profile_p = bhattacharyya_bounds(bsc_bhattacharyya(p), 8)
        profile_D = bhattacharyya_bounds(bsc_bhattacharyya(D), 8)
        code_c = PolarCode(N, np.flatnonzero(profile_p.z_upper >= 1e-3))
        code_s = PolarCode(N, np.flatnonzero(profile_D.z_upper >= 0.95))
        row = scan_point(N, p, D, code_c=code_c, code_s=code_s)
        assert row.actual_count == actual_nonnested_count(code_c, code_s)
        assert np.count_nonzero(profile_p.z_upper >= row.delta_p) >= code_c.frozen_set.size
        assert row.gamma == pytest.approx(gamma(bsc_bhattacharyya(p), bsc_bhattacharyya(D)))
        assert row._asdict()["N"] == N

    def test_thresholds_and_fhat_follow_the_code_profiles(self):
        N, p, D = 8, 0.11, 0.3
        bounds = (np.zeros(N), np.full(N, 0.9))
        profile_c = ReliabilityProfile(N, *bounds, mc_bhattacharyya=[0.6, 0.5, 0.4, 0.05, 0.3, 0.01, 0.005, 0.0001])
        profile_s = ReliabilityProfile(N, *bounds, mc_bhattacharyya=[0.999, 0.95, 0.9, 0.6, 0.85, 0.4, 0.3, 0.01])
        code_c = PolarCode(N, [0, 1, 2])
        code_s = PolarCode(N, [0, 1, 2, 3, 4])
        row = scan_point(N, p, D, code_c=code_c, code_s=code_s, profile_c=profile_c, profile_s=profile_s)
        assert row.delta_p == 0.4
        assert row.delta_D == 0.6
        assert row.fhat_count == 2
        assert row.actual_count == 0
        without_profiles = scan_point(N, p, D, code_c=code_c, code_s=code_s)
        assert without_profiles.delta_p != row.delta_p

    def test_profile_length_must_match(self):
        profile = ReliabilityProfile(16, np.zeros(16), np.ones(16))
        with pytest.raises(InvalidArgument):
            scan_point(8, 0.11, 0.3, profile_c=profile)
