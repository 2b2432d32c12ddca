import math

import numpy as np
import pytest

from pilotguard.adversary import plan_baseline, plan_passive
from pilotguard.channel import (
    SCALAR_DIAGONAL,
    ChannelStatistics,
    build_joint_covariance,
    observe_estimates,
    rho_no_attack,
    rho_random_q,
    sample_channel_set,
    sk_capacity,
)
from pilotguard.errors import NotPSDError, ParameterError
from pilotguard.rng import RngStream


def stats_corr(zeta, n=2, sh=0.5, sg=0.5, gamma=0.0):
    return ChannelStatistics(n=n, sigma_h2=sh, sigma_g2=sg, zeta=zeta,
                             gamma=gamma, correlation=SCALAR_DIAGONAL)


class TestStatisticsValidation:
    def test_bad_n(self):
        with pytest.raises(ParameterError):
            ChannelStatistics(n=0, sigma_h2=1.0, sigma_g2=1.0)

    def test_bad_variance(self):
        with pytest.raises(ParameterError):
            ChannelStatistics(n=2, sigma_h2=0.0, sigma_g2=1.0)

    def test_bad_gamma(self):
        with pytest.raises(ParameterError):
            ChannelStatistics(n=2, sigma_h2=1.0, sigma_g2=1.0, gamma=-1.0)

    def test_bad_mode(self):
        with pytest.raises(ParameterError):
            ChannelStatistics(n=2, sigma_h2=1.0, sigma_g2=1.0,
                              correlation="full")


class TestJointCovariance:
    def test_uncorrelated_is_diagonal(self):
        block = build_joint_covariance(stats_corr(0.0))
        assert np.allclose(block, np.diag([0.5, 0.5, 0.5]))

    def test_half_correlation_block(self):
        block = build_joint_covariance(stats_corr(0.5))
        expected = np.array([
            [0.5, 0.25, 0.25],
            [0.25, 0.5, 0.0625],
            [0.25, 0.0625, 0.5],
        ])
        assert np.allclose(block, expected, atol=1e-15)

    def test_beyond_boundary_rejected(self):
        with pytest.raises(NotPSDError):
            build_joint_covariance(stats_corr(0.9))

    def test_boundary_matches_determinant_root(self):
        # Independent oracle: det of the block for sh = sg = 0.5 is
        # (1 - 2 z^2 + 0.75 z^4) / 8; its smallest positive root is
        # sqrt(2/3). The Cholesky accept/reject transition must agree.
        zs = np.linspace(0.0, 0.8, 401)
        dets = np.array([
            np.linalg.det(build_joint_covariance(stats_corr(z))) for z in zs
        ])
        poly = (1 - 2 * zs ** 2 + 0.75 * zs ** 4) / 8
        assert np.allclose(dets, poly, atol=1e-12)
        root = math.sqrt(2.0 / 3.0)
        assert _is_psd(root - 1e-4)
        assert not _is_psd(root + 1e-4)

    def test_boundary_bisection(self):
        root = math.sqrt(2.0 / 3.0)
        lo, hi = 0.0, 1.0
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if _is_psd(mid):
                lo = mid
            else:
                hi = mid
        assert abs(lo - root) < 1e-6


def _is_psd(zeta, **kwargs):
    try:
        build_joint_covariance(stats_corr(zeta, **kwargs))
        return True
    except NotPSDError:
        return False


class TestSampling:
    def test_marginal_power(self):
        stats = stats_corr(0.5, n=10)
        sets = [sample_channel_set(stats, RngStream(9, t))
                for t in range(1000)]
        h = np.stack([s.h for s in sets]).ravel()
        power = np.abs(h) ** 2
        se = power.std(ddof=1) / np.sqrt(power.size)
        assert abs(power.mean() - 0.5) <= 3 * se

    def test_cross_correlation_at_half(self):
        stats = stats_corr(0.5, n=10)
        sets = [sample_channel_set(stats, RngStream(10, t))
                for t in range(1000)]
        h = np.stack([s.h for s in sets]).ravel()
        g1 = np.stack([s.g1 for s in sets]).ravel()
        prod = g1 * np.conj(h)
        se = prod.real.std(ddof=1) / np.sqrt(prod.size)
        assert abs(prod.real.mean() - 0.25) <= 3 * se
        assert abs(prod.imag.mean()) <= 3 * se

    def test_independent_when_zeta_zero(self):
        stats = stats_corr(0.0, n=10)
        sets = [sample_channel_set(stats, RngStream(11, t))
                for t in range(1000)]
        h = np.stack([s.h for s in sets]).ravel()
        g1 = np.stack([s.g1 for s in sets]).ravel()
        prod = (g1 * np.conj(h)).real
        se = prod.std(ddof=1) / np.sqrt(prod.size)
        assert abs(prod.mean()) <= 3 * se

    def test_full_empirical_block(self):
        # Sampling consistency: empirical covariance of (h, g1, g2)
        # matches the block within 3 standard errors, pooled over entries.
        stats = stats_corr(0.6, n=5)
        block = build_joint_covariance(stats)
        draws = np.stack([
            np.stack([c.h, c.g1, c.g2])
            for c in (sample_channel_set(stats, RngStream(12, t))
                      for t in range(4000))
        ])  # (trials, 3, n, n)
        flat = draws.reshape(draws.shape[0], 3, -1)
        for i in range(3):
            for j in range(3):
                prod = (flat[:, i, :] * np.conj(flat[:, j, :])).real.ravel()
                se = prod.std(ddof=1) / np.sqrt(prod.size)
                assert abs(prod.mean() - block[i, j]) <= 3 * se, (i, j)

    def test_reproducible(self):
        stats = stats_corr(0.3)
        a = sample_channel_set(stats, RngStream(1, 5))
        b = sample_channel_set(stats, RngStream(1, 5))
        assert np.array_equal(a.h, b.h)
        assert np.array_equal(a.g2, b.g2)


class TestObserveEstimates:
    def setup_method(self):
        self.stats = ChannelStatistics(n=3, sigma_h2=1.0, sigma_g2=0.5)
        self.cset = sample_channel_set(self.stats, RngStream(20, 0))

    def test_passive_noiseless(self):
        pair = observe_estimates(self.cset, plan_passive(), 0.0,
                                 RngStream(20, 1))
        assert np.array_equal(pair.h_a, self.cset.h)
        assert np.array_equal(pair.h_b, self.cset.h)

    def test_baseline_phase2_contaminates_alice_only(self):
        pair = observe_estimates(self.cset, plan_baseline(3), 0.0,
                                 RngStream(20, 1))
        assert np.allclose(pair.h_a, self.cset.h + self.cset.g1)
        assert np.array_equal(pair.h_b, self.cset.h)

    def test_baseline_both_phases(self):
        pair = observe_estimates(self.cset, plan_baseline(3, True), 0.0,
                                 RngStream(20, 1))
        assert np.allclose(pair.h_a, self.cset.h + self.cset.g1)
        assert np.allclose(pair.h_b, self.cset.h + self.cset.g2)
        assert np.allclose(pair.h_a - pair.h_b, self.cset.g1 - self.cset.g2)

    def test_noise_power_and_independence(self):
        stats = ChannelStatistics(n=8, sigma_h2=1.0, sigma_g2=0.5, gamma=0.2)
        cset = sample_channel_set(stats, RngStream(21, 0))
        wa, wb = [], []
        for t in range(400):
            pair = observe_estimates(cset, plan_passive(), 0.2,
                                     RngStream(21, 100 + t))
            wa.append(pair.h_a - cset.h)
            wb.append(pair.h_b - cset.h)
        wa = np.stack(wa).ravel()
        wb = np.stack(wb).ravel()
        for w in (wa, wb):
            p = np.abs(w) ** 2
            assert abs(p.mean() - 0.2) <= 3 * p.std(ddof=1) / np.sqrt(p.size)
        cross = (wa * np.conj(wb)).real
        assert abs(cross.mean()) <= 3 * cross.std(ddof=1) / np.sqrt(cross.size)

    def test_dimension_mismatch(self):
        bad = plan_baseline(4)
        with pytest.raises(ParameterError):
            observe_estimates(self.cset, bad, 0.0, RngStream(20, 1))


class TestClosedForms:
    def test_rho_no_attack_values(self):
        assert rho_no_attack(1.0, 0.0) == 1.0
        assert rho_no_attack(1.0, 1.0) == 0.5
        assert rho_no_attack(0.5, 0.5) == 0.5

    def test_rho_no_attack_decreasing_in_gamma(self):
        gammas = np.linspace(0.0, 3.0, 20)
        vals = [rho_no_attack(1.0, g) for g in gammas]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_rho_random_q_values(self):
        assert rho_random_q(1.0, 0.0, 0.7) == rho_no_attack(1.0, 0.7)
        assert rho_random_q(0.5, 0.5, 1.0) == 0.5

    def test_rho_random_q_exceeds_no_attack(self):
        for sq in (0.1, 0.5, 2.0):
            for g in (0.1, 0.5, 2.0):
                assert rho_random_q(1.0, sq, g) > rho_no_attack(1.0, g)

    def test_sk_capacity_values(self):
        assert sk_capacity(0.0) == 0.0
        assert sk_capacity(0.5) == pytest.approx(math.log2(4.0 / 3.0),
                                                 abs=1e-12)
        assert sk_capacity(math.sqrt(1 - 0.5)) == pytest.approx(1.0,
                                                                abs=1e-12)

    def test_sk_capacity_domain(self):
        with pytest.raises(ParameterError):
            sk_capacity(1.0)
        with pytest.raises(ParameterError):
            sk_capacity(-0.1)

    def test_sk_capacity_increasing(self):
        rhos = np.linspace(0.0, 0.99, 50)
        caps = [sk_capacity(r) for r in rhos]
        assert all(a < b for a, b in zip(caps, caps[1:]))
