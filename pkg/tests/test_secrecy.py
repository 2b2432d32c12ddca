import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pilotguard.adversary import MODE_CORRELATED_ML, MODE_PASSIVE
from pilotguard.channel import SCALAR_DIAGONAL, ChannelStatistics
from pilotguard.errors import ParameterError
from pilotguard.secrecy import (
    SopConfig,
    _waterfill_gains_batch,
    beamformer,
    estimate_R0,
    mutual_info_rate,
    outage_flags,
    sop_monte_carlo,
    waterfill,
)


def kkt_residual(gains, powers, total):
    """Independent check of the water-filling optimality conditions."""
    g = np.asarray(gains, float)
    p = np.asarray(powers, float)
    active = p > 0
    levels = p[active] + 1.0 / g[active]
    resid = 0.0 if not np.any(active) else np.ptp(levels)
    # inactive channels must sit above the water level
    if np.any(active) and np.any(~active & (g > 0)):
        mu = levels.mean()
        resid = max(resid, max(0.0, mu - np.min(1.0 / g[~active & (g > 0)])))
    return resid, abs(p.sum() - total)


class TestWaterfill:
    def test_single_channel(self):
        assert np.allclose(waterfill([1.0], 1.0), [1.0])

    def test_equal_gains_split_evenly(self):
        assert np.allclose(waterfill([1.0, 1.0], 1.0), [0.5, 0.5])

    def test_two_gains_kkt(self):
        p = waterfill([4.0, 1.0], 1.0)
        resid, drift = kkt_residual([4.0, 1.0], p, 1.0)
        assert resid <= 1e-9
        assert drift <= 1e-12
        assert p[0] > p[1] > 0

    def test_zero_gain_gets_zero_power(self):
        p = waterfill([2.0, 0.0, 1.0], 1.0)
        assert p[1] == 0.0
        assert p.sum() == pytest.approx(1.0, abs=1e-12)

    def test_all_zero_rejected(self):
        with pytest.raises(ParameterError):
            waterfill([0.0, 0.0], 1.0)

    def test_negative_rejected(self):
        with pytest.raises(ParameterError):
            waterfill([1.0, -0.5], 1.0)

    def test_random_vectors_kkt(self):
        gen = np.random.default_rng(90)
        for _ in range(300):
            n = int(gen.integers(1, 9))
            gains = gen.exponential(1.0, size=n)
            total = float(gen.uniform(0.1, 4.0))
            p = waterfill(gains, total)
            resid, drift = kkt_residual(gains, p, total)
            assert resid <= 1e-9
            assert drift <= 1e-12
            assert np.all(p >= 0)

    def test_batch_matches_single(self):
        gen = np.random.default_rng(91)
        gains = np.sort(gen.exponential(1.0, size=(64, 6)), axis=1)[:, ::-1]
        batch = _waterfill_gains_batch(np.ascontiguousarray(gains), 1.0)
        for row_g, row_p in zip(gains, batch):
            assert np.allclose(row_p, waterfill(row_g, 1.0), atol=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=1,
                    max_size=8))
    def test_kkt_property(self, gains):
        p = waterfill(gains, 1.0)
        resid, drift = kkt_residual(gains, p, 1.0)
        assert resid <= 1e-9
        assert drift <= 1e-12


class TestBeamformer:
    def test_unit_power(self):
        gen = np.random.default_rng(92)
        for _ in range(20):
            h = gen.standard_normal((5, 5)) + 1j * gen.standard_normal((5, 5))
            b = beamformer(h)
            assert abs(np.trace(b @ b.conj().T).real - 1.0) <= 1e-10

    def test_rank_one_concentrates_power(self):
        u = np.array([[1.0], [1j]]) / np.sqrt(2)
        v = np.array([[1.0], [-1.0]]) / np.sqrt(2)
        h = 3.0 * (u @ v.conj().T)
        b = beamformer(h)
        s = np.linalg.svd(b, compute_uv=False)
        assert s[0] == pytest.approx(1.0, abs=1e-10)
        assert s[1] <= 1e-10

    def test_identity_estimate_splits_power(self):
        b = beamformer(np.eye(2, dtype=complex))
        s = np.linalg.svd(b, compute_uv=False)
        assert np.allclose(s, [1 / math.sqrt(2)] * 2, atol=1e-12)

    def test_optimal_among_random_unit_beamformers(self):
        gen = np.random.default_rng(93)
        for _ in range(5):
            h = gen.standard_normal((4, 4)) + 1j * gen.standard_normal((4, 4))
            best = mutual_info_rate(h, beamformer(h))
            for _ in range(100):
                raw = gen.standard_normal((4, 4)) \
                    + 1j * gen.standard_normal((4, 4))
                other = raw / np.sqrt(np.sum(np.abs(raw) ** 2))
                assert best >= mutual_info_rate(h, other) - 1e-9


class TestMutualInfoRate:
    def test_zero_beamformer(self):
        assert mutual_info_rate(np.eye(3), np.zeros((3, 3))) == 0.0

    def test_identity_pair(self):
        assert mutual_info_rate(np.eye(3), np.eye(3)) == pytest.approx(3.0)

    def test_eigenvalue_sum_oracle(self):
        gen = np.random.default_rng(94)
        c = gen.standard_normal((4, 4)) + 1j * gen.standard_normal((4, 4))
        b = beamformer(c + gen.standard_normal((4, 4)))
        cb = c @ b
        eig = np.linalg.eigvalsh(cb @ cb.conj().T)
        oracle = float(np.sum(np.log2(1.0 + np.maximum(eig, 0.0))))
        assert mutual_info_rate(c, b) == pytest.approx(oracle, abs=1e-9)


class TestEstimateR0:
    def stats(self, sh=1.0, n=2):
        return ChannelStatistics(n=n, sigma_h2=sh, sigma_g2=0.5)

    def test_vanishing_channel(self):
        r0, _ = estimate_R0(self.stats(sh=1e-4), 400, seed=1)
        assert r0 < 0.1

    def test_standard_error_scales(self):
        r0a, se_a = estimate_R0(self.stats(n=4), 800, seed=2)
        r0b, se_b = estimate_R0(self.stats(n=4), 3200, seed=2)
        assert se_b == pytest.approx(se_a / 2, rel=0.35)

    def test_seed_stability(self):
        r0a, se_a = estimate_R0(self.stats(n=6), 2000, seed=3)
        r0b, se_b = estimate_R0(self.stats(n=6), 2000, seed=4)
        assert abs(r0a - r0b) <= 3 * math.hypot(se_a, se_b)

    def test_minimum_trials(self):
        with pytest.raises(ParameterError):
            estimate_R0(self.stats(), 50, seed=1)


class TestSopMonteCarlo:
    def test_no_leak_channel_means_no_outage(self):
        stats = ChannelStatistics(n=4, sigma_h2=1.0, sigma_g2=1e-4)
        cfg = SopConfig(stats=stats, attack_mode=MODE_PASSIVE, trials=2000,
                        trials_r0=400, seed=5)
        res = sop_monte_carlo(cfg)
        assert res.p_out <= 0.01

    def test_monotone_in_rate_fraction(self):
        stats = ChannelStatistics(n=3, sigma_h2=1.0, sigma_g2=0.5)
        outs = []
        for frac in (0.1, 0.3, 0.5, 0.7):
            cfg = SopConfig(stats=stats, attack_mode=MODE_PASSIVE,
                            trials=1500, trials_r0=400, rate_fraction=frac,
                            seed=6)
            outs.append(sop_monte_carlo(cfg).p_out)
        assert all(a <= b for a, b in zip(outs, outs[1:]))

    def test_correlated_attack_degenerates_without_correlation(self):
        stats = ChannelStatistics(n=3, sigma_h2=0.5, sigma_g2=0.5, zeta=0.0,
                                  correlation=SCALAR_DIAGONAL)
        flags = {}
        for mode in (MODE_PASSIVE, MODE_CORRELATED_ML):
            cfg = SopConfig(stats=stats, attack_mode=mode, trials=400,
                            trials_r0=400, seed=7)
            flags[mode] = outage_flags(cfg, threshold=2.0, trials=range(400))
        # with zero correlation the steering attack injects nothing, so
        # the outage indicators agree trial by trial
        assert np.array_equal(flags[MODE_PASSIVE], flags[MODE_CORRELATED_ML])

    def test_result_reports_alpha_and_counts(self):
        stats = ChannelStatistics(n=3, sigma_h2=0.5, sigma_g2=0.5, zeta=0.4,
                                  correlation=SCALAR_DIAGONAL)
        cfg = SopConfig(stats=stats, attack_mode=MODE_CORRELATED_ML,
                        trials=300, trials_r0=400, seed=8)
        res = sop_monte_carlo(cfg)
        assert res.alpha is not None and res.alpha > 0
        assert res.infeasible_count == 0
        assert res.outage_count == round(res.p_out * res.trials)
        assert 0.0 <= res.p_out <= 1.0

    def test_config_validation(self):
        stats = ChannelStatistics(n=2, sigma_h2=1.0, sigma_g2=0.5)
        with pytest.raises(ParameterError):
            SopConfig(stats=stats, rate_fraction=1.0)
        with pytest.raises(ParameterError):
            SopConfig(stats=stats, attack_mode="outage-everything")
