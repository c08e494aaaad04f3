"""Sample entropy, Higuchi FD and the wavelet bank against naive oracles."""
import numpy as np
import pytest

import reference as ref
from painmon import errors
from painmon.features import dwt_decompose, dwt_energies, higuchi_fd, sample_entropy
from painmon.features.wavelet import DEC_HI, DEC_LO


class TestSampleEntropy:
    def test_constant_is_zero(self):
        value, flagged = sample_entropy(np.full(200, 3.3))
        assert value == 0.0

    def test_sine_more_regular_than_noise(self):
        t = np.arange(2000) / 500.0
        sine = np.sin(2 * np.pi * 1.0 * t)
        rng = np.random.default_rng(0)
        noise = rng.standard_normal(2000)
        s_val, _ = sample_entropy(sine)
        n_val, _ = sample_entropy(noise)
        assert s_val < n_val

    def test_matches_naive_counts(self):
        rng = np.random.default_rng(1)
        for seed in range(5):
            x = np.random.default_rng(seed).standard_normal(400)
            r = 0.2 * x.std()
            from painmon.features.entropy import _sampen_counts
            assert _sampen_counts(x, 2, r) == ref.sampen_naive(x, 2, r)

    def test_value_matches_naive(self):
        x = np.random.default_rng(9).standard_normal(600)
        fast, _ = sample_entropy(x)
        assert fast == pytest.approx(ref.sampen_naive_value(x), abs=1e-12)

    def test_too_short(self):
        with pytest.raises(ValueError):
            sample_entropy(np.zeros(20), m=2)

    def test_no_extended_matches_flagged(self):
        # Repeated (0, 1) templates whose third samples all differ, so
        # m-matches exist but no (m+1)-extension stays within tolerance.
        x = np.concatenate([[0.0, 1.0, 10.0 + 3 * k] for k in range(10)])
        value, flagged = sample_entropy(x, m=2, r_factor=0.001)
        assert flagged
        assert np.isfinite(value)


class TestHiguchi:
    def test_straight_line(self):
        fd, flagged = higuchi_fd(np.arange(200, dtype=float))
        assert fd == pytest.approx(1.0, abs=0.05)
        assert not flagged

    def test_gaussian_noise_near_two(self):
        values = []
        for seed in range(5):
            x = np.random.default_rng(seed).standard_normal(2000)
            fd, _ = higuchi_fd(x)
            values.append(fd)
        assert np.mean(values) == pytest.approx(2.0, abs=0.15)

    def test_scale_invariance(self):
        x = np.random.default_rng(2).standard_normal(1000)
        a, _ = higuchi_fd(x)
        b, _ = higuchi_fd(x * 1234.5)
        assert b == pytest.approx(a, rel=1e-9)

    def test_matches_naive(self):
        for seed in range(5):
            x = np.random.default_rng(seed).standard_normal(500)
            fast, _ = higuchi_fd(x)
            assert fast == pytest.approx(ref.higuchi_fd_naive(x), abs=1e-12)

    def test_constant_flagged(self):
        fd, flagged = higuchi_fd(np.zeros(200))
        assert flagged


class TestWavelet:
    def test_zero_signal(self):
        np.testing.assert_array_equal(dwt_energies(np.zeros(256)), 0.0)

    def test_energy_conservation(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(2048)
        details, approx = dwt_decompose(x, 4)
        total = sum(float((d ** 2).sum()) for d in details) + float((approx ** 2).sum())
        assert total == pytest.approx(float((x ** 2).sum()), rel=1e-9)

    def test_impulse_matches_direct_convolution(self):
        x = np.zeros(64)
        x[0] = 1.0
        details, approx = dwt_decompose(x, 4)
        details_ref, approx_ref = ref.dwt_decompose_naive(x, DEC_LO, DEC_HI, 4)
        for d, dr in zip(details, details_ref):
            np.testing.assert_allclose(d, dr, atol=1e-12)
        np.testing.assert_allclose(approx, approx_ref, atol=1e-12)

    def test_random_signals_match_oracle(self):
        for seed in range(5):
            x = np.random.default_rng(seed).standard_normal(256)
            details, approx = dwt_decompose(x, 4)
            details_ref, approx_ref = ref.dwt_decompose_naive(x, DEC_LO, DEC_HI, 4)
            for d, dr in zip(details, details_ref):
                np.testing.assert_allclose(d, dr, atol=1e-12, rtol=1e-12)
            np.testing.assert_allclose(approx, approx_ref, atol=1e-12, rtol=1e-12)

    def test_energies_shape(self):
        e = dwt_energies(np.random.default_rng(4).standard_normal(500), 4)
        assert e.shape == (5,)
        assert (e >= 0).all()

    def test_too_short(self):
        with pytest.raises(errors.SignalTooShort):
            dwt_decompose(np.zeros(60), 4)

    def test_odd_length_padded(self):
        x = np.random.default_rng(5).standard_normal(501)
        e = dwt_energies(x, 4)
        assert np.isfinite(e).all()
