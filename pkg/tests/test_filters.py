"""Filter design and filtering operation tests."""

import numpy as np
import pytest
from scipy import signal as sig

from onebitlink import (
    ComplexSignal,
    ConfigError,
    FirFilter,
    IirFilter,
    RateMismatchError,
    RrcSpec,
    convolution_matrix,
    design_butterworth4,
    design_rrc,
    fir_apply,
    iir_apply,
    rrc_impulse_response,
)


class TestRrcDesign:
    def test_tap_count_and_unit_energy(self):
        h = design_rrc(RrcSpec(0.5, 0.25, 2, 128))
        assert len(h.taps) == 129
        assert np.sum(h.taps**2) == pytest.approx(1.0, abs=1e-12)
        assert h.rate == 2.0

    def test_two_tap_degeneracy(self):
        # rho=1 and a half-sample delay at two samples per symbol land every
        # tap on a zero crossing except the pair around the peak
        h = design_rrc(RrcSpec(1.0, 0.5, 2, 128))
        ordered = np.sort(np.abs(h.taps))[::-1]
        assert ordered[0] == pytest.approx(ordered[1], rel=1e-6)
        assert ordered[2] <= ordered[0] * 10 ** (-30 / 20)

    def test_symmetric_for_zero_delay(self):
        h = design_rrc(RrcSpec(0.5, 0.0, 2, 128)).taps
        assert np.allclose(h, h[::-1], atol=1e-15)
        assert np.argmax(h) == 64

    def test_peak_limit_matches_numeric_limit(self):
        # closed form at t = 0 against the two-sided numeric limit
        for rho in (0.25, 0.5, 1.0):
            expected = 1.0 + rho * (4.0 / np.pi - 1.0)
            for tau in (1e-8, -1e-8):
                assert rrc_impulse_response(tau, rho) == pytest.approx(expected, rel=1e-6)
            assert rrc_impulse_response(0.0, rho) == pytest.approx(expected)

    def test_quarter_period_limit_matches_numeric_limit(self):
        for rho in (0.3, 0.5, 1.0):
            pole = 1.0 / (4.0 * rho)
            closed = rrc_impulse_response(pole, rho)
            for eps in (1e-7, -1e-7):
                assert rrc_impulse_response(pole + eps, rho) == pytest.approx(
                    closed, rel=1e-5
                )

    def test_rejects_bad_parameters(self):
        with pytest.raises(ConfigError):
            RrcSpec(0.0, 0.0, 2, 128)
        with pytest.raises(ConfigError):
            RrcSpec(1.2, 0.0, 2, 128)
        with pytest.raises(ConfigError):
            RrcSpec(0.5, 1.0, 2, 128)
        with pytest.raises(ConfigError):
            RrcSpec(0.5, 0.0, 2, 1)
        with pytest.raises(ConfigError):
            RrcSpec(0.5, 0.0, 3, 128)

    def test_taps_converge_as_length_doubles(self):
        short = design_rrc(RrcSpec(0.5, 0.0, 2, 128)).taps
        long = design_rrc(RrcSpec(0.5, 0.0, 2, 256)).taps
        shared = long[64 : 64 + 129]
        tau = (np.arange(257) - 128.0) / 2.0
        tail = np.max(np.abs(long[np.abs(tau) > 4.0]))
        assert np.max(np.abs(short - shared)) <= tail
        # tails decay monotonically in envelope beyond 4 T_s
        env = np.abs(long[np.abs(tau) > 4.0])
        mid = len(env) // 2
        assert env[0] <= np.max(env[: mid + 1])


class TestButterworthDesign:
    def test_cutoff_gain(self):
        f = design_butterworth4(1.0, 16.0)
        _, h = sig.sosfreqz(f.biquad_sections, worN=[1.0], fs=16.0)
        assert 20 * np.log10(abs(h[0])) == pytest.approx(-3.0103, abs=0.05)

    def test_dc_gain(self):
        f = design_butterworth4(1.0, 16.0)
        _, h = sig.sosfreqz(f.biquad_sections, worN=[1e-9], fs=16.0)
        assert 20 * np.log10(abs(h[0])) == pytest.approx(0.0, abs=1e-6)

    def test_octave_rolloff_matches_analog_prototype(self):
        # |H(f)|^2 = 1 / (1 + (f / f3db)^8) evaluated one octave up
        f = design_butterworth4(1.0, 16.0)
        _, h = sig.sosfreqz(f.biquad_sections, worN=[2.0], fs=16.0)
        expected_db = -10 * np.log10(1 + 2.0**8)
        assert 20 * np.log10(abs(h[0])) == pytest.approx(expected_db, abs=0.5)

    def test_rejects_cutoff_at_or_above_nyquist(self):
        with pytest.raises(ConfigError):
            design_butterworth4(8.0, 16.0)
        with pytest.raises(ConfigError):
            design_butterworth4(9.0, 16.0)

    def test_two_sections_stable_unit_dc(self):
        f = design_butterworth4(1.0, 16.0)
        sos = f.biquad_sections
        assert sos.shape == (2, 6)
        for section in sos:
            assert np.all(np.abs(np.roots(section[3:])) < 1.0)

    def test_impulse_response_decays(self):
        f = design_butterworth4(1.0, 16.0)
        x = np.zeros(10_000)
        x[0] = 1.0
        h = sig.sosfilt(f.biquad_sections, x)
        above = np.nonzero(np.abs(h) >= 1e-8)[0]
        assert above.max() < 10_000

    def test_iir_filter_validates_stability(self):
        bad = np.array([[1.0, 0.0, 0.0, 1.0, -2.0, 1.0]])  # double pole at z = 1
        with pytest.raises(ConfigError):
            IirFilter(bad, design_f3db=1.0, rate=16.0)


class TestFirApply:
    def test_identity_filter(self, rng):
        x = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        out = fir_apply(FirFilter([1.0], 2.0), ComplexSignal(x, 2.0))
        assert np.allclose(out.samples, x)

    def test_single_delay_full_mode(self):
        out = fir_apply(
            FirFilter([0.0, 1.0], 1.0), ComplexSignal([1.0, 2.0], 1.0), mode="full"
        )
        assert np.allclose(out.samples, [0.0, 1.0, 2.0])

    def test_impulse_recovers_taps(self):
        h = design_rrc(RrcSpec(0.5, 0.3, 2, 64))
        impulse = np.zeros(65)
        impulse[0] = 1.0
        out = fir_apply(h, ComplexSignal(impulse, 2.0), mode="full")
        assert np.allclose(out.samples.real[:65], h.taps, atol=1e-12)

    def test_rate_mismatch_rejected(self):
        with pytest.raises(RateMismatchError):
            fir_apply(FirFilter([1.0], 2.0), ComplexSignal([1.0], 4.0))

    def test_same_mode_compensates_group_delay(self):
        h = FirFilter([0.0, 1.0, 0.0], 1.0)  # pure one-sample delay, centered
        x = np.arange(8.0)
        out = fir_apply(h, ComplexSignal(x, 1.0), mode="same")
        assert np.allclose(out.samples.real, x)


class TestIirApply:
    def test_matches_scipy_sosfilt(self, rng):
        f = design_butterworth4(1.0, 16.0)
        x = rng.standard_normal(512) + 1j * rng.standard_normal(512)
        out = iir_apply(f, ComplexSignal(x, 16.0))
        assert np.allclose(out.samples, sig.sosfilt(f.biquad_sections, x), atol=1e-12)

    def test_causal_zero_state(self):
        f = design_butterworth4(1.0, 16.0)
        x = np.zeros(64)
        x[10] = 1.0
        out = iir_apply(f, ComplexSignal(x, 16.0))
        assert np.allclose(out.samples[:10], 0.0)

    def test_rate_mismatch_rejected(self):
        f = design_butterworth4(1.0, 16.0)
        with pytest.raises(RateMismatchError):
            iir_apply(f, ComplexSignal(np.ones(8), 8.0))


class TestConvolutionMatrix:
    def test_identity(self):
        assert np.array_equal(convolution_matrix([1.0], 3, 3, 0), np.eye(3))

    def test_two_tap_expansion(self):
        M = convolution_matrix([1.0, 1.0], 2, 3, 0)
        assert np.array_equal(M, [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])

    def test_matches_direct_convolution_exhaustive(self, rng):
        for n in range(1, 9):
            taps = rng.standard_normal(rng.integers(1, 6))
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            M = convolution_matrix(taps, n, n + len(taps) - 1, 0)
            assert np.allclose(M @ x, np.convolve(x, taps), atol=1e-12)

    def test_matches_same_mode_fir(self, rng):
        taps = rng.standard_normal(7)
        x = rng.standard_normal(24) + 1j * rng.standard_normal(24)
        M = convolution_matrix(taps, 24, 24, delay=3)
        out = fir_apply(FirFilter(taps, 1.0), ComplexSignal(x, 1.0), mode="same")
        assert np.allclose(M @ x, out.samples, atol=1e-12)

    def test_rejects_empty_dimensions(self):
        with pytest.raises(ConfigError):
            convolution_matrix([1.0], 0, 3, 0)
