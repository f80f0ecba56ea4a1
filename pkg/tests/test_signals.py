"""Signal container and elementary block tests."""

import numpy as np
import pytest

from onebitlink import (
    ComplexSignal,
    ConfigError,
    downsample,
    quantize_1bit,
    upsample,
    zero_order_hold,
)


class TestComplexSignal:
    def test_rejects_nan(self):
        with pytest.raises(ConfigError):
            ComplexSignal(np.array([1.0, np.nan]), 1.0)

    def test_rejects_inf_imag(self):
        with pytest.raises(ConfigError):
            ComplexSignal(np.array([1.0 + 1j * np.inf]), 1.0)

    def test_rejects_nonpositive_rate(self):
        with pytest.raises(ConfigError):
            ComplexSignal(np.ones(4), 0.0)

    def test_power_and_duration(self):
        sig = ComplexSignal(np.array([3.0, 4.0j]), 2.0)
        assert sig.power == pytest.approx(12.5)
        assert sig.duration == pytest.approx(1.0)

    def test_power_non_negative_random(self, rng):
        x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        assert ComplexSignal(x, 4.0).power >= 0.0


class TestUpsample:
    def test_zero_insertion(self):
        out = upsample(ComplexSignal([1.0, 2.0], 1.0), 2)
        assert np.array_equal(out.samples, [1.0, 0.0, 2.0, 0.0])
        assert out.sample_rate == 2.0

    def test_identity_for_factor_one(self):
        sig = ComplexSignal([1.0, 2.0, 3.0], 1.5)
        out = upsample(sig, 1)
        assert np.array_equal(out.samples, sig.samples)
        assert out.sample_rate == sig.sample_rate

    def test_length_and_energy(self, rng):
        x = rng.standard_normal(17) + 1j * rng.standard_normal(17)
        out = upsample(ComplexSignal(x, 1.0), 5)
        assert len(out) == 5 * 17
        assert np.sum(np.abs(out.samples) ** 2) == pytest.approx(np.sum(np.abs(x) ** 2))

    def test_rejects_bad_factor(self):
        with pytest.raises(ConfigError):
            upsample(ComplexSignal([1.0], 1.0), 0)


class TestDownsample:
    def test_keeps_every_lth(self):
        out = downsample(ComplexSignal([1.0, 0.0, 2.0, 0.0], 2.0), 2)
        assert np.array_equal(out.samples, [1.0, 2.0])
        assert out.sample_rate == 1.0

    def test_inverts_upsample(self, rng):
        x = rng.standard_normal(23) + 1j * rng.standard_normal(23)
        sig = ComplexSignal(x, 1.0)
        assert np.array_equal(downsample(upsample(sig, 3), 3).samples, x)

    def test_offset_selects_phase(self):
        out = downsample(ComplexSignal([1.0, 0.0, 2.0, 0.0], 2.0), 2, offset=1)
        assert np.array_equal(out.samples, [0.0, 0.0])

    def test_rejects_offset_out_of_range(self):
        with pytest.raises(ConfigError):
            downsample(ComplexSignal([1.0, 2.0], 1.0), 2, offset=2)


class TestZeroOrderHold:
    def test_repeats_samples(self):
        out = zero_order_hold(ComplexSignal([1.0, -1.0], 1.0), 3)
        assert np.array_equal(out.samples, [1.0, 1.0, 1.0, -1.0, -1.0, -1.0])
        assert out.sample_rate == 3.0

    def test_identity_for_factor_one(self):
        sig = ComplexSignal([1.0, 2.0], 1.0)
        assert np.array_equal(zero_order_hold(sig, 1).samples, sig.samples)

    def test_preserves_mean_power(self, rng):
        x = rng.standard_normal(50) + 1j * rng.standard_normal(50)
        sig = ComplexSignal(x, 1.0)
        assert zero_order_hold(sig, 7).power == pytest.approx(sig.power)

    def test_rejects_bad_factor(self):
        with pytest.raises(ConfigError):
            zero_order_hold(ComplexSignal([1.0], 1.0), 0)


class TestQuantize1Bit:
    def test_signs_of_both_rails(self):
        out = quantize_1bit(ComplexSignal([0.3 - 0.7j], 1.0))
        assert out.samples[0] == 1.0 - 1.0j

    def test_zero_maps_to_plus_one(self):
        out = quantize_1bit(ComplexSignal([0.0 + 0.0j], 1.0))
        assert out.samples[0] == 1.0 + 1.0j

    def test_idempotent(self, rng):
        x = rng.standard_normal(40) + 1j * rng.standard_normal(40)
        sig = ComplexSignal(x, 2.0)
        once = quantize_1bit(sig)
        assert np.array_equal(quantize_1bit(once).samples, once.samples)

    def test_output_power_is_two(self, rng):
        x = rng.standard_normal(100) + 1j * rng.standard_normal(100)
        out = quantize_1bit(ComplexSignal(x, 1.0))
        assert np.all(out.samples.real**2 + out.samples.imag**2 == 2.0)


def test_rate_bookkeeping_through_chain(rng):
    # duration in symbol periods survives the usual multirate composition
    x = rng.standard_normal(96) + 1j * rng.standard_normal(96)
    sig = ComplexSignal(x, 1.0)
    up = upsample(sig, 4)
    held = zero_order_hold(up, 4)
    down = downsample(held, 8)
    for stage in (up, held, down):
        assert abs(stage.duration - sig.duration) <= 1.0 / stage.sample_rate
