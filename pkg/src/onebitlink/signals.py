"""Complex baseband signal container and the elementary rate/quantizer blocks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class ComplexSignal:
    """A finite block of complex baseband samples.

    ``sample_rate`` is expressed in samples per symbol period, so a value of
    2 means two samples per symbol. Samples are stored as complex128 and are
    treated as immutable once constructed.
    """

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        object.__setattr__(self, "samples", samples)
        if not self.sample_rate > 0:
            raise ConfigError(f"sample_rate must be positive, got {self.sample_rate}")
        if samples.ndim != 1:
            raise ConfigError("samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise ConfigError("samples contain NaN or Inf")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        """Signal duration in symbol periods."""
        return len(self.samples) / self.sample_rate

    @property
    def power(self) -> float:
        """Mean power (1/N) * sum |x[k]|^2."""
        if len(self.samples) == 0:
            return 0.0
        return float(np.mean(np.abs(self.samples) ** 2))


def _quantize_array(x: np.ndarray) -> np.ndarray:
    # sign(0) := +1 on both rails
    re = np.where(x.real >= 0.0, 1.0, -1.0)
    im = np.where(x.imag >= 0.0, 1.0, -1.0)
    return re + 1j * im


def upsample(x: ComplexSignal, l: int) -> ComplexSignal:
    """Zero insertion by factor ``l``: out[k*l] = x[k], zeros elsewhere."""
    if l < 1:
        raise ConfigError(f"upsampling factor must be >= 1, got {l}")
    out = np.zeros(len(x) * l, dtype=np.complex128)
    out[::l] = x.samples
    return ComplexSignal(out, x.sample_rate * l)


def downsample(x: ComplexSignal, l: int, offset: int = 0) -> ComplexSignal:
    """Keep every ``l``-th sample starting at ``offset``."""
    if l < 1:
        raise ConfigError(f"downsampling factor must be >= 1, got {l}")
    if not 0 <= offset < l:
        raise ConfigError(f"offset must lie in [0, {l}), got {offset}")
    return ComplexSignal(x.samples[offset::l].copy(), x.sample_rate / l)


def zero_order_hold(x: ComplexSignal, r: int) -> ComplexSignal:
    """Repeat each sample ``r`` times (sample-and-hold reconstruction)."""
    if r < 1:
        raise ConfigError(f"hold factor must be >= 1, got {r}")
    return ComplexSignal(np.repeat(x.samples, r), x.sample_rate * r)


def quantize_1bit(x: ComplexSignal) -> ComplexSignal:
    """Map each sample to sign(Re) + j*sign(Im) with sign(0) = +1."""
    return ComplexSignal(_quantize_array(x.samples), x.sample_rate)
