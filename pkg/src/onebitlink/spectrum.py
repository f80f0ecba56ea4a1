"""PSD estimation of the transmit waveform and fractional-power bandwidth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as _sig

from .errors import ConfigError
from .signals import ComplexSignal

POWER_FRACTION = 0.9375


@dataclass(frozen=True)
class SpectrumEstimate:
    """Two-sided PSD on a uniform frequency grid (units of 1 / T_s)."""

    freqs: np.ndarray
    psd: np.ndarray
    df: float

    @property
    def total_power(self) -> float:
        return float(np.sum(self.psd) * self.df)

    def psd_db(self, floor: float = 1e-300) -> np.ndarray:
        return 10.0 * np.log10(np.maximum(self.psd, floor))


def welch_psd(
    x: ComplexSignal, segment_len: int = 1024, overlap: float = 0.5
) -> SpectrumEstimate:
    """Hann-windowed averaged periodogram, normalized so Parseval holds.

    The estimate is two-sided and ordered from -fs/2 to +fs/2; summing
    psd * df recovers the mean signal power.
    """
    if segment_len < 2 or segment_len & (segment_len - 1):
        raise ConfigError(f"segment length must be a power of two, got {segment_len}")
    if not 0.0 <= overlap < 1.0:
        raise ConfigError(f"overlap fraction must lie in [0, 1), got {overlap}")
    if len(x) < segment_len:
        raise ConfigError(
            f"signal of {len(x)} samples shorter than one segment ({segment_len})"
        )
    freqs, psd = _sig.welch(
        x.samples,
        fs=x.sample_rate,
        window="hann",
        nperseg=segment_len,
        noverlap=int(segment_len * overlap),
        detrend=False,
        return_onesided=False,
        scaling="density",
    )
    order = np.fft.fftshift(np.arange(len(freqs)))
    return SpectrumEstimate(
        freqs=np.fft.fftshift(freqs),
        psd=np.maximum(psd[order], 0.0),
        df=float(x.sample_rate) / segment_len,
    )


def fractional_bandwidth(S: SpectrumEstimate, fraction: float = POWER_FRACTION) -> float:
    """Width of the smallest symmetric band about f = 0 holding ``fraction``
    of the total power, with linear interpolation between bins."""
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"fraction must lie in (0, 1), got {fraction}")
    total = S.total_power
    if total <= 0.0:
        raise ConfigError("spectrum carries no power")

    # accumulate bin masses outward from DC, grouping +/- f pairs
    mass = S.psd * S.df
    abs_f = np.abs(S.freqs)
    order = np.argsort(abs_f, kind="stable")
    sorted_f = abs_f[order]
    cum = np.cumsum(mass[order])

    target = fraction * total
    hit = int(np.searchsorted(cum, target))
    if hit >= len(cum):
        return 2.0 * sorted_f[-1]
    if hit == 0 or sorted_f[hit] == 0.0:
        return 0.0
    prev_cum = cum[hit - 1]
    prev_f = sorted_f[hit - 1]
    step = cum[hit] - prev_cum
    if step <= 0.0:
        return 2.0 * sorted_f[hit]
    t = (target - prev_cum) / step
    return 2.0 * (prev_f + t * (sorted_f[hit] - prev_f))


def band_level_db(S: SpectrumEstimate, f_lo: float, f_hi: float) -> float:
    """Median PSD level in dB over the two-sided band f_lo <= |f| <= f_hi."""
    if not 0.0 <= f_lo < f_hi:
        raise ConfigError(f"need 0 <= f_lo < f_hi, got ({f_lo}, {f_hi})")
    mask = (np.abs(S.freqs) >= f_lo) & (np.abs(S.freqs) <= f_hi)
    if not np.any(mask):
        raise ConfigError("no PSD bins inside the requested band")
    return float(np.median(S.psd_db()[mask]))


def write_psd_csv(S: SpectrumEstimate, path) -> None:
    """CSV export with columns freq (1/T_s) and psd_db."""
    db = S.psd_db()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("freq,psd_db\n")
        for f, p in zip(S.freqs, db):
            fh.write(f"{f:.10g},{p:.10g}\n")
