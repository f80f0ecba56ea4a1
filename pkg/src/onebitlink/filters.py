"""Filter design (root-raised cosine, Butterworth) and filtering operations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as _sig
from scipy.optimize import brentq as _brentq

from . import _kernels
from .errors import ConfigError, RateMismatchError
from .signals import ComplexSignal


@dataclass(frozen=True)
class RrcSpec:
    """Parameters of a sampled root-raised-cosine pulse.

    rho      roll-off in (0, 1]
    delta_n  fractional sampling delay in [0, 1), in units of the tap spacing
    l_u      samples per symbol of the tap grid (power of two)
    length   tap index runs n = 0..length, i.e. length + 1 taps
    """

    rho: float
    delta_n: float
    l_u: int
    length: int = 128

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ConfigError(f"roll-off must lie in (0, 1], got {self.rho}")
        if not 0.0 <= self.delta_n < 1.0:
            raise ConfigError(f"fractional delay must lie in [0, 1), got {self.delta_n}")
        if self.l_u < 1 or (self.l_u & (self.l_u - 1)) != 0:
            raise ConfigError(f"oversampling factor must be a power of two, got {self.l_u}")
        if self.length < 2:
            raise ConfigError(f"filter length must be >= 2, got {self.length}")


@dataclass(frozen=True)
class FirFilter:
    """Real FIR taps applying at ``rate`` samples per symbol period."""

    taps: np.ndarray
    rate: float
    normalized: bool = False

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.float64)
        object.__setattr__(self, "taps", taps)
        if taps.ndim != 1 or len(taps) < 1:
            raise ConfigError("taps must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(taps)):
            raise ConfigError("taps contain NaN or Inf")
        if self.normalized and abs(np.sum(taps**2) - 1.0) > 1e-12:
            raise ConfigError("normalized filter must have unit tap energy")

    @property
    def group_delay(self) -> int:
        """Delay compensated by "same"-mode filtering, in samples."""
        return (len(self.taps) - 1) // 2


@dataclass(frozen=True)
class IirFilter:
    """Cascade of second-order sections designed for ``rate`` samples per T_s."""

    biquad_sections: np.ndarray
    design_f3db: float
    rate: float

    def __post_init__(self):
        sos = np.asarray(self.biquad_sections, dtype=np.float64)
        object.__setattr__(self, "biquad_sections", sos)
        if sos.ndim != 2 or sos.shape[1] != 6:
            raise ConfigError(f"biquad sections must have shape (n, 6), got {sos.shape}")
        if not np.allclose(sos[:, 3], 1.0):
            raise ConfigError("sections must be normalized to a0 = 1")
        for poly in sos[:, 3:]:
            if np.any(np.abs(np.roots(poly)) >= 1.0):
                raise ConfigError("unstable section: pole on or outside the unit circle")
        dc = np.prod(np.sum(sos[:, :3], axis=1) / np.sum(sos[:, 3:], axis=1))
        if abs(dc - 1.0) > 1e-9:
            raise ConfigError(f"DC gain must be 1, got {dc}")


def rrc_impulse_response(tau, rho: float):
    """Root-raised-cosine h(tau) on the normalized time axis tau = t / T_s.

    The two removable singularities (tau = 0 and |tau| = 1/(4 rho)) are
    evaluated by their analytic limits.
    """
    if not 0.0 < rho <= 1.0:
        raise ConfigError(f"roll-off must lie in (0, 1], got {rho}")
    tau = np.asarray(tau, dtype=np.float64)
    out = np.empty_like(tau)

    at_zero = np.abs(tau) < 1e-9
    at_pole = np.abs(np.abs(tau) - 1.0 / (4.0 * rho)) < 1e-9
    regular = ~(at_zero | at_pole)

    out[at_zero] = 1.0 + rho * (4.0 / math.pi - 1.0)
    out[at_pole] = (rho / math.sqrt(2.0)) * (
        (1.0 + 2.0 / math.pi) * math.sin(math.pi / (4.0 * rho))
        + (1.0 - 2.0 / math.pi) * math.cos(math.pi / (4.0 * rho))
    )
    t = tau[regular]
    num = np.sin(math.pi * t * (1.0 - rho)) + 4.0 * rho * t * np.cos(
        math.pi * t * (1.0 + rho)
    )
    den = math.pi * t * (1.0 - (4.0 * rho * t) ** 2)
    out[regular] = num / den
    return out if out.ndim else float(out)


def design_rrc(spec: RrcSpec) -> FirFilter:
    """Sample the RRC pulse on a center-aligned grid with a fractional delay.

    Tap n sits at t = (n - length/2 + delta_n) * T with T = T_s / l_u, so
    delta_n = 0 samples the symmetric peak and delta_n shifts the whole grid
    by a sub-sample amount. Taps are normalized to unit energy.
    """
    n = np.arange(spec.length + 1, dtype=np.float64)
    tau = (n - spec.length / 2.0 + spec.delta_n) / spec.l_u
    taps = rrc_impulse_response(tau, spec.rho)
    taps = taps / math.sqrt(np.sum(taps**2))
    return FirFilter(taps, rate=float(spec.l_u), normalized=True)


def _pole_quadratics(poles: np.ndarray):
    """Pair conjugate poles into real quadratics 1 + d1/z + d2/z^2."""
    poles = poles[np.argsort(np.abs(poles.imag))]
    used = np.zeros(len(poles), dtype=bool)
    quads = []
    for i, p in enumerate(poles):
        if used[i]:
            continue
        j = next(
            k
            for k in range(i + 1, len(poles))
            if not used[k] and abs(poles[k] - np.conj(p)) < 1e-9
        )
        used[i] = used[j] = True
        quads.append((-2.0 * p.real, abs(p) ** 2))
    return quads


def _butterworth4_sos(fc: float, fs: float) -> np.ndarray:
    """Impulse-invariant 4th-order Butterworth with analog cutoff ``fc``.

    The discrete impulse response samples the continuous one, so responses
    designed at different rates agree on shared time instants. The system is
    strictly proper (h[0] = 0); the cascade keeps it that way by carrying the
    numerator in one section and a pure one-sample delay in the other.
    """
    b_a, a_a = _sig.butter(4, 2.0 * math.pi * fc, btype="low", analog=True, output="ba")
    bz, az, _ = _sig.cont2discrete((b_a, a_a), 1.0 / fs, method="impulse")
    bz = np.atleast_1d(np.squeeze(bz))
    az = np.atleast_1d(np.squeeze(az))
    scale = np.max(np.abs(bz))
    if abs(bz[0]) > 1e-7 * scale or abs(bz[4]) > 1e-7 * scale:
        raise ConfigError("impulse-invariant numerator lost strict properness")
    (d11, d12), (d21, d22) = _pole_quadratics(np.roots(az))
    sos = np.array(
        [
            [bz[1], bz[2], bz[3], 1.0, d11, d12],
            [0.0, 1.0, 0.0, 1.0, d21, d22],
        ]
    )
    _, h = _sig.sosfreqz(sos, worN=[1e-12], fs=fs)
    sos[0, :3] /= abs(h[0])  # exact unit DC gain
    return sos


def design_butterworth4(f3db: float, fs: float) -> IirFilter:
    """4th-order Butterworth low-pass as a cascade of two biquads.

    The analog cutoff is prewarped (tuned numerically) so the discrete
    magnitude response passes through -3.0103 dB exactly at ``f3db``.
    Frequencies are in units of 1 / T_s.
    """
    if not 0 < f3db < fs / 2:
        raise ConfigError(
            f"cutoff must satisfy 0 < f3db < fs/2, got f3db={f3db}, fs={fs}"
        )

    def gain_error(fc: float) -> float:
        _, h = _sig.sosfreqz(_butterworth4_sos(fc, fs), worN=[f3db], fs=fs)
        return abs(h[0]) - 1.0 / math.sqrt(2.0)

    fc = _brentq(gain_error, 0.5 * f3db, min(1.5 * f3db, 0.499 * fs), xtol=1e-12)
    return IirFilter(_butterworth4_sos(fc, fs), design_f3db=float(f3db), rate=float(fs))


def fir_apply(h: FirFilter, x: ComplexSignal, mode: str = "same") -> ComplexSignal:
    """Linear convolution of a signal with FIR taps.

    mode "full" returns all N + L - 1 samples; mode "same" returns N samples
    with the leading (L - 1) // 2 samples dropped, i.e. the filter's nominal
    group delay is compensated.
    """
    if mode not in ("same", "full"):
        raise ConfigError(f"mode must be 'same' or 'full', got {mode!r}")
    if not math.isclose(h.rate, x.sample_rate, rel_tol=1e-9):
        raise RateMismatchError(
            f"filter rate {h.rate} does not match signal rate {x.sample_rate}"
        )
    out = _sig.fftconvolve(x.samples, h.taps.astype(np.complex128), mode=mode)
    return ComplexSignal(out, x.sample_rate)


def iir_apply(g: IirFilter, x: ComplexSignal) -> ComplexSignal:
    """Causal biquad-cascade filtering with zero initial state."""
    if not math.isclose(g.rate, x.sample_rate, rel_tol=1e-9):
        raise RateMismatchError(
            f"filter rate {g.rate} does not match signal rate {x.sample_rate}"
        )
    return ComplexSignal(_kernels.sosfilt(g.biquad_sections, x.samples), x.sample_rate)


def convolution_matrix(h, n_in: int, n_out: int, delay: int = 0) -> np.ndarray:
    """Toeplitz matrix M with M[i, k] = h[i - k + delay] (zero outside the taps).

    With delay = (len(h) - 1) // 2 and n_out = n_in, M @ x reproduces
    "same"-mode FIR filtering on the block.
    """
    if n_in < 1 or n_out < 1:
        raise ConfigError("matrix dimensions must be >= 1")
    h = np.asarray(h)
    idx = np.arange(n_out)[:, None] - np.arange(n_in)[None, :] + delay
    valid = (idx >= 0) & (idx < len(h))
    out = np.zeros((n_out, n_in), dtype=h.dtype)
    out[valid] = h[idx[valid]]
    return out
