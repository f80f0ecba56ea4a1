"""Covariance-chain assembly and the quantization-aware MMSE equalizer.

The receiver observes a window of ``L_eq`` consecutive ADC-grid samples. The
covariance of that window and its cross-covariance against every transmitted
symbol overlapping the window are assembled from the pulse-shaper taps, the
emulated analog section and the noise statistics, with the two sign
quantizers entering through the arcsine law / Bussgang gain. The equalizer
taps then solve the block MMSE problem row-wise.

All grids share the time origin: symbol m sits at upsampled-grid index
m * l_u and at time m * T_s; ADC sample n sits at time n * T_s / l_d; the
fine (rate R) grid emulates the continuous-time section.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import LinkConfig
from .errors import ConfigError, IllConditionedError
from .filters import FirFilter, IirFilter
from .quantstats import (
    DiagNormalizer,
    arcsine_cov_exact,
    arcsine_cov_linearized,
    kappa,
)

BUSSGANG_GAIN = math.sqrt(4.0 / math.pi)

#: drop response samples once the remaining tail holds less than this
#: fraction of the total energy
TAIL_ENERGY_FRACTION = 1e-8

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class AnalogResponse:
    """Impulse response of the DAC-to-ADC analog section on the fine grid.

    ``taps_fine`` is the causal rate-R response to a single DAC-grid unit
    sample pushed through sample-and-hold, both low-pass filters and the
    channel gain.
    """

    taps_fine: np.ndarray
    rate: int
    l_u: int
    l_d: int

    def __post_init__(self):
        taps = np.asarray(self.taps_fine, dtype=np.float64)
        object.__setattr__(self, "taps_fine", taps)

    @property
    def taps_adc_rate(self) -> np.ndarray:
        """Response decimated to the ADC grid (phase 0)."""
        return self.taps_fine[:: self.rate // self.l_d]

    @property
    def energy(self) -> float:
        return float(np.sum(self.taps_fine**2))

    @property
    def span_symbols(self) -> int:
        """Length of the response in whole symbol periods, rounded up."""
        return -(-len(self.taps_fine) // self.rate)


@dataclass(frozen=True)
class Equalizer:
    """Linear receiver taps over a window of L_eq ADC samples.

    ``delay`` is the targeted symbol column; ``symbol_offset`` converts a
    window position into the symbol index the output estimates: the window
    starting at ADC sample m * l_d yields an estimate of s[m + symbol_offset].
    """

    taps: np.ndarray
    delay: int
    rate: float
    symbol_offset: int
    model_mse: float

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.complex128)
        object.__setattr__(self, "taps", taps)
        if not np.all(np.isfinite(taps)):
            raise ConfigError("equalizer taps contain NaN or Inf")


@dataclass(frozen=True)
class CovarianceSet:
    """All matrices of the block model, on their absolute index grids.

    Rows/columns refer to: ADC window samples (C_x, C_xQ and rows of H_a),
    DAC-grid samples ``k_lo + i`` (C_y and rows of H_ps), upsampled-grid
    samples ``p_lo + i`` (C_su), and symbols ``j_lo + i`` (columns of C_sus
    and C_xQs). ``Gamma`` maps fine-grid noise into the window, scaled so
    that l_d * sigma_n2 * Gamma @ Gamma^H equals the injected-noise
    covariance.
    """

    C_su: np.ndarray
    C_sus: np.ndarray
    C_y: np.ndarray
    C_x: np.ndarray
    C_xQ: np.ndarray
    C_xQs: np.ndarray
    H_ps: np.ndarray
    H_a: np.ndarray
    Gamma: np.ndarray
    K_y: DiagNormalizer | None
    K_x: DiagNormalizer | None
    k_lo: int
    p_lo: int
    j_lo: int
    l_u: int
    l_d: int
    sigma_s2: float

    @property
    def n_symbol_columns(self) -> int:
        return self.C_xQs.shape[1]


def _truncate_tail(x: np.ndarray, fraction: float = TAIL_ENERGY_FRACTION) -> np.ndarray:
    energy = x**2
    total = float(np.sum(energy))
    if total == 0.0:
        return x[:1]
    tail = np.cumsum(energy[::-1])[::-1]
    keep = np.nonzero(tail > fraction * total)[0]
    return x[: keep[-1] + 1]


def _fine_impulse_through(sos_list, n: int) -> np.ndarray:
    x = np.zeros(n)
    x[0] = 1.0
    for sos in sos_list:
        x = _kernels.sosfilt(sos, x).real
    return x


def lpf_fine_response(lpf: IirFilter | None, R: int, n_periods: int = 256) -> np.ndarray:
    """Rate-R impulse response of one low-pass filter (identity if None)."""
    if lpf is None:
        return np.ones(1)
    g = _fine_impulse_through([lpf.biquad_sections], n_periods * R)
    return _truncate_tail(g)


def derive_analog_response(
    config: LinkConfig,
    tx_lpf: IirFilter | None,
    rx_lpf: IirFilter | None,
) -> AnalogResponse:
    """Response of one DAC-grid sample at the ADC-grid input.

    A unit DAC sample is held over R / l_u fine samples, pushed through both
    low-pass filters and the channel gain sqrt(alpha), and truncated once the
    remaining tail carries less than 1e-8 of the total energy.

    When low-pass filters are present, the hold edges carry half weight
    (trapezoid rule), matching the simulated chain and making the emulation
    second-order accurate in 1 / R.
    """
    R = config.R
    if R % config.l_u or R % config.l_d:
        raise ConfigError("internal rate must be divisible by both l_u and l_d")
    hold = R // config.l_u
    n = 256 * R + hold + 1
    x = np.zeros(n)
    sections = [f.biquad_sections for f in (tx_lpf, rx_lpf) if f is not None]
    if sections:
        x[0] = 0.5
        x[1:hold] = 1.0
        x[hold] = 0.5
    else:
        x[:hold] = 1.0
    for sos in sections:
        x = _kernels.sosfilt(sos, x).real
    x = x * math.sqrt(config.alpha)
    return AnalogResponse(_truncate_tail(x), R, config.l_u, config.l_d)


def _toeplitz_from_kernel(kernel, rows, cols):
    """M[i, j] = kernel[rows[i] - cols[j]], zero outside the kernel support."""
    idx = rows[:, None] - cols[None, :]
    valid = (idx >= 0) & (idx < len(kernel))
    out = np.zeros(idx.shape)
    out[valid] = kernel[idx[valid]]
    return out


def build_covariance_set(
    config: LinkConfig,
    h_ps: FirFilter,
    h_analog: AnalogResponse,
    gamma: np.ndarray,
    sigma_n2: float,
) -> CovarianceSet:
    """Assemble the covariance chain seen by the L_eq-sample receiver window.

    The input-side index ranges extend beyond the window by the full span of
    the pulse shaper and the analog response, so no contribution into the
    window is truncated. Per-sample normalizers are kept (the symbol-grid
    cyclostationarity makes diag(C_y) non-constant for rho != 0); nothing is
    averaged.
    """
    if sigma_n2 < 0:
        raise ConfigError("noise power must be non-negative")
    l_u, l_d, R, L_eq = config.l_u, config.l_d, config.R, config.L_eq
    du = R // l_u  # fine samples per DAC-grid step
    dd = R // l_d  # fine samples per ADC-grid step

    g = np.asarray(h_analog.taps_fine, dtype=np.float64)
    taps = np.asarray(h_ps.taps, dtype=np.float64)
    n_taps = len(taps)
    ps_delay = h_ps.group_delay

    # DAC samples k reaching any window sample n in [0, L_eq):
    # 0 <= n * dd - k * du < len(g)
    k_lo = -((len(g) - 1) // du)
    k_hi = ((L_eq - 1) * dd) // du
    ks = np.arange(k_lo, k_hi + 1)
    H_a = _toeplitz_from_kernel(g, np.arange(L_eq) * dd, ks * du)

    # upsampled-symbol samples p feeding those DAC samples through the
    # "same"-mode pulse shaper: y[k] = sum_t taps[t] su[k + D - t]
    p_lo = k_lo + ps_delay - (n_taps - 1)
    p_hi = k_hi + ps_delay
    ps_idx = np.arange(p_lo, p_hi + 1)
    H_ps = _toeplitz_from_kernel(taps, ks + ps_delay, ps_idx)

    symbol_slots = ps_idx % l_u == 0
    C_su = np.zeros((len(ps_idx), len(ps_idx)))
    C_su[symbol_slots, symbol_slots] = config.sigma_s2

    j_lo = -((-p_lo) // l_u)
    j_hi = p_hi // l_u
    js = np.arange(j_lo, j_hi + 1)
    C_sus = np.zeros((len(ps_idx), len(js)))
    C_sus[np.searchsorted(ps_idx, js * l_u), np.arange(len(js))] = config.sigma_s2

    active = H_ps[:, symbol_slots]
    C_y = config.sigma_s2 * (active @ active.T)
    C_ys = H_ps @ C_sus

    exact = config.arcsine_mode == "exact"
    if config.quantize_tx:
        K_y = kappa(C_y)
        C_yq = arcsine_cov_exact(C_y) if exact else arcsine_cov_linearized(C_y)
        C_xs = H_a @ (BUSSGANG_GAIN * K_y.row_scale(C_ys))
    else:
        K_y = None
        C_yq = C_y
        C_xs = H_a @ C_ys

    # exact second-order statistics of the injected fine-grid noise after the
    # receive filter, sampled on the ADC grid; scaled so the conventional
    # l_d * sigma_n2 * Gamma @ Gamma^H form reproduces it
    gamma = np.asarray(gamma, dtype=np.float64)
    us = np.arange(-(len(gamma) - 1), (L_eq - 1) * dd + 1)
    Gamma_fine = _toeplitz_from_kernel(gamma, np.arange(L_eq) * dd, us)
    Gamma = math.sqrt(R / l_d) * Gamma_fine
    C_noise = (l_d * sigma_n2) * (Gamma @ Gamma.T)

    C_x = H_a @ C_yq @ H_a.conj().T + C_noise
    C_x = (C_x + C_x.conj().T) / 2.0

    if config.quantize_rx:
        K_x = kappa(C_x)
        C_xQ = arcsine_cov_exact(C_x) if exact else arcsine_cov_linearized(C_x)
        C_xQs = BUSSGANG_GAIN * K_x.row_scale(C_xs)
    else:
        K_x = None
        C_xQ = C_x
        C_xQs = C_xs

    cond = np.linalg.cond(C_xQ)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise IllConditionedError(
            f"window covariance condition number {cond:.3e} exceeds {_COND_LIMIT:.0e}"
        )

    return CovarianceSet(
        C_su=C_su,
        C_sus=C_sus,
        C_y=np.asarray(C_y, dtype=np.complex128),
        C_x=np.asarray(C_x, dtype=np.complex128),
        C_xQ=np.asarray(C_xQ, dtype=np.complex128),
        C_xQs=np.asarray(C_xQs, dtype=np.complex128),
        H_ps=H_ps,
        H_a=H_a,
        Gamma=Gamma,
        K_y=K_y,
        K_x=K_x,
        k_lo=int(k_lo),
        p_lo=int(p_lo),
        j_lo=int(j_lo),
        l_u=l_u,
        l_d=l_d,
        sigma_s2=config.sigma_s2,
    )


def select_delay(cs: CovarianceSet) -> int:
    """Symbol column with the largest cross-covariance energy.

    Exact ties are broken toward the block center, then toward the lower
    index for determinism.
    """
    norms = np.linalg.norm(cs.C_xQs, axis=0)
    best = norms.max()
    candidates = np.nonzero(norms >= best * (1.0 - 1e-12))[0]
    center = (len(norms) - 1) / 2.0
    order = np.argsort(np.abs(candidates - center), kind="stable")
    return int(candidates[order[0]])


def solve_mmse(cs: CovarianceSet, nu: int) -> Equalizer:
    """Row-wise MMSE solution w with w @ C_xQ = C_xQs[:, nu]^H."""
    if not 0 <= nu < cs.n_symbol_columns:
        raise ConfigError(
            f"delay {nu} outside the symbol block [0, {cs.n_symbol_columns})"
        )
    rhs = cs.C_xQs[:, nu]
    try:
        w_h = np.linalg.solve(cs.C_xQ, rhs)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(f"window covariance is singular: {exc}") from exc
    w = np.conj(w_h)
    mse = float(cs.sigma_s2 - np.real(w @ rhs))
    return Equalizer(
        taps=w,
        delay=nu,
        rate=float(cs.l_d),
        symbol_offset=cs.j_lo + nu,
        model_mse=mse,
    )


def equalize(x_q: np.ndarray, eq: Equalizer, l_d: int) -> np.ndarray:
    """Slide the equalizer over the ADC-grid samples, one output per symbol.

    Output m is taken from the window starting at sample m * l_d and
    estimates s[m + eq.symbol_offset].
    """
    n_out = (len(x_q) - len(eq.taps)) // l_d + 1
    if n_out <= 0:
        raise ConfigError("signal shorter than one equalizer window")
    return _kernels.strided_dot(x_q, eq.taps, 0, l_d, n_out)
