"""End-to-end Monte Carlo simulation of the 1-bit transceiver chain.

The chain per batch: Gray-mapped QPSK symbols -> zero-insertion upsampling ->
pulse shaper -> optional 1-bit DAC -> sample-and-hold to the fine rate ->
transmit low-pass -> channel gain + white complex noise -> receive low-pass
-> ADC-grid sampling -> optional 1-bit ADC -> MMSE equalizer -> symbol
decisions. Batches are statistically independent (fresh filter state, seed
derived from (seed, batch index)) and reduce by integer error counts, so
results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import signal as _sig

from . import _kernels
from .config import LinkConfig
from .equalizer import (
    AnalogResponse,
    CovarianceSet,
    Equalizer,
    build_covariance_set,
    derive_analog_response,
    equalize,
    lpf_fine_response,
    select_delay,
    solve_mmse,
)
from .errors import BracketError, ConfigError, MonotonicityError
from .filters import FirFilter, IirFilter, design_butterworth4, design_rrc, RrcSpec
from .signals import ComplexSignal, _quantize_array

BATCH_SYMBOLS = 32768

#: stream tags mixed into the seed derivation so calibration and payload
#: batches never share a generator state
_STREAM_PAYLOAD = 1
_STREAM_CALIBRATION = 2

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class LinkResult:
    """Outcome of one simulated run at a fixed SNR."""

    ber: float
    n_bit_errors: int
    n_bits: int
    p_t: float
    snr_db: float
    signals: dict | None = None

    def __post_init__(self):
        if self.n_bits > 0 and not math.isclose(
            self.ber, self.n_bit_errors / self.n_bits, rel_tol=1e-12, abs_tol=1e-300
        ):
            raise ConfigError("ber must equal n_bit_errors / n_bits")


@dataclass(frozen=True)
class _ChainParts:
    h_ps: FirFilter
    tx_lpf: IirFilter | None
    rx_lpf: IirFilter | None
    analog: AnalogResponse
    gamma_fine: np.ndarray
    span_symbols: int


@lru_cache(maxsize=64)
def _chain_parts(config: LinkConfig) -> _ChainParts:
    h_ps = design_rrc(RrcSpec(config.rho, config.delta_n, config.l_u, config.L_ps))
    if config.bypass_lpf:
        tx_lpf = rx_lpf = None
    else:
        # 3-dB bandwidth at the symbol rate, designed on the fine grid
        tx_lpf = design_butterworth4(1.0, float(config.R))
        rx_lpf = design_butterworth4(1.0, float(config.R))
    analog = derive_analog_response(config, tx_lpf, rx_lpf)
    gamma_fine = lpf_fine_response(rx_lpf, config.R)
    span = (
        -(-(config.L_ps + 1) // (2 * config.l_u))
        + analog.span_symbols
        + -(-config.L_eq // config.l_d)
        + 4
    )
    return _ChainParts(h_ps, tx_lpf, rx_lpf, analog, gamma_fine, span)


def design_equalizer(config: LinkConfig, sigma_n2: float) -> tuple[Equalizer, CovarianceSet]:
    """Covariance assembly, delay selection and MMSE solve for one noise level."""
    parts = _chain_parts(config)
    cs = build_covariance_set(config, parts.h_ps, parts.analog, parts.gamma_fine, sigma_n2)
    nu = select_delay(cs)
    return solve_mmse(cs, nu), cs


def _batch_rng(seed: int, stream: int, batch: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([seed & _SEED_MASK, stream, batch])
    )


def _transmit_fine(config: LinkConfig, parts: _ChainParts, s: np.ndarray):
    """Symbols through shaping, DAC and transmit low-pass (y_t at rate R)."""
    su = np.zeros(len(s) * config.l_u, dtype=np.complex128)
    su[:: config.l_u] = s
    y = _sig.fftconvolve(su, parts.h_ps.taps.astype(np.complex128), mode="same")
    y_dac = _quantize_array(y) if config.quantize_tx else y
    fine = np.repeat(y_dac, config.R // config.l_u)
    if parts.tx_lpf is not None:
        # sample-and-hold with half-weight edges, matching the trapezoid hold
        # the covariance model uses for the continuous-time emulation
        r = config.R // config.l_u
        prev = np.empty_like(y_dac)
        prev[0] = 0.0
        prev[1:] = y_dac[:-1]
        fine[::r] = 0.5 * (y_dac + prev)
        fine = _kernels.sosfilt(parts.tx_lpf.biquad_sections, fine)
    return y, y_dac, fine


def _tx_batch(config: LinkConfig, parts: _ChainParts, rng: np.random.Generator, n_sym: int):
    """Gray-mapped QPSK transmit side; returns bits and all stage signals."""
    bits = rng.integers(0, 2, size=(2, n_sym), dtype=np.int8)
    amp = math.sqrt(config.sigma_s2 / 2.0)
    s = amp * ((1.0 - 2.0 * bits[0]) + 1j * (1.0 - 2.0 * bits[1]))
    y, y_dac, fine = _transmit_fine(config, parts, s)
    return bits, s, y, y_dac, fine


def _receive_grid(
    config: LinkConfig,
    parts: _ChainParts,
    y_t: np.ndarray,
    noise: np.ndarray | None,
):
    """Channel gain, optional additive noise, receive filter, ADC sampling."""
    r = math.sqrt(config.alpha) * y_t
    if noise is not None:
        r = r + noise
    if parts.rx_lpf is not None:
        r = _kernels.sosfilt(parts.rx_lpf.biquad_sections, r)
    x = r[:: config.R // config.l_d]
    x_q = _quantize_array(x) if config.quantize_rx else x
    return x, x_q


def _rx_batch(
    config: LinkConfig,
    parts: _ChainParts,
    rng: np.random.Generator,
    y_t: np.ndarray,
    sigma_n2: float,
):
    noise = None
    if sigma_n2 > 0.0:
        # white complex noise at the fine rate with PSD N0 across the band
        sd = math.sqrt(sigma_n2 * config.R / 2.0)
        noise = sd * (
            rng.standard_normal(len(y_t)) + 1j * rng.standard_normal(len(y_t))
        )
    return _receive_grid(config, parts, y_t, noise)


def _count_batch_errors(
    config: LinkConfig,
    parts: _ChainParts,
    eq: Equalizer,
    bits: np.ndarray,
    x_q: np.ndarray,
):
    """Equalize, decide, and compare bits on the transient-free symbol range."""
    n_sym = bits.shape[1]
    s_hat = equalize(x_q, eq, config.l_d)
    j_sel = eq.symbol_offset
    span = parts.span_symbols
    m_lo = max(0, span - j_sel)
    m_hi = min(len(s_hat) - 1, n_sym - 1 - span - j_sel)
    if m_hi < m_lo:
        raise ConfigError(
            f"batch of {n_sym} symbols too small to cover the filter spans "
            f"({span} symbols each end)"
        )
    est = s_hat[m_lo : m_hi + 1]
    ref = slice(m_lo + j_sel, m_hi + 1 + j_sel)
    errors = int(np.count_nonzero((est.real < 0) != (bits[0, ref] == 1)))
    errors += int(np.count_nonzero((est.imag < 0) != (bits[1, ref] == 1)))
    return errors, 2 * (m_hi - m_lo + 1), s_hat


def _run_batches(
    config: LinkConfig,
    eq: Equalizer,
    sigma_n2: float,
    seed: int,
    n_symbols: int,
    min_errors: int | None = None,
    max_symbols: int | None = None,
    target_ber: float | None = None,
    decisive_sigma: float = 5.0,
    keep_signals: bool = False,
):
    """Accumulate bit errors over independent batches.

    With ``min_errors`` set, batches continue past ``n_symbols`` until the
    error count is reached, the budget ``max_symbols`` is exhausted, or the
    estimate is decisively separated from ``target_ber``.
    """
    parts = _chain_parts(config)
    min_batch = 2 * parts.span_symbols + abs(eq.symbol_offset) + 2
    total_errors = 0
    total_bits = 0
    consumed = 0
    signals = None
    batch_index = 0
    while True:
        n_b = min(BATCH_SYMBOLS, max(min_batch, n_symbols - consumed))
        rng = _batch_rng(seed, _STREAM_PAYLOAD, batch_index)
        bits, s, y, y_dac, y_t = _tx_batch(config, parts, rng, n_b)
        x, x_q = _rx_batch(config, parts, rng, y_t, sigma_n2)
        errors, n_bits, s_hat = _count_batch_errors(config, parts, eq, bits, x_q)
        total_errors += errors
        total_bits += n_bits
        consumed += n_b
        if keep_signals and signals is None:
            signals = {
                "s": ComplexSignal(s, 1.0),
                "y": ComplexSignal(y, float(config.l_u)),
                "y_dac": ComplexSignal(y_dac, float(config.l_u)),
                "y_t": ComplexSignal(y_t, float(config.R)),
                "x": ComplexSignal(x, float(config.l_d)),
                "x_q": ComplexSignal(x_q, float(config.l_d)),
                "s_hat": ComplexSignal(s_hat, 1.0),
            }
        batch_index += 1

        if min_errors is None:
            if consumed >= n_symbols:
                break
            continue
        if total_errors >= min_errors:
            break
        if max_symbols is not None and consumed >= max_symbols:
            break
        if target_ber is not None:
            expected = target_ber * total_bits
            if expected >= 25.0 and abs(total_errors - expected) > decisive_sigma * math.sqrt(expected):
                break
    return total_errors, total_bits, consumed, signals


def measure_transmit_power(
    config: LinkConfig, seed: int | None = None, n_symbols: int = 20000
) -> float:
    """Mean |y_t|^2 over a calibration run, edge transients excluded."""
    parts = _chain_parts(config)
    seed = config.seed if seed is None else seed
    n_symbols = max(n_symbols, 4 * parts.span_symbols)
    rng = _batch_rng(seed, _STREAM_CALIBRATION, 0)
    _, _, _, _, y_t = _tx_batch(config, parts, rng, n_symbols)
    guard = parts.span_symbols * config.R
    return float(np.mean(np.abs(y_t[guard:-guard]) ** 2))


def transmit_waveform(
    config: LinkConfig, n_symbols: int, seed: int | None = None
) -> ComplexSignal:
    """Transmit output y_t at the fine rate, for spectral analysis."""
    parts = _chain_parts(config)
    seed = config.seed if seed is None else seed
    rng = _batch_rng(seed, _STREAM_CALIBRATION, 1)
    _, _, _, _, y_t = _tx_batch(config, parts, rng, n_symbols)
    guard = parts.span_symbols * config.R
    if len(y_t) <= 2 * guard:
        raise ConfigError("n_symbols too small to cover filter spans")
    return ComplexSignal(y_t[guard:-guard], float(config.R))


def _sigma_n2_for(config: LinkConfig, snr_db: float, p_t: float) -> float:
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return config.alpha * p_t / (10.0 ** (snr_db / 10.0))


def run_chain(
    config: LinkConfig,
    snr_db: float,
    seed: int | None = None,
    p_t: float | None = None,
    keep_signals: bool = False,
) -> LinkResult:
    """Simulate ``config.n_symbols`` symbols at one SNR and measure the BER.

    The noise power is calibrated against the measured transmit power so that
    SNR = alpha * P_T / sigma_n^2 with sigma_n^2 the noise power in the
    symbol-rate bandwidth.
    """
    seed = config.seed if seed is None else seed
    if p_t is None:
        p_t = measure_transmit_power(config, seed)
    sigma_n2 = _sigma_n2_for(config, snr_db, p_t)
    eq, _ = design_equalizer(config, sigma_n2)
    errors, bits, _, signals = _run_batches(
        config, eq, sigma_n2, seed, config.n_symbols, keep_signals=keep_signals
    )
    return LinkResult(
        ber=errors / bits,
        n_bit_errors=errors,
        n_bits=bits,
        p_t=p_t,
        snr_db=snr_db,
        signals=signals,
    )


@dataclass(frozen=True)
class BerEvaluation:
    snr_db: float
    ber: float
    n_bits: int
    n_errors: int

    @property
    def std_error(self) -> float:
        return math.sqrt(max(self.n_errors, 1)) / self.n_bits


@dataclass(frozen=True)
class RequiredSnrResult:
    snr_db: float
    target_ber: float
    evaluations: tuple[BerEvaluation, ...] = field(default=())

    @property
    def total_symbols(self) -> int:
        return sum(e.n_bits for e in self.evaluations) // 2

    @property
    def total_errors(self) -> int:
        return sum(e.n_errors for e in self.evaluations)


def required_snr_search(
    config: LinkConfig,
    target_ber: float = 1e-3,
    tol_db: float = 0.1,
    snr_lo_db: float = -10.0,
    snr_hi_db: float = 30.0,
    min_errors: int = 200,
    max_symbols: int = 10_000_000,
    seed: int | None = None,
) -> RequiredSnrResult:
    """Bisection for the SNR meeting ``target_ber``, with diagnostics.

    Each BER evaluation accumulates batches until ``min_errors`` errors are
    seen, the symbol budget runs out, or the estimate is decisively on one
    side of the target. A non-monotone BER-vs-SNR pair beyond Monte Carlo
    noise aborts the search.
    """
    if not 0 < target_ber < 0.5:
        raise ConfigError(f"target BER must lie in (0, 0.5), got {target_ber}")
    if tol_db <= 0:
        raise ConfigError("tolerance must be positive")
    seed = config.seed if seed is None else seed
    p_t = measure_transmit_power(config, seed)
    evaluations: list[BerEvaluation] = []

    def evaluate(snr_db: float) -> BerEvaluation:
        sigma_n2 = _sigma_n2_for(config, snr_db, p_t)
        eq, _ = design_equalizer(config, sigma_n2)
        errors, bits, _, _ = _run_batches(
            config,
            eq,
            sigma_n2,
            seed,
            config.n_symbols,
            min_errors=min_errors,
            max_symbols=max_symbols,
            target_ber=target_ber,
        )
        ev = BerEvaluation(snr_db, errors / bits, bits, errors)
        for prev in evaluations:
            lo, hi = (prev, ev) if prev.snr_db < ev.snr_db else (ev, prev)
            noise = 5.0 * math.hypot(lo.std_error, hi.std_error)
            if hi.ber > lo.ber + noise:
                raise MonotonicityError(
                    f"BER {hi.ber:.3e} at {hi.snr_db:.2f} dB exceeds "
                    f"{lo.ber:.3e} at {lo.snr_db:.2f} dB beyond Monte Carlo noise"
                )
        evaluations.append(ev)
        return ev

    lo, hi = float(snr_lo_db), float(snr_hi_db)
    if evaluate(lo).ber <= target_ber:
        raise BracketError(
            f"BER already meets {target_ber} at the lower bracket edge {lo} dB"
        )
    if evaluate(hi).ber > target_ber:
        raise BracketError(
            f"target {target_ber} unreachable in range: BER floor above target at {hi} dB"
        )
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if evaluate(mid).ber > target_ber:
            lo = mid
        else:
            hi = mid
    return RequiredSnrResult(
        snr_db=0.5 * (lo + hi),
        target_ber=target_ber,
        evaluations=tuple(evaluations),
    )


def required_snr(
    config: LinkConfig,
    target_ber: float = 1e-3,
    tol_db: float = 0.1,
    **kwargs,
) -> float:
    """SNR in dB at which the uncoded BER crosses ``target_ber``."""
    return required_snr_search(config, target_ber, tol_db, **kwargs).snr_db
