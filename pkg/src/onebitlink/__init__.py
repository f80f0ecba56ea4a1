"""Single-carrier link simulation with 1-bit converters and oversampling."""

from ._kernels import BACKEND
from .config import LinkConfig
from .equalizer import (
    AnalogResponse,
    CovarianceSet,
    Equalizer,
    build_covariance_set,
    derive_analog_response,
    equalize,
    select_delay,
    solve_mmse,
)
from .errors import (
    BracketError,
    ConfigError,
    DegenerateInputError,
    IllConditionedError,
    MonotonicityError,
    NotACovarianceError,
    OneBitLinkError,
    RateMismatchError,
)
from .filters import (
    FirFilter,
    IirFilter,
    RrcSpec,
    convolution_matrix,
    design_butterworth4,
    design_rrc,
    fir_apply,
    iir_apply,
    rrc_impulse_response,
)
from .linksim import (
    BerEvaluation,
    LinkResult,
    RequiredSnrResult,
    design_equalizer,
    measure_transmit_power,
    required_snr,
    required_snr_search,
    run_chain,
    transmit_waveform,
)
from .quantstats import (
    DiagNormalizer,
    arcsine_cov_exact,
    arcsine_cov_linearized,
    cross_cov_quantized,
    kappa,
)
from .signals import (
    ComplexSignal,
    downsample,
    quantize_1bit,
    upsample,
    zero_order_hold,
)
from .spectrum import (
    SpectrumEstimate,
    band_level_db,
    fractional_bandwidth,
    welch_psd,
    write_psd_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AnalogResponse",
    "BACKEND",
    "BerEvaluation",
    "BracketError",
    "ComplexSignal",
    "ConfigError",
    "CovarianceSet",
    "DegenerateInputError",
    "DiagNormalizer",
    "Equalizer",
    "FirFilter",
    "IirFilter",
    "IllConditionedError",
    "LinkConfig",
    "LinkResult",
    "MonotonicityError",
    "NotACovarianceError",
    "OneBitLinkError",
    "RateMismatchError",
    "RequiredSnrResult",
    "RrcSpec",
    "SpectrumEstimate",
    "arcsine_cov_exact",
    "arcsine_cov_linearized",
    "band_level_db",
    "build_covariance_set",
    "convolution_matrix",
    "cross_cov_quantized",
    "design_butterworth4",
    "design_equalizer",
    "design_rrc",
    "derive_analog_response",
    "downsample",
    "equalize",
    "fir_apply",
    "fractional_bandwidth",
    "iir_apply",
    "kappa",
    "measure_transmit_power",
    "quantize_1bit",
    "required_snr",
    "required_snr_search",
    "rrc_impulse_response",
    "run_chain",
    "select_delay",
    "solve_mmse",
    "transmit_waveform",
    "upsample",
    "welch_psd",
    "write_psd_csv",
    "zero_order_hold",
]
