"""Link configuration shared by the covariance assembly and the simulator."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ConfigError

ARCSINE_MODES = ("exact", "linearized")


@dataclass(frozen=True)
class LinkConfig:
    """All chain parameters of one link realization.

    Rates are in samples per symbol period: ``l_u`` at the DAC input, ``l_d``
    at the ADC output and ``R`` for the internal rate that emulates the
    continuous-time section. ``R`` must be an integer multiple of both
    oversampling factors.
    """

    rho: float
    delta_n: float
    l_u: int
    l_d: int
    L_ps: int = 128
    L_eq: int = 64
    sigma_s2: float = 1.0
    alpha: float = 1.0
    R: int = 16
    quantize_tx: bool = True
    quantize_rx: bool = True
    arcsine_mode: str = "exact"
    bypass_lpf: bool = False
    seed: int = 0
    n_symbols: int = 200_000

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ConfigError(f"rho must lie in (0, 1], got {self.rho}")
        if not 0.0 <= self.delta_n < 1.0:
            raise ConfigError(f"delta_n must lie in [0, 1), got {self.delta_n}")
        for name in ("l_u", "l_d"):
            value = getattr(self, name)
            if value < 1:
                raise ConfigError(f"{name} must be >= 1, got {value}")
            if self.R % value != 0:
                raise ConfigError(
                    f"internal rate R={self.R} must be divisible by {name}={value}"
                )
        if self.L_ps < 2:
            raise ConfigError(f"L_ps must be >= 2, got {self.L_ps}")
        if self.L_eq < 1:
            raise ConfigError(f"L_eq must be >= 1, got {self.L_eq}")
        if self.sigma_s2 <= 0:
            raise ConfigError(f"sigma_s2 must be positive, got {self.sigma_s2}")
        if self.alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.arcsine_mode not in ARCSINE_MODES:
            raise ConfigError(
                f"arcsine_mode must be one of {ARCSINE_MODES}, got {self.arcsine_mode!r}"
            )
        if self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.n_symbols < 1:
            raise ConfigError("n_symbols must be >= 1")

    def with_overrides(self, **kwargs) -> "LinkConfig":
        return replace(self, **kwargs)
