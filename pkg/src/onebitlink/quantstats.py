"""Second-order statistics of 1-bit-quantized circularly symmetric Gaussians.

For a proper complex Gaussian vector r with covariance C and per-rail sign
quantizer Q(r) = sign(Re r) + j sign(Im r), the quantizer output covariance
follows the arcsine law and the input/output cross-covariance follows the
Bussgang linear gain. Both are exact for Gaussian inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, NotACovarianceError

#: linearization constant: arcsin(x) ~ x leaves this residual on the diagonal
LINEARIZATION_OFFSET = math.pi / 2.0 - 1.0

_CORR_SLACK = 1e-9


@dataclass(frozen=True)
class DiagNormalizer:
    """Elementwise inverse square root of a covariance diagonal."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or np.any(~np.isfinite(v)) or np.any(v <= 0):
            raise DegenerateInputError("normalizer values must be finite and positive")

    def scale(self, C: np.ndarray) -> np.ndarray:
        """Two-sided scaling K C K."""
        return self.values[:, None] * C * self.values[None, :]

    def row_scale(self, C: np.ndarray) -> np.ndarray:
        """One-sided scaling K C."""
        return self.values[:, None] * C


def validate_covariance(C: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Check Hermitian symmetry and a strictly positive real diagonal."""
    C = np.asarray(C, dtype=np.complex128)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise NotACovarianceError(f"covariance must be square, got shape {C.shape}")
    scale = max(np.max(np.abs(C)), 1.0)
    if np.max(np.abs(C - C.conj().T)) > rtol * scale:
        raise NotACovarianceError("covariance is not Hermitian")
    d = np.diag(C)
    if np.any(np.abs(d.imag) > rtol * scale) or np.any(d.real <= 0):
        raise NotACovarianceError("covariance diagonal must be real and positive")
    return C


def kappa(C: np.ndarray) -> DiagNormalizer:
    """diag(C)^(-1/2) as a normalizer; rejects non-positive diagonals."""
    C = np.asarray(C)
    d = np.real(np.diag(C))
    if np.any(d <= 0) or np.any(~np.isfinite(d)):
        raise DegenerateInputError("covariance diagonal must be strictly positive")
    return DiagNormalizer(1.0 / np.sqrt(d))


def _normalized_parts(C: np.ndarray):
    C = validate_covariance(C)
    k = kappa(C)
    Rn = k.scale(C)
    re, im = Rn.real, Rn.imag
    worst = max(np.max(np.abs(re)), np.max(np.abs(im)))
    if worst > 1.0 + _CORR_SLACK:
        raise NotACovarianceError(
            f"normalized correlation magnitude {worst} exceeds 1"
        )
    return k, np.clip(re, -1.0, 1.0), np.clip(im, -1.0, 1.0)


def arcsine_cov_exact(C: np.ndarray) -> np.ndarray:
    """Exact covariance of the quantizer output.

    (4/pi) * (arcsin(K Re{C} K) + j arcsin(K Im{C} K)); the diagonal equals
    2 identically (one unit of power per rail).
    """
    _, re, im = _normalized_parts(C)
    out = (4.0 / math.pi) * (np.arcsin(re) + 1j * np.arcsin(im))
    np.fill_diagonal(out, 2.0)  # remove float residue of (4/pi)*arcsin(1)
    return out


def arcsine_cov_linearized(C: np.ndarray) -> np.ndarray:
    """First-order form (4/pi) * (K C K + (pi/2 - 1) I) of the arcsine law."""
    _, re, im = _normalized_parts(C)
    lin = re + 1j * im + LINEARIZATION_OFFSET * np.eye(C.shape[0])
    out = (4.0 / math.pi) * lin
    np.fill_diagonal(out, 2.0)
    return out


def cross_cov_quantized(C: np.ndarray) -> np.ndarray:
    """Bussgang cross-covariance sqrt(4/pi) * K C between Q(r) and r."""
    k, _, _ = _normalized_parts(C)
    return math.sqrt(4.0 / math.pi) * k.row_scale(np.asarray(C, dtype=np.complex128))
