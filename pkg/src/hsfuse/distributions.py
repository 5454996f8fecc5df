"""Sampling primitives and shrinkage-density bound evaluations.

Every sampler draws from a caller-supplied ``numpy.random.Generator`` so that
each chain owns a private, reproducible stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "InverseGammaParams",
    "HsBoundConfig",
    "inverse_gamma",
    "sample_inverse_gamma",
    "sample_half_cauchy_sq",
    "hs_density_bounds",
    "prior_mass_outside",
    "hs_thickness",
]

# (2*pi)^{3/2}, shared normalising constant of the density envelopes.
_TWOPI_32 = (2.0 * math.pi) ** 1.5
# sqrt(2/pi^3), constant of the closed-form tail-mass bound.
_TAIL_CONST = math.sqrt(2.0 / math.pi**3)


def _require_positive(value: float, name: str) -> None:
    if not (math.isfinite(value) and value > 0.0):
        raise ValueError(f"{name} must be a positive finite real, got {value!r}")


@dataclass(frozen=True)
class InverseGammaParams:
    """Parameters of the density proportional to ``x^(-shape-1) exp(-scale/x)``."""

    shape: float
    scale: float

    def __post_init__(self) -> None:
        _require_positive(self.shape, "shape")
        _require_positive(self.scale, "scale")


@dataclass(frozen=True)
class HsBoundConfig:
    """Inputs to the density-bound checks: global scale ``tau``, the bound ``L``
    on normalised jump sizes, and the mass-window half-width ``a_n``."""

    tau: float
    L: float
    a_n: float

    def __post_init__(self) -> None:
        _require_positive(self.tau, "tau")
        _require_positive(self.L, "L")
        _require_positive(self.a_n, "a_n")


def inverse_gamma(shape, scale, rng: np.random.Generator, size=None):
    """Draw from IG(shape, scale) as ``scale / Gamma(shape, 1)``.

    ``shape`` and ``scale`` broadcast.  numpy's gamma sampler uses a rejection
    scheme that remains valid for shape < 1, which the half-Cauchy mixture
    needs (all its component shapes are 1/2).
    """
    shape = np.asarray(shape, dtype=float)
    scale = np.asarray(scale, dtype=float)
    if np.any(shape <= 0.0) or np.any(scale <= 0.0):
        raise ValueError("inverse-gamma shape and scale must be positive")
    g = rng.gamma(shape, size=size)
    # gamma draws can underflow to 0.0 for shapes below 1
    g = np.maximum(g, np.finfo(float).tiny)
    return scale / g


def sample_inverse_gamma(params: InverseGammaParams, rng: np.random.Generator) -> float:
    """One draw from IG(params.shape, params.scale)."""
    return float(inverse_gamma(params.shape, params.scale, rng))


def sample_half_cauchy_sq(psi: float, rng: np.random.Generator) -> float:
    """Draw X^2 where X ~ C+(0, psi), via the nested inverse-gamma mixture
    X^2 | phi ~ IG(1/2, 1/phi), phi ~ IG(1/2, 1/psi^2)."""
    _require_positive(psi, "psi")
    phi = float(inverse_gamma(0.5, 1.0 / psi**2, rng))
    return float(inverse_gamma(0.5, 1.0 / phi, rng))


def hs_density_bounds(eta: float, tau: float) -> tuple[float, float]:
    """Pointwise lower/upper envelopes of the horseshoe density at ``eta``.

    lower = log(1 + 4 tau^2/eta^2) / (tau (2 pi)^{3/2})
    upper = 2 log(1 + 2 tau^2/eta^2) / (tau (2 pi)^{3/2})

    Evaluated with ``log1p`` so that tiny ``tau^2/eta^2`` ratios keep full
    relative precision.
    """
    if eta == 0.0:
        raise ValueError("density envelope is unbounded at eta = 0")
    if not math.isfinite(eta):
        raise ValueError(f"eta must be finite, got {eta!r}")
    _require_positive(tau, "tau")
    r = (tau / eta) ** 2
    c = 1.0 / (tau * _TWOPI_32)
    lower = c * math.log1p(4.0 * r)
    upper = 2.0 * c * math.log1p(2.0 * r)
    return lower, upper


def prior_mass_outside(a_n: float, tau: float) -> float:
    """Closed-form upper bound on the horseshoe mass outside ``[-a_n, a_n]``.

    Doubling the one-sided integral of the upper envelope and bounding
    ``log(1 + 2 tau^2/eta^2) <= 2 tau^2/eta^2`` gives
    ``sqrt(2/pi^3) * 4 * tau / a_n``; the returned value always dominates the
    true tail mass.
    """
    _require_positive(a_n, "a_n")
    _require_positive(tau, "tau")
    return _TAIL_CONST * 4.0 * tau / a_n


def hs_thickness(L: float, tau: float, sigma: float) -> float:
    """Negative log of the lower envelope at the worst point ``|eta| = L*sigma``.

    Computed in log space: for the tiny ratios ``4 tau^2/(L sigma)^2`` that the
    scale assumptions produce, a direct ``log(log1p(x))`` would underflow.
    """
    _require_positive(L, "L")
    _require_positive(tau, "tau")
    _require_positive(sigma, "sigma")
    lx = math.log(4.0) + 2.0 * math.log(tau) - 2.0 * (math.log(L) + math.log(sigma))
    if lx < -40.0:
        # log1p(x) == x to double precision
        log_log1p = lx
    else:
        log_log1p = math.log(math.log1p(math.exp(lx)))
    return math.log(tau) + 1.5 * math.log(2.0 * math.pi) - log_log1p
