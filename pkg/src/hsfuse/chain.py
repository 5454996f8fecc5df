"""Gibbs sampler for the 1-D fusion model.

Systematic-scan sweeps: the normal means in index order, then the local
shrinkage scales (family-specific), then the global scale (horseshoe only),
then the noise variance.  One chain is strictly sequential and owns its
generator; chains with different streams never share state.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .distributions import InverseGammaParams
from .model import ChainData, GibbsState, McmcConfig, PosteriorSamples, PriorConfig

__all__ = [
    "SCALE_FLOOR",
    "SCALE_CEIL",
    "IterationError",
    "ConditionalNormalParams",
    "chain_rng",
    "initial_state",
    "theta_conditional",
    "lambda_conditional_hs",
    "nu_conditional",
    "tau_conditional",
    "xi_conditional",
    "sigma2_conditional",
    "lambda_conditional_t",
    "lambda_conditional_laplace",
    "update_theta",
    "update_local_scales_hs",
    "update_local_scales_t",
    "update_local_scales_laplace",
    "update_global_scale",
    "update_sigma2",
    "run_chain",
]

logger = logging.getLogger(__name__)

# Overflow guard for sampled scale parameters.
SCALE_FLOOR = 1e-12
SCALE_CEIL = 1e12

_TINY = np.finfo(float).tiny


class IterationError(RuntimeError):
    """Numerical failure inside the sampler, carrying the iteration index."""

    def __init__(self, iteration: int, message: str):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass(frozen=True)
class ConditionalNormalParams:
    """Mean and variance of a scalar normal full conditional."""

    mu: float
    zeta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.zeta) and self.zeta > 0.0):
            raise ValueError(f"conditional variance must be positive, got {self.zeta!r}")


def chain_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for one chain; distinct streams are independent by construction."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream,)))


def _clip_scalar(x: float) -> float:
    return min(max(x, SCALE_FLOOR), SCALE_CEIL)


def _clip_vector(x: np.ndarray) -> np.ndarray:
    return np.clip(x, SCALE_FLOOR, SCALE_CEIL)


def _gamma(rng: np.random.Generator, shape: float, size=None):
    g = rng.gamma(shape, size=size)
    return np.maximum(g, _TINY)


def initial_state(data: ChainData, prior: PriorConfig) -> GibbsState:
    """Warm start at the data: theta = y, unit scales, noise variance from the
    sample variance of first differences."""
    n = data.n
    d = np.diff(data.y)
    sigma_sq = float(np.var(d, ddof=1)) if d.size >= 2 else 1.0
    if not (math.isfinite(sigma_sq) and sigma_sq > 0.0):
        sigma_sq = 1.0
    tau_sq = 1.0
    if prior.family == "horseshoe" and prior.tau_fixed is not None:
        tau_sq = prior.tau_fixed**2
    return GibbsState(
        theta=data.y.copy(),
        lambda_sq=np.ones(n - 1),
        tau_sq=tau_sq,
        sigma_sq=sigma_sq,
        nu=np.ones(n - 1),
        xi=1.0,
    )


# ---------------------------------------------------------------------------
# full-conditional parameters


def theta_conditional(
    i: int, state: GibbsState, data: ChainData, prior: PriorConfig
) -> ConditionalNormalParams:
    """Full conditional of theta_i (1-based i).

    Interior components see both neighbouring differences; the first sees its
    anchor prior N(0, lambda_first^2 sigma^2) instead of a left neighbour, and
    the last has no right neighbour.
    """
    n = data.n
    if not 1 <= i <= n:
        raise IndexError(f"component index must lie in [1, {n}], got {i}")
    lam = state.lambda_sq
    tau_sq = state.tau_sq
    p = 1.0
    m = float(data.y[i - 1])
    if i >= 2:
        left = 1.0 / (lam[i - 2] * tau_sq)
        p += left
        m += float(state.theta[i - 2]) * left
    if i <= n - 1:
        right = 1.0 / (lam[i - 1] * tau_sq)
        p += right
        m += float(state.theta[i]) * right
    if i == 1:
        p += 1.0 / prior.lambda_first**2
    return ConditionalNormalParams(mu=m / p, zeta=state.sigma_sq / p)


def lambda_conditional_hs(
    eta: np.ndarray, nu: np.ndarray, tau_sq: float, sigma_sq: float
) -> tuple[float, np.ndarray]:
    """Shape and per-difference scales of the horseshoe local-scale
    conditional: IG(1, 1/nu_i + eta_i^2 / (2 tau^2 sigma^2))."""
    return 1.0, 1.0 / nu + eta**2 / (2.0 * tau_sq * sigma_sq)


def nu_conditional(lambda_sq: np.ndarray) -> tuple[float, np.ndarray]:
    """Auxiliary update: nu_i ~ IG(1, 1 + 1/lambda_i^2)."""
    return 1.0, 1.0 + 1.0 / lambda_sq


def tau_conditional(
    eta: np.ndarray, lambda_sq: np.ndarray, sigma_sq: float, xi: float, n: int
) -> InverseGammaParams:
    """Global scale: tau^2 ~ IG(n/2, 1/xi + sum(eta^2/lambda^2)/(2 sigma^2))."""
    s = float(np.sum(eta**2 / lambda_sq)) / (2.0 * sigma_sq)
    return InverseGammaParams(shape=0.5 * n, scale=1.0 / xi + s)


def xi_conditional(tau_sq: float) -> InverseGammaParams:
    """Auxiliary update: xi ~ IG(1, 1 + 1/tau^2)."""
    return InverseGammaParams(shape=1.0, scale=1.0 + 1.0 / tau_sq)


def sigma2_conditional(
    y: np.ndarray,
    theta: np.ndarray,
    eta: np.ndarray,
    lambda_sq: np.ndarray,
    tau_sq: float,
    anchor_value: float,
    prior: PriorConfig,
) -> InverseGammaParams:
    """Noise variance: sigma^2 ~ IG(n + a_sigma, b_sigma + (residual SS +
    quadratic form of the differences / tau^2 + anchor^2/lambda_first^2)/2).

    ``anchor_value`` is the component carrying the N(0, lambda_first^2 sigma^2)
    prior: theta_1 on a chain, theta_root on a tree.
    """
    resid = float(np.sum((y - theta) ** 2))
    fuse = float(np.sum(eta**2 / lambda_sq)) / tau_sq
    first = float(anchor_value) ** 2 / prior.lambda_first**2
    return InverseGammaParams(
        shape=y.size + prior.a_sigma,
        scale=prior.b_sigma + 0.5 * (resid + fuse + first),
    )


def lambda_conditional_t(
    eta: np.ndarray, tau_sq: float, sigma_sq: float, prior: PriorConfig, n: int
) -> tuple[float, np.ndarray]:
    """t-family local scales via inverse-gamma mixing:
    IG((df+1)/2, df s^2/2 + eta_i^2/(2 tau^2 sigma^2))."""
    s = prior.resolved_family_scale(n)
    scales = 0.5 * prior.t_df * s * s + eta**2 / (2.0 * tau_sq * sigma_sq)
    return 0.5 * (prior.t_df + 1.0), scales


def lambda_conditional_laplace(
    eta: np.ndarray, tau_sq: float, sigma_sq: float, prior: PriorConfig, n: int
) -> tuple[np.ndarray, float]:
    """Laplace family: the reciprocal scale u = 1/lambda_i^2 is inverse-Gaussian
    with mean tau sigma / (s |eta_i|) and shape 1/s^2.

    The mean is infinite at eta_i = 0, where the conditional degenerates to the
    difference-free gamma form (handled by the update).
    """
    s = prior.resolved_family_scale(n)
    root = math.sqrt(tau_sq * sigma_sq)
    abs_eta = np.abs(eta)
    with np.errstate(divide="ignore"):
        mean_u = np.where(abs_eta > 0.0, root / (s * abs_eta), np.inf)
    return mean_u, 1.0 / (s * s)


# ---------------------------------------------------------------------------
# sweep updates


def update_theta(
    state: GibbsState, data: ChainData, prior: PriorConfig, rng: np.random.Generator
) -> np.ndarray:
    """One systematic sweep i = 1..n, each component redrawn from its full
    conditional given the current values of its neighbours."""
    n = data.n
    z = rng.standard_normal(n).tolist()
    th = state.theta.tolist()
    y = data.y.tolist()
    prec = (1.0 / (state.lambda_sq * state.tau_sq)).tolist()
    anchor = 1.0 / prior.lambda_first**2
    sig = state.sigma_sq
    sqrt = math.sqrt
    last = n - 1
    for j in range(n):
        p = 1.0
        m = y[j]
        if j >= 1:
            pl = prec[j - 1]
            p += pl
            m += th[j - 1] * pl
        if j < last:
            pr = prec[j]
            p += pr
            m += th[j + 1] * pr
        if j == 0:
            p += anchor
        th[j] = m / p + sqrt(sig / p) * z[j]
    state.theta = np.asarray(th)
    return state.theta


def update_local_scales_hs(
    state: GibbsState, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Redraw the horseshoe local scales, then their auxiliaries."""
    eta = np.diff(state.theta)
    shape, scales = lambda_conditional_hs(eta, state.nu, state.tau_sq, state.sigma_sq)
    state.lambda_sq = _clip_vector(scales / _gamma(rng, shape, scales.size))
    shape, scales = nu_conditional(state.lambda_sq)
    state.nu = _clip_vector(scales / _gamma(rng, shape, scales.size))
    return state.lambda_sq, state.nu


def update_local_scales_t(
    state: GibbsState, prior: PriorConfig, rng: np.random.Generator
) -> np.ndarray:
    """Redraw the t-family local scales."""
    eta = np.diff(state.theta)
    shape, scales = lambda_conditional_t(
        eta, state.tau_sq, state.sigma_sq, prior, state.theta.size
    )
    state.lambda_sq = _clip_vector(scales / _gamma(rng, shape, scales.size))
    return state.lambda_sq


def update_local_scales_laplace(
    state: GibbsState, prior: PriorConfig, rng: np.random.Generator
) -> np.ndarray:
    """Redraw the laplace-family local scales via their reciprocals."""
    eta = np.diff(state.theta)
    mean_u, ig_shape = lambda_conditional_laplace(
        eta, state.tau_sq, state.sigma_sq, prior, state.theta.size
    )
    s = prior.resolved_family_scale(state.theta.size)
    lam = np.empty_like(eta)
    finite = np.isfinite(mean_u)
    if np.any(finite):
        u = rng.wald(np.minimum(mean_u[finite], 1e12), ig_shape)
        lam[finite] = 1.0 / np.maximum(u, _TINY)
    n_zero = int(np.count_nonzero(~finite))
    if n_zero:
        lam[~finite] = _gamma(rng, 0.5, n_zero) * (2.0 * s * s)
    state.lambda_sq = _clip_vector(lam)
    return state.lambda_sq


def update_global_scale(
    state: GibbsState, rng: np.random.Generator
) -> tuple[float, float]:
    """Redraw the squared global scale and its auxiliary (horseshoe family)."""
    eta = np.diff(state.theta)
    params = tau_conditional(
        eta, state.lambda_sq, state.sigma_sq, state.xi, state.theta.size
    )
    state.tau_sq = _clip_scalar(params.scale / float(_gamma(rng, params.shape)))
    params = xi_conditional(state.tau_sq)
    state.xi = _clip_scalar(params.scale / float(_gamma(rng, params.shape)))
    return state.tau_sq, state.xi


def update_sigma2(
    state: GibbsState, data: ChainData, prior: PriorConfig, rng: np.random.Generator
) -> float:
    """Redraw the noise variance."""
    eta = np.diff(state.theta)
    params = sigma2_conditional(
        data.y, state.theta, eta, state.lambda_sq, state.tau_sq,
        float(state.theta[0]), prior,
    )
    state.sigma_sq = _clip_scalar(params.scale / float(_gamma(rng, params.shape)))
    return state.sigma_sq


def _count_clipped(state: GibbsState) -> int:
    hits = int(np.count_nonzero(state.lambda_sq <= SCALE_FLOOR))
    hits += int(np.count_nonzero(state.lambda_sq >= SCALE_CEIL))
    for value in (state.tau_sq, state.sigma_sq, state.xi):
        if value <= SCALE_FLOOR or value >= SCALE_CEIL:
            hits += 1
    return hits


def run_chain(
    data: ChainData,
    prior: PriorConfig,
    mcmc: McmcConfig,
    *,
    rng: np.random.Generator | None = None,
    stream: int = 0,
) -> PosteriorSamples:
    """Run the Gibbs sampler and collect post-burn-in, thinned draws.

    Deterministic given ``mcmc.seed`` and ``stream``; an explicit ``rng``
    overrides both.  Raises :class:`IterationError` if a sweep produces a
    non-finite state.
    """
    if rng is None:
        rng = chain_rng(mcmc.seed, stream)
    state = initial_state(data, prior)
    sample_tau = prior.family == "horseshoe" and prior.tau_fixed is None
    kept_theta: list[np.ndarray] = []
    kept_sigma: list[float] = []
    kept_tau: list[float] = []
    clipped = 0
    for t in range(mcmc.n_iter):
        update_theta(state, data, prior, rng)
        if prior.family == "horseshoe":
            update_local_scales_hs(state, rng)
        elif prior.family == "t_shrinkage":
            update_local_scales_t(state, prior, rng)
        else:
            update_local_scales_laplace(state, prior, rng)
        if sample_tau:
            update_global_scale(state, rng)
        update_sigma2(state, data, prior, rng)
        clipped += _count_clipped(state)
        if t >= mcmc.burn_in and (t - mcmc.burn_in) % mcmc.thin == 0:
            if not (
                math.isfinite(state.sigma_sq)
                and math.isfinite(state.tau_sq)
                and np.all(np.isfinite(state.theta))
            ):
                raise IterationError(t, "non-finite sampler state")
            kept_theta.append(state.theta.copy())
            kept_sigma.append(state.sigma_sq)
            kept_tau.append(state.tau_sq)
    if clipped:
        logger.warning(
            "clipped %d scale draws into [%g, %g]", clipped, SCALE_FLOOR, SCALE_CEIL
        )
    meta = {
        "seed": mcmc.seed,
        "stream": stream,
        "n_iter": mcmc.n_iter,
        "burn_in": mcmc.burn_in,
        "thin": mcmc.thin,
        "n": data.n,
        "family": prior.family,
        "a_sigma": prior.a_sigma,
        "b_sigma": prior.b_sigma,
        "lambda_first": prior.lambda_first,
        "family_scale": prior.resolved_family_scale(data.n),
        "t_df": prior.t_df if prior.family == "t_shrinkage" else None,
        "tau_fixed": prior.tau_fixed,
        "clipped_scale_draws": clipped,
    }
    return PosteriorSamples(
        draws=np.asarray(kept_theta),
        sigma_draws=np.asarray(kept_sigma),
        tau_draws=np.asarray(kept_tau),
        meta=meta,
    )
