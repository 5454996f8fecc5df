"""Block-structure recovery: contraction-rate projection of draws onto a
fused-index set, false-positive accounting, the practical pairwise
thresholding rule, and the within/between block separation metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import PosteriorSamples, _as_vector

__all__ = [
    "BlockProjection",
    "PairwiseBlocks",
    "projection_threshold",
    "project_blocks",
    "false_positive_count",
    "false_positive_draws",
    "practical_threshold",
    "wb_metrics",
]


@dataclass(frozen=True)
class BlockProjection:
    """Indices j in 2..n judged fused (normalised difference below threshold)."""

    fused_set: frozenset[int]
    threshold: float
    n: int

    def __post_init__(self) -> None:
        bad = [j for j in self.fused_set if not 2 <= j <= self.n]
        if bad:
            raise ValueError(f"fused indices outside [2, {self.n}]: {sorted(bad)}")


def projection_threshold(n: int, s0: int, epsilon_scale: float = 1.0) -> float:
    """Projection cut-off ``epsilon_scale * sqrt(s0 log n / n) / n``."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if s0 < 1:
        raise ValueError(f"s0 must be >= 1, got {s0}")
    if epsilon_scale <= 0.0:
        raise ValueError(f"epsilon_scale must be positive, got {epsilon_scale}")
    return epsilon_scale * math.sqrt(s0 * math.log(n) / n) / n


def project_blocks(
    theta, sigma: float, s0: int, *, epsilon_scale: float = 1.0
) -> BlockProjection:
    """Project one parameter vector onto its fused-index set: j is fused when
    ``|theta_j - theta_{j-1}| / sigma`` falls strictly below the threshold."""
    theta = _as_vector(theta, "theta")
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    n = theta.size
    thresh = projection_threshold(n, s0, epsilon_scale)
    diffs = np.abs(np.diff(theta)) / sigma
    fused = frozenset(int(j) for j in np.nonzero(diffs < thresh)[0] + 2)
    return BlockProjection(fused_set=fused, threshold=thresh, n=n)


def _true_jump_set(truth: np.ndarray) -> frozenset[int]:
    return frozenset(int(j) for j in np.nonzero(np.diff(truth) != 0.0)[0] + 2)


def false_positive_count(proj: BlockProjection, truth) -> int:
    """Number of indices declared non-fused whose true difference is zero."""
    truth = _as_vector(truth, "truth")
    if truth.size != proj.n:
        raise ValueError(f"truth has length {truth.size}, expected {proj.n}")
    declared_nonfused = set(range(2, proj.n + 1)) - proj.fused_set
    return len(declared_nonfused - _true_jump_set(truth))


def false_positive_draws(
    samples: PosteriorSamples,
    truth,
    s0: int,
    *,
    epsilon_scale: float = 1.0,
    sigma: float | None = None,
) -> np.ndarray:
    """Per-draw false-positive counts over a sample set.

    By default each draw is projected with its own noise draw
    ``sqrt(sigma_draws[t])``; passing ``sigma`` instead projects every draw
    with that fixed value (e.g. the posterior-mean noise level).
    """
    truth = _as_vector(truth, "truth")
    counts = np.empty(samples.n_draws, dtype=int)
    for t in range(samples.n_draws):
        sig = math.sqrt(samples.sigma_draws[t]) if sigma is None else sigma
        proj = project_blocks(
            samples.draws[t], sig, s0, epsilon_scale=epsilon_scale
        )
        counts[t] = false_positive_count(proj, truth)
    return counts


@dataclass(frozen=True)
class PairwiseBlocks:
    """Symmetric fused/non-fused relation over all component pairs."""

    indicator: np.ndarray

    def __post_init__(self) -> None:
        ind = np.asarray(self.indicator, dtype=bool)
        if ind.ndim != 2 or ind.shape[0] != ind.shape[1]:
            raise ValueError(f"indicator must be square, got shape {ind.shape}")
        if not np.array_equal(ind, ind.T):
            raise ValueError("indicator must be symmetric")
        if not np.all(np.diagonal(ind)):
            raise ValueError("indicator diagonal must be true")
        object.__setattr__(self, "indicator", ind)

    @property
    def n(self) -> int:
        return self.indicator.shape[0]

    def fused_pair_count(self) -> int:
        """Number of fused unordered pairs, diagonal excluded."""
        return int((np.count_nonzero(self.indicator) - self.n) // 2)


def practical_threshold(theta_hat, y) -> PairwiseBlocks:
    """Pairwise fusion rule: components j1, j2 are fused when the estimated gap
    is strictly below half the observed gap.  Pairs with identical estimates
    and identical observations count as fused (the relation is reflexive)."""
    theta_hat = _as_vector(theta_hat, "theta_hat")
    y = _as_vector(y, "y")
    if theta_hat.size != y.size:
        raise ValueError(f"length mismatch: {theta_hat.size} vs {y.size}")
    d_est = np.abs(theta_hat[:, None] - theta_hat[None, :])
    d_obs = np.abs(y[:, None] - y[None, :])
    fused = d_est < 0.5 * d_obs
    fused |= (d_obs == 0.0) & (d_est == 0.0)
    return PairwiseBlocks(indicator=fused)


def wb_metrics(theta_hat, truth) -> tuple[float, float]:
    """Within-block variation W (mean |gap| over truly-equal pairs) and
    between-block separation B (min |gap| over truly-distinct pairs).

    B is ``inf`` when the truth is globally constant; W is 0.0 when no two
    components share a true value.
    """
    theta_hat = _as_vector(theta_hat, "theta_hat")
    truth = _as_vector(truth, "truth")
    if theta_hat.size != truth.size:
        raise ValueError(f"length mismatch: {theta_hat.size} vs {truth.size}")
    n = truth.size
    same = truth[:, None] == truth[None, :]
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    gaps = np.abs(theta_hat[:, None] - theta_hat[None, :])
    within = gaps[same & upper]
    between = gaps[~same & upper]
    w = float(within.mean()) if within.size else 0.0
    b = float(between.min()) if between.size else math.inf
    return w, b
