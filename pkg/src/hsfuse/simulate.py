"""Synthetic signals, noise injection and the Monte-Carlo harness that
produces the summary tables, plus planted-community graph generation for the
graph de-noising experiments."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .chain import run_chain
from .graph import UGraph
from .model import (
    ChainData,
    FAMILY_ALIASES,
    McmcConfig,
    PosteriorSamples,
    PriorConfig,
    adj_mse,
    mse,
)
from .recovery import wb_metrics

__all__ = [
    "KINDS",
    "DEFAULT_LEVELS",
    "SignalSpec",
    "block_lengths",
    "make_signal",
    "add_noise",
    "ScenarioResult",
    "run_replication",
    "monte_carlo",
    "summary_rows",
    "make_community_graph",
    "community_sizes",
]

KINDS = ("even", "uneven", "very_uneven")

# Block levels cycle through these values; consecutive blocks always differ
# by at least one amplitude unit.
DEFAULT_LEVELS = (0.0, 1.0, 2.0, 3.0, 4.0)

_SHORT_LENGTH = {"uneven": 5, "very_uneven": 2}


@dataclass(frozen=True)
class SignalSpec:
    """Recipe for one piecewise-constant test signal."""

    kind: str
    n: int = 100
    levels: tuple[float, ...] | None = None
    seed: int = 0
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.n < 10:
            raise ValueError(f"n must be >= 10, got {self.n}")
        if self.amplitude <= 0.0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        if self.levels is not None and len(self.levels) < 2:
            raise ValueError("need at least two levels")

    @property
    def s0(self) -> int:
        """Number of true non-zero successive differences."""
        return len(block_lengths(self.kind, self.n)) - 1


def block_lengths(kind: str, n: int) -> list[int]:
    """Ten-block layouts: equal lengths for ``even``; long/short alternation
    (starting long) with short lengths 5 and 2 for the uneven variants."""
    if kind == "even":
        if n % 10 != 0:
            raise ValueError(f"even layout needs n divisible by 10, got {n}")
        return [n // 10] * 10
    short = _SHORT_LENGTH[kind]
    long_total = n - 5 * short
    if long_total % 5 != 0:
        raise ValueError(f"{kind} layout needs n = 5*long + 5*{short}, got {n}")
    long = long_total // 5
    if long <= short:
        raise ValueError(f"{kind} layout needs long blocks > {short}, got {long}")
    lengths: list[int] = []
    for _ in range(5):
        lengths.extend((long, short))
    return lengths


def make_signal(spec: SignalSpec) -> np.ndarray:
    """Piecewise-constant truth vector for the given spec."""
    lengths = block_lengths(spec.kind, spec.n)
    levels = spec.levels if spec.levels is not None else DEFAULT_LEVELS
    values = [
        spec.amplitude * levels[b % len(levels)] for b in range(len(lengths))
    ]
    for left, right in zip(values, values[1:]):
        if left == right:
            raise ValueError("adjacent blocks must have distinct levels")
    theta = np.repeat(values, lengths)
    assert theta.size == spec.n
    return theta.astype(float)


def add_noise(theta0, sigma: float, seed: int) -> np.ndarray:
    """Observation vector theta0 + iid N(0, sigma^2) noise."""
    theta0 = np.asarray(theta0, dtype=float)
    if sigma < 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    return theta0 + sigma * rng.standard_normal(theta0.size)


@dataclass(frozen=True)
class ScenarioResult:
    """Per-replication metrics for one (kind, sigma, family) cell."""

    kind: str
    sigma: float
    family: str
    mse_values: np.ndarray
    adj_mse_values: np.ndarray
    w_values: np.ndarray
    b_values: np.ndarray

    @property
    def reps(self) -> int:
        return self.mse_values.size

    def mean(self, metric: str) -> float:
        return float(getattr(self, f"{metric}_values").mean())

    def se(self, metric: str) -> float:
        values = getattr(self, f"{metric}_values")
        if values.size < 2:
            return math.nan
        return float(values.std(ddof=1) / math.sqrt(values.size))


def _replication_seed(master_seed: int, spec: SignalSpec, sigma: float,
                      family: str, rep: int) -> tuple[int, int]:
    """Independent (noise seed, chain seed) pair for one replication."""
    family_id = list(FAMILY_ALIASES.values()).index(FAMILY_ALIASES[family])
    base = np.random.SeedSequence(
        entropy=[master_seed, spec.seed, int(round(sigma * 1e9)), family_id, rep]
    )
    noise_ss, chain_ss = base.spawn(2)
    return (
        int(noise_ss.generate_state(1, np.uint64)[0]),
        int(chain_ss.generate_state(1, np.uint64)[0]),
    )


def run_replication(
    spec: SignalSpec,
    sigma: float,
    prior: PriorConfig,
    mcmc: McmcConfig,
    master_seed: int,
    rep: int,
) -> dict[str, float]:
    """One replication: simulate, sample, score.  The derived seeds depend
    only on the scenario identity and the replication index, never on
    execution order."""
    noise_seed, chain_seed = _replication_seed(
        master_seed, spec, sigma, prior.family, rep
    )
    truth = make_signal(spec)
    y = add_noise(truth, sigma, noise_seed)
    data = ChainData(y=y, truth=truth, sigma0=sigma if sigma > 0 else None)
    samples = run_chain(data, prior, dataclasses.replace(mcmc, seed=chain_seed))
    est = samples.mean()
    w, b = wb_metrics(est, truth)
    return {
        "mse": mse(est, truth),
        "adj_mse": adj_mse(est, truth),
        "w": w,
        "b": b,
    }


def monte_carlo(
    specs,
    sigmas,
    families,
    reps: int,
    mcmc: McmcConfig,
    master_seed: int = 0,
) -> list[ScenarioResult]:
    """Replicated simulation study over the cross product of scenarios.

    Returns one :class:`ScenarioResult` per (spec, sigma, family) cell with
    the per-replication metric arrays; reproducible given ``master_seed``.
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if isinstance(specs, SignalSpec):
        specs = [specs]
    results = []
    for spec in specs:
        for sigma in sigmas:
            if not sigma > 0.0:
                raise ValueError(f"sigma must be positive, got {sigma}")
            for family in families:
                canonical = FAMILY_ALIASES.get(family)
                if canonical is None:
                    raise ValueError(f"unknown family {family!r}")
                prior = PriorConfig(family=canonical)
                rows = [
                    run_replication(spec, sigma, prior, mcmc, master_seed, rep)
                    for rep in range(reps)
                ]
                results.append(
                    ScenarioResult(
                        kind=spec.kind,
                        sigma=float(sigma),
                        family=canonical,
                        mse_values=np.array([r["mse"] for r in rows]),
                        adj_mse_values=np.array([r["adj_mse"] for r in rows]),
                        w_values=np.array([r["w"] for r in rows]),
                        b_values=np.array([r["b"] for r in rows]),
                    )
                )
    return results


def summary_rows(results) -> list[dict[str, object]]:
    """Long-format summary: one row per (kind, sigma, family, metric)."""
    rows: list[dict[str, object]] = []
    for res in results:
        for metric in ("mse", "adj_mse", "w", "b"):
            rows.append(
                {
                    "kind": res.kind,
                    "sigma": res.sigma,
                    "family": res.family,
                    "metric": metric,
                    "mean": res.mean(metric),
                    "se": res.se(metric),
                }
            )
    return rows


def community_sizes(
    n_communities: int,
    n_total: int,
    min_size: int,
    max_size: int,
    seed: int,
) -> list[int]:
    """Seeded community sizes within [min_size, max_size] summing to n_total."""
    if n_communities * min_size > n_total or n_communities * max_size < n_total:
        raise ValueError("size bounds are infeasible for the requested total")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=[seed, 0x5A1E5]))
    sizes = rng.integers(min_size, max_size + 1, size=n_communities)
    # push the total onto n_total one unit at a time, respecting the bounds
    diff = n_total - int(sizes.sum())
    step = 1 if diff > 0 else -1
    while diff != 0:
        idx = int(rng.integers(n_communities))
        candidate = sizes[idx] + step
        if min_size <= candidate <= max_size:
            sizes[idx] = candidate
            diff -= step
    return [int(s) for s in sizes]


def make_community_graph(
    sizes,
    seed: int,
    extra_intra: float = 0.15,
    extra_inter: int = 0,
) -> tuple[UGraph, np.ndarray]:
    """Connected graph with planted communities and the vertex labels.

    Each community gets a random spanning tree plus ``extra_intra * size``
    additional internal edges; communities are linked by a random tree plus
    ``extra_inter`` additional cross edges.  Labels are 1-based community ids
    in vertex order (community k occupies a contiguous id range).
    """
    sizes = [int(s) for s in sizes]
    if any(s < 1 for s in sizes):
        raise ValueError("community sizes must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=[seed, 0x6C0FFEE]))
    n = sum(sizes)
    labels = np.empty(n, dtype=int)
    members: list[list[int]] = []
    edges: set[tuple[int, int]] = set()

    def add_edge(a: int, b: int) -> bool:
        if a == b:
            return False
        pair = (a, b) if a < b else (b, a)
        if pair in edges:
            return False
        edges.add(pair)
        return True

    start = 1
    for c, size in enumerate(sizes, start=1):
        vertices = list(range(start, start + size))
        labels[start - 1 : start - 1 + size] = c
        members.append(vertices)
        for pos in range(1, size):
            parent = vertices[int(rng.integers(pos))]
            add_edge(parent, vertices[pos])
        wanted = int(round(extra_intra * size))
        guard = 0
        while wanted > 0 and guard < 50 * size:
            a, b = rng.integers(size, size=2)
            if add_edge(vertices[int(a)], vertices[int(b)]):
                wanted -= 1
            guard += 1
        start += size
    for c in range(1, len(sizes)):
        other = int(rng.integers(c))
        a = members[c][int(rng.integers(len(members[c])))]
        b = members[other][int(rng.integers(len(members[other])))]
        add_edge(a, b)
    wanted = extra_inter
    guard = 0
    while wanted > 0 and guard < 100 * max(1, extra_inter):
        ca, cb = rng.integers(len(sizes), size=2)
        if ca != cb:
            a = members[int(ca)][int(rng.integers(len(members[int(ca)])))]
            b = members[int(cb)][int(rng.integers(len(members[int(cb)])))]
            if add_edge(a, b):
                wanted -= 1
        guard += 1
    return UGraph.from_edges(n, edges), labels.astype(float)
