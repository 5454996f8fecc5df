"""Signal de-noising over arbitrary undirected graphs.

An input graph is reduced to its depth-first-search spanning tree (a canonical
one: neighbours are visited in ascending vertex order), the fusion prior is
placed on the differences across tree edges, and posterior draws from several
root choices are pooled into one estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chain import (
    IterationError,
    ConditionalNormalParams,
    _clip_scalar,
    _clip_vector,
    _gamma,
    chain_rng,
)
from .model import GibbsState, McmcConfig, PosteriorSamples, PriorConfig, _as_vector

__all__ = [
    "GraphConnectivityError",
    "UGraph",
    "DfsChain",
    "GraphPosterior",
    "read_edge_list",
    "write_edge_list",
    "dfs_chain",
    "tv_l0",
    "tv_l1",
    "graph_theta_conditional",
    "choose_roots",
    "run_dfs_chain_sampler",
    "run_graph_fusion",
]


class GraphConnectivityError(ValueError):
    """Raised when a traversal cannot reach every vertex."""


def _normalize_edge(i: int, j: int, n: int) -> tuple[int, int]:
    if i == j:
        raise ValueError(f"self-loop at vertex {i} is not allowed")
    for v in (i, j):
        if not 1 <= v <= n:
            raise ValueError(f"vertex id {v} outside [1, {n}]")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class UGraph:
    """Undirected graph on vertices 1..n_vertices with unordered edges."""

    n_vertices: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        normalized = frozenset(
            _normalize_edge(i, j, self.n_vertices) for i, j in self.edges
        )
        object.__setattr__(self, "edges", normalized)

    @classmethod
    def from_edges(cls, n_vertices: int, edges) -> "UGraph":
        return cls(n_vertices=n_vertices, edges=frozenset(tuple(e) for e in edges))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors_map(self) -> dict[int, list[int]]:
        """Adjacency lists with neighbours sorted ascending."""
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.n_vertices + 1)}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        for v in adj:
            adj[v].sort()
        return adj


def read_edge_list(path) -> UGraph:
    """Parse an edge-list file: one ``i j`` pair per line, 1-based ids,
    whitespace separated, ``#`` starts a comment line."""
    pairs: list[tuple[int, int]] = []
    max_vertex = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 'i j', got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ValueError(
                    f"{path}: line {lineno}: non-integer vertex id in {line!r}"
                ) from exc
            if i < 1 or j < 1:
                raise ValueError(f"{path}: line {lineno}: vertex ids are 1-based")
            pairs.append((i, j))
            max_vertex = max(max_vertex, i, j)
    if not pairs:
        raise ValueError(f"{path}: no edges found")
    return UGraph.from_edges(max_vertex, pairs)


def write_edge_list(g: UGraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, j in sorted(g.edges):
            fh.write(f"{i} {j}\n")


@dataclass(frozen=True)
class DfsChain:
    """DFS spanning tree of a connected graph, in discovery order.

    ``chain_edges[k]`` is the (parent, child) pair discovered k-th;
    ``edge_index`` maps each directed pair to its storage slot k.
    """

    root: int
    n_vertices: int
    chain_edges: tuple[tuple[int, int], ...]
    edge_index: dict[tuple[int, int], int] = field(repr=False)

    def __post_init__(self) -> None:
        if len(self.chain_edges) != self.n_vertices - 1:
            raise ValueError(
                f"expected {self.n_vertices - 1} tree edges, got {len(self.chain_edges)}"
            )
        # per-vertex incident edges (0-based vertex -> [(0-based neighbour, k)])
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_vertices)]
        for k, (p, c) in enumerate(self.chain_edges):
            adj[p - 1].append((c - 1, k))
            adj[c - 1].append((p - 1, k))
        object.__setattr__(self, "_adjacency", tuple(tuple(a) for a in adj))

    @property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        return self._adjacency  # type: ignore[attr-defined]


def dfs_chain(g: UGraph, root: int) -> DfsChain:
    """Depth-first-search spanning tree from ``root``.

    Neighbours are expanded in ascending vertex-id order, so the reduction is
    canonical for a given root.  Raises :class:`GraphConnectivityError` naming
    an unreachable vertex when the graph is disconnected.
    """
    if not 1 <= root <= g.n_vertices:
        raise ValueError(f"root {root} outside [1, {g.n_vertices}]")
    adj = g.neighbors_map()
    visited = {root}
    edges: list[tuple[int, int]] = []
    stack: list[tuple[int, int]] = [(root, 0)]
    while stack:
        v, cursor = stack[-1]
        neighbours = adj[v]
        advanced = False
        while cursor < len(neighbours):
            w = neighbours[cursor]
            cursor += 1
            if w not in visited:
                visited.add(w)
                edges.append((v, w))
                stack[-1] = (v, cursor)
                stack.append((w, 0))
                advanced = True
                break
        if not advanced:
            stack.pop()
    if len(visited) < g.n_vertices:
        missing = min(set(range(1, g.n_vertices + 1)) - visited)
        raise GraphConnectivityError(
            f"vertex {missing} is unreachable from root {root}"
        )
    edge_index = {pair: k for k, pair in enumerate(edges)}
    return DfsChain(
        root=root,
        n_vertices=g.n_vertices,
        chain_edges=tuple(edges),
        edge_index=edge_index,
    )


def _edge_arrays(edges) -> tuple[np.ndarray, np.ndarray]:
    pairs = list(edges)
    if not pairs:
        return np.empty(0, dtype=int), np.empty(0, dtype=int)
    arr = np.asarray(pairs, dtype=int)
    return arr[:, 0] - 1, arr[:, 1] - 1


def tv_l1(theta, edges) -> float:
    """Total variation sum(|theta_i - theta_j|) over the given edge pairs."""
    theta = np.asarray(theta, dtype=float)
    a, b = _edge_arrays(edges)
    return float(np.sum(np.abs(theta[a] - theta[b])))


def tv_l0(theta, edges, tol: float = 0.0) -> int:
    """Number of edges whose endpoint values differ by more than ``tol``.

    The default ``tol=0`` is the exact count, intended for planted discrete
    signals; pass a tolerance for estimated (continuous) signals.
    """
    if tol < 0.0:
        raise ValueError(f"tol must be >= 0, got {tol}")
    theta = np.asarray(theta, dtype=float)
    a, b = _edge_arrays(edges)
    return int(np.count_nonzero(np.abs(theta[a] - theta[b]) > tol))


def graph_theta_conditional(
    i: int,
    state: GibbsState,
    y: np.ndarray,
    prior: PriorConfig,
    chain: DfsChain,
) -> ConditionalNormalParams:
    """Full conditional of theta_i (1-based vertex id) on the DFS tree: the
    precision and mean collect every incident tree edge, plus the anchor prior
    N(0, lambda_first^2 sigma^2) at the root."""
    n = chain.n_vertices
    if not 1 <= i <= n:
        raise IndexError(f"vertex id must lie in [1, {n}], got {i}")
    tau_sq = state.tau_sq
    lam = state.lambda_sq
    p = 1.0
    m = float(y[i - 1])
    for j0, k in chain.adjacency[i - 1]:
        pk = 1.0 / (lam[k] * tau_sq)
        p += pk
        m += float(state.theta[j0]) * pk
    if i == chain.root:
        p += 1.0 / prior.lambda_first**2
    return ConditionalNormalParams(mu=m / p, zeta=state.sigma_sq / p)


def _graph_initial_state(y: np.ndarray, prior: PriorConfig, chain: DfsChain) -> GibbsState:
    a, b = _edge_arrays(chain.chain_edges)
    d = y[a] - y[b]
    sigma_sq = float(np.var(d, ddof=1)) if d.size >= 2 else 1.0
    if not (math.isfinite(sigma_sq) and sigma_sq > 0.0):
        sigma_sq = 1.0
    tau_sq = 1.0
    if prior.family == "horseshoe" and prior.tau_fixed is not None:
        tau_sq = prior.tau_fixed**2
    n = chain.n_vertices
    return GibbsState(
        theta=y.copy(),
        lambda_sq=np.ones(n - 1),
        tau_sq=tau_sq,
        sigma_sq=sigma_sq,
        nu=np.ones(n - 1),
        xi=1.0,
    )


def run_dfs_chain_sampler(
    y: np.ndarray,
    chain: DfsChain,
    prior: PriorConfig,
    mcmc: McmcConfig,
    rng: np.random.Generator,
) -> PosteriorSamples:
    """Gibbs sampler on one DFS spanning tree.

    The update cycle and draw order mirror the 1-D sampler exactly, so on a
    path graph rooted at an endpoint the two produce identical streams.
    """
    y = _as_vector(y, "y")
    n = chain.n_vertices
    if y.size != n:
        raise ValueError(f"signal length {y.size} != number of vertices {n}")
    state = _graph_initial_state(y, prior, chain)
    parents, children = _edge_arrays(chain.chain_edges)
    adjacency = chain.adjacency
    root0 = chain.root - 1
    anchor = 1.0 / prior.lambda_first**2
    sample_tau = prior.family == "horseshoe" and prior.tau_fixed is None
    family_scale = prior.resolved_family_scale(n)
    y_list = y.tolist()
    sqrt = math.sqrt
    kept_theta: list[np.ndarray] = []
    kept_sigma: list[float] = []
    kept_tau: list[float] = []
    for t in range(mcmc.n_iter):
        # normal means, vertex-id order
        z = rng.standard_normal(n).tolist()
        th = state.theta.tolist()
        prec = (1.0 / (state.lambda_sq * state.tau_sq)).tolist()
        sig = state.sigma_sq
        for v in range(n):
            p = 1.0
            m = y_list[v]
            for j0, k in adjacency[v]:
                pk = prec[k]
                p += pk
                m += th[j0] * pk
            if v == root0:
                p += anchor
            th[v] = m / p + sqrt(sig / p) * z[v]
        state.theta = np.asarray(th)
        eta = state.theta[parents] - state.theta[children]
        # local scales across tree edges
        if prior.family == "horseshoe":
            b_lam = 1.0 / state.nu + eta**2 / (2.0 * state.tau_sq * state.sigma_sq)
            state.lambda_sq = _clip_vector(b_lam / _gamma(rng, 1.0, b_lam.size))
            b_nu = 1.0 + 1.0 / state.lambda_sq
            state.nu = _clip_vector(b_nu / _gamma(rng, 1.0, b_nu.size))
        elif prior.family == "t_shrinkage":
            b = 0.5 * prior.t_df * family_scale**2 + eta**2 / (
                2.0 * state.tau_sq * state.sigma_sq
            )
            state.lambda_sq = _clip_vector(b / _gamma(rng, 0.5 * (prior.t_df + 1.0), b.size))
        else:
            abs_eta = np.abs(eta)
            root_scale = sqrt(state.tau_sq * state.sigma_sq)
            lam = np.empty_like(eta)
            nz = abs_eta > 0.0
            if np.any(nz):
                mean_u = np.minimum(root_scale / (family_scale * abs_eta[nz]), 1e12)
                u = rng.wald(mean_u, 1.0 / family_scale**2)
                lam[nz] = 1.0 / np.maximum(u, np.finfo(float).tiny)
            n_zero = int(np.count_nonzero(~nz))
            if n_zero:
                lam[~nz] = _gamma(rng, 0.5, n_zero) * (2.0 * family_scale**2)
            state.lambda_sq = _clip_vector(lam)
        # global scale
        if sample_tau:
            s = float(np.sum(eta**2 / state.lambda_sq)) / (2.0 * state.sigma_sq)
            state.tau_sq = _clip_scalar((1.0 / state.xi + s) / float(_gamma(rng, 0.5 * n)))
            state.xi = _clip_scalar((1.0 + 1.0 / state.tau_sq) / float(_gamma(rng, 1.0)))
        # noise variance
        resid = float(np.sum((y - state.theta) ** 2))
        eta = state.theta[parents] - state.theta[children]
        fuse = float(np.sum(eta**2 / state.lambda_sq)) / state.tau_sq
        first = float(state.theta[root0]) ** 2 / prior.lambda_first**2
        scale = prior.b_sigma + 0.5 * (resid + fuse + first)
        state.sigma_sq = _clip_scalar(scale / float(_gamma(rng, n + prior.a_sigma)))
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
    meta = {
        "root": chain.root,
        "seed": mcmc.seed,
        "n_iter": mcmc.n_iter,
        "burn_in": mcmc.burn_in,
        "thin": mcmc.thin,
        "n": n,
        "family": prior.family,
        "lambda_first": prior.lambda_first,
        "family_scale": family_scale,
        "tau_fixed": prior.tau_fixed,
    }
    return PosteriorSamples(
        draws=np.asarray(kept_theta),
        sigma_draws=np.asarray(kept_sigma),
        tau_draws=np.asarray(kept_tau),
        meta=meta,
    )


def choose_roots(g: UGraph, count: int, seed: int) -> list[int]:
    """Seeded uniform draw of distinct root vertices."""
    if not 1 <= count <= g.n_vertices:
        raise ValueError(f"root count must lie in [1, {g.n_vertices}], got {count}")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=[seed, 0x726F6F74]))
    picks = rng.choice(g.n_vertices, size=count, replace=False)
    return [int(v) + 1 for v in picks]


@dataclass(frozen=True)
class GraphPosterior:
    """Per-root posterior samples plus their equally-weighted pooled merge."""

    per_root: tuple[PosteriorSamples, ...]
    pooled: PosteriorSamples
    chains: tuple[DfsChain, ...]

    @property
    def roots(self) -> tuple[int, ...]:
        return tuple(c.root for c in self.chains)


def run_graph_fusion(
    g: UGraph,
    y,
    roots,
    prior: PriorConfig,
    mcmc: McmcConfig,
) -> GraphPosterior:
    """Reduce, sample and pool: one DFS chain and one sampler run per root,
    post-burn-in draws concatenated with equal weight.

    Root k uses the stream ``(mcmc.seed, k)``, so single-root runs reproduce
    the 1-D sampler's stream exactly.
    """
    y = _as_vector(y, "y")
    roots = [int(r) for r in roots]
    if len(set(roots)) != len(roots):
        raise ValueError(f"roots must be distinct, got {roots}")
    if not roots:
        raise ValueError("at least one root is required")
    per_root = []
    chains = []
    for k, root in enumerate(roots):
        chain = dfs_chain(g, root)
        rng = chain_rng(mcmc.seed, stream=k)
        per_root.append(run_dfs_chain_sampler(y, chain, prior, mcmc, rng))
        chains.append(chain)
    pooled = PosteriorSamples(
        draws=np.vstack([s.draws for s in per_root]),
        sigma_draws=np.concatenate([s.sigma_draws for s in per_root]),
        tau_draws=np.concatenate([s.tau_draws for s in per_root]),
        meta={
            "roots": roots,
            "seed": mcmc.seed,
            "n_iter": mcmc.n_iter,
            "burn_in": mcmc.burn_in,
            "thin": mcmc.thin,
            "family": prior.family,
        },
    )
    return GraphPosterior(per_root=tuple(per_root), pooled=pooled, chains=tuple(chains))
