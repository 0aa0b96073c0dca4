"""Graph generators, coupling sampling, and Gibbs / exact samplers."""

from dataclasses import dataclass

import numpy as np

from . import _backend
from .model import CouplingVector, coupling_matrix, exact_distribution, n_pairs, pair_index

GIBBS_CHUNK = 4096


@dataclass(frozen=True)
class GraphSpec:
    """Undirected graph on nodes ``0..K-1``; edges are sorted ``(j, k)``, ``j < k``."""

    K: int
    edges: tuple
    tag: str = "custom"

    def __post_init__(self):
        if self.K < 2:
            raise ValueError("need at least two nodes")
        norm = []
        for j, k in self.edges:
            j, k = int(j), int(k)
            if j == k:
                raise ValueError(f"self-loop at node {j}")
            if j > k:
                j, k = k, j
            if j < 0 or k >= self.K:
                raise ValueError(f"edge ({j}, {k}) out of range for K={self.K}")
            norm.append((j, k))
        if len(set(norm)) != len(norm):
            raise ValueError("duplicate edges")
        object.__setattr__(self, "edges", tuple(sorted(norm)))


def chain_graph(K, n_edges=None):
    """Path 0-1-2-...; ``n_edges`` limits it to the first ``n_edges`` links."""
    n_edges = K - 1 if n_edges is None else n_edges
    if not 0 <= n_edges <= K - 1:
        raise ValueError(f"a chain on {K} nodes has at most {K - 1} edges")
    return GraphSpec(K, tuple((i, i + 1) for i in range(n_edges)), "chain")


def lattice_graph(K, rows=None):
    """4-neighbour grid with ``rows * cols == K`` nodes in row-major order."""
    if rows is None:
        rows = max(r for r in range(1, int(np.sqrt(K)) + 1) if K % r == 0)
    if K % rows:
        raise ValueError(f"{rows} rows do not divide K={K}")
    cols = K // rows
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append((i, i + 1))
            if r + 1 < rows:
                edges.append((i, i + cols))
    return GraphSpec(K, tuple(edges), "lattice4")


def random_regular_graph(K, degree, seed=0):
    import networkx as nx

    g = nx.random_regular_graph(degree, K, seed=seed)
    return GraphSpec(K, tuple(g.edges()), f"random({degree})")


@dataclass(frozen=True)
class SimulationTruth:
    graph: GraphSpec
    beta_star: CouplingVector

    @property
    def s(self):
        return len(self.graph.edges)

    @property
    def support(self):
        return self.beta_star.values != 0


def gen_truth(spec, seed):
    """Couplings ``t * s`` on every edge with ``t ~ U[1, 2]`` and random sign."""
    rng = np.random.default_rng(seed)
    values = np.zeros(n_pairs(spec.K))
    n = len(spec.edges)
    mags = rng.uniform(1.0, 2.0, size=n)
    signs = rng.choice([-1.0, 1.0], size=n)
    for (j, k), m, s in zip(spec.edges, mags, signs):
        values[pair_index(j, k, spec.K)] = m * s
    return SimulationTruth(spec, CouplingVector(spec.K, values))


@dataclass
class GibbsConfig:
    burn_in: int = 1000
    thinning: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.burn_in < 0 or self.thinning < 1:
            raise ValueError("need burn_in >= 0 and thinning >= 1")


def _beta(truth):
    return getattr(truth, "beta_star", truth)


def gibbs_sample(truth, N, cfg=None, backend=None):
    """Single-site Gibbs sampling in node order, one chain.

    After ``burn_in`` sweeps, the state at every ``thinning``-th sweep is
    kept until ``N`` observations are collected.
    """
    cfg = cfg or GibbsConfig()
    if N < 1:
        raise ValueError("N must be at least 1")
    beta = _beta(truth)
    K = beta.K
    J = np.ascontiguousarray(coupling_matrix(beta.values, K))
    kernels = _backend.get_kernels(backend)
    rng = np.random.default_rng(cfg.seed)
    state = rng.choice([-1.0, 1.0], size=K)
    total = cfg.burn_in + N * cfg.thinning
    out = np.empty((N, K))
    kept = 0
    done = 0
    while done < total:
        S = min(GIBBS_CHUNK, total - done)
        states = kernels.gibbs_sweeps(J, state, rng.random((S, K)))
        sweep_no = done + 1 + np.arange(S)
        after = sweep_no - cfg.burn_in
        keep = (after > 0) & (after % cfg.thinning == 0)
        rows = states[keep]
        out[kept:kept + len(rows)] = rows
        kept += len(rows)
        done += S
    return out.astype(np.int8)


def exact_sample(truth, N, seed):
    """I.i.d. draws from the enumerated joint law (K <= 20)."""
    beta = _beta(truth)
    dist = exact_distribution(beta.values, beta.K)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(dist.probs), size=N, p=dist.probs)
    return dist.states[idx].astype(np.int8)
