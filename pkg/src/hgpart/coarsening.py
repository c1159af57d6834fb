"""Pair scoring, greedy matching and the multilevel coarsening loop."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .embedding.table import CoarseEmbedding, EmbeddingTable
from .hypergraph import Hypergraph, Matching, contract

UNORDERED = -math.inf


@dataclass
class CoarseningConfig:
    """Coarsening knobs. ``None`` values resolve from the hypergraph and ``k``.

    weight_tolerance
        Pairs are contracted only while ``w_u + w_v < weight_tolerance``.
        Defaults to ``max(4, ceil(total_weight / (8 k)))``.
    mode
        ``"logn"`` contracts a full matching per level, ``"nlevel"`` one pair.
    stop_node_count
        Stop once a level has at most this many nodes; default ``max(60, 15 k)``.
    max_levels
        Level cap; defaults to 100 in ``logn`` mode and unlimited in ``nlevel``.
    scorer
        ``"embedding"`` or ``"heavy-edge"``.
    seed
        Visit-order seed for the heavy-edge scorer (the embedding scorer is
        deterministic).
    """

    weight_tolerance: int | None = None
    mode: str = "logn"
    stop_node_count: int | None = None
    max_levels: int | None = None
    scorer: str = "embedding"
    seed: int | None = None
    min_reduction: float = 0.05

    def resolved(self, total_weight: int, k: int) -> "CoarseningConfig":
        if self.mode not in ("logn", "nlevel"):
            raise ValueError(f"mode must be 'logn' or 'nlevel', got {self.mode!r}")
        if self.scorer not in ("embedding", "heavy-edge"):
            raise ValueError(f"scorer must be 'embedding' or 'heavy-edge', got {self.scorer!r}")
        wt = self.weight_tolerance
        if wt is None:
            wt = max(4, math.ceil(total_weight / (8 * k)))
        stop = self.stop_node_count if self.stop_node_count is not None else max(60, 15 * k)
        levels = self.max_levels
        if levels is None:
            levels = 100 if self.mode == "logn" else 2**62
        return CoarseningConfig(wt, self.mode, stop, levels, self.scorer, self.seed, self.min_reduction)


def heavy_edge_score(h: Hypergraph, u: int, v: int) -> float:
    """Sum of ``w_e / (|e| - 1)`` over edges containing both ``u`` and ``v``."""
    if u == v:
        raise ValueError("heavy-edge score needs two distinct nodes")
    shared = set(h.edges_of_node[u]).intersection(h.edges_of_node[v])
    return sum(h.edge_weight[e] / (len(h.pins_of_edge[e]) - 1) for e in sorted(shared))


def _neighbor_vectors(h: Hypergraph, eps, u: int):
    vec = eps.vectors if isinstance(eps, EmbeddingTable) else np.asarray(eps)
    nbrs = sorted(h.neighbors(u))
    return vec, nbrs


def visit_order_score(h: Hypergraph, eps, u: int) -> float:
    """Best weight-normalized dot product of ``u`` with any neighbour.

    Nodes without neighbours get ``UNORDERED`` (``-inf``) so they sort last.
    """
    vec, nbrs = _neighbor_vectors(h, eps, u)
    if not nbrs:
        return UNORDERED
    wu = h.node_weight[u]
    return max(float(vec[u] @ vec[v]) / (wu * h.node_weight[v]) for v in nbrs)


def embedding_score(h: Hypergraph, eps, u: int, v: int) -> float:
    vec = eps.vectors if isinstance(eps, EmbeddingTable) else np.asarray(eps)
    dot = float(vec[u] @ vec[v]) / (h.node_weight[u] * h.node_weight[v])
    return dot * heavy_edge_score(h, u, v)


def heavy_edge_matrix(h: Hypergraph) -> sparse.csr_matrix:
    """Symmetric node-by-node matrix of heavy-edge scores, zero diagonal.

    Stored entries are exactly the pairs sharing at least one edge.
    """
    n = h.num_nodes
    if h.num_edges == 0:
        return sparse.csr_matrix((n, n))
    inc = h.incidence_matrix()
    sizes = np.array([len(p) for p in h.pins_of_edge], dtype=np.float64)
    scale = np.asarray(h.edge_weight, dtype=np.float64) / (sizes - 1.0)
    he = (inc @ sparse.diags(scale) @ inc.T).tocoo()
    off = he.row != he.col
    out = sparse.csr_matrix((he.data[off], (he.row[off], he.col[off])), shape=(n, n))
    out.sort_indices()
    return out


@dataclass
class _LevelScores:
    order: np.ndarray
    indptr: list[int]
    indices: list[int]
    score: list[float]


def _level_scores(h: Hypergraph, vectors: np.ndarray | None, scorer: str, rng: np.random.Generator | None) -> _LevelScores:
    he = heavy_edge_matrix(h)
    n = h.num_nodes
    ids = np.arange(n)
    if scorer == "heavy-edge":
        order = (rng or np.random.default_rng()).permutation(n)
        score = he.data
    else:
        weights = np.asarray(h.node_weight, dtype=np.float64)
        rows = np.repeat(ids, np.diff(he.indptr))
        cols = he.indices
        dots = np.einsum("ij,ij->i", vectors[rows], vectors[cols]) / (weights[rows] * weights[cols])
        score = dots * he.data
        s_o = np.full(n, UNORDERED)
        if len(rows):
            np.maximum.at(s_o, rows, dots)
        order = np.lexsort((ids, -s_o))
    return _LevelScores(order, he.indptr.tolist(), he.indices.tolist(), np.asarray(score).tolist())


def _best_partner(u: int, sc: _LevelScores, partner: list[int], weight, tolerance: int) -> int:
    best, best_score = -1, -math.inf
    wu = weight[u]
    for pos in range(sc.indptr[u], sc.indptr[u + 1]):
        v = sc.indices[pos]
        if partner[v] != -1 or wu + weight[v] >= tolerance:
            continue
        t = sc.score[pos]
        if t > best_score:
            best, best_score = v, t
    return best


def match_level(
    h: Hypergraph,
    eps,
    cfg: CoarseningConfig,
    rng: np.random.Generator | None = None,
    single_pair: bool = False,
) -> Matching:
    """Greedy matching: visit nodes by decreasing visit-order score and pair each
    unmatched node with its best-scoring unmatched neighbour under the weight
    tolerance. Ties break by ascending node id.

    ``cfg`` must carry a concrete ``weight_tolerance``. With the heavy-edge
    scorer ``eps`` is ignored and the visit order is a random permutation.
    """
    if cfg.weight_tolerance is None:
        raise ValueError("match_level needs a resolved weight_tolerance")
    vectors = None
    if cfg.scorer == "embedding":
        if eps is None:
            raise ValueError("embedding scorer requires an embedding")
        vectors = eps.vectors if isinstance(eps, EmbeddingTable) else np.asarray(eps, dtype=np.float64)
    sc = _level_scores(h, vectors, cfg.scorer, rng)
    m = Matching(h.num_nodes)
    weight = h.node_weight
    for u in sc.order.tolist():
        if m.partner[u] != -1:
            continue
        v = _best_partner(u, sc, m.partner, weight, cfg.weight_tolerance)
        if v != -1:
            m.partner[u] = v
            m.partner[v] = u
            if single_pair:
                break
    return m


@dataclass
class LevelHierarchy:
    """Hypergraphs from finest (index 0, the input) to coarsest.

    ``maps[i]`` sends nodes of ``hypergraphs[i]`` to nodes of
    ``hypergraphs[i + 1]``; ``embeddings[i]`` is the interpolated table of
    ``hypergraphs[i]`` (or ``None`` without embeddings).
    """

    hypergraphs: list[Hypergraph]
    maps: list[list[int]] = field(default_factory=list)
    embeddings: list[EmbeddingTable | None] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.maps)

    @property
    def coarsest(self) -> Hypergraph:
        return self.hypergraphs[-1]

    @property
    def levels(self) -> list[tuple[Hypergraph, list[int], EmbeddingTable | None]]:
        return [
            (self.hypergraphs[i + 1], self.maps[i], self.embeddings[i + 1])
            for i in range(self.depth)
        ]

    def cumulative_map(self, level: int | None = None) -> list[int]:
        """Map from original nodes to nodes of ``hypergraphs[level]`` (default: coarsest)."""
        level = self.depth if level is None else level
        cmap = list(range(self.hypergraphs[0].num_nodes))
        for m in self.maps[:level]:
            cmap = [m[c] for c in cmap]
        return cmap


def coarsen(h: Hypergraph, eps: EmbeddingTable | None, cfg: CoarseningConfig, k: int = 2) -> LevelHierarchy:
    """Match and contract until the hypergraph is small enough or stops shrinking."""
    if h.num_nodes == 0:
        raise ValueError("cannot coarsen an empty hypergraph")
    cfg = cfg.resolved(h.total_node_weight, k)
    if cfg.scorer == "embedding" and eps is None:
        raise ValueError("embedding scorer requires an embedding")
    rng = np.random.default_rng(cfg.seed)
    tracked = CoarseEmbedding.from_table(eps) if (eps is not None and cfg.scorer == "embedding") else None
    hier = LevelHierarchy([h], [], [eps if tracked is not None else None])
    current = h
    single = cfg.mode == "nlevel"
    while current.num_nodes > cfg.stop_node_count and hier.depth < cfg.max_levels:
        vectors = tracked.vectors if tracked is not None else None
        m = match_level(current, vectors, cfg, rng, single_pair=single)
        if len(m) == 0:
            break
        coarse, cmap = contract(current, m)
        if tracked is not None:
            tracked = tracked.contract(cmap, coarse.num_nodes)
        hier.hypergraphs.append(coarse)
        hier.maps.append(cmap)
        hier.embeddings.append(tracked.table() if tracked is not None else None)
        shrink = 1.0 - coarse.num_nodes / current.num_nodes
        current = coarse
        if not single and shrink < cfg.min_reduction:
            break
    return hier
