"""Pair sampling and SGD trainers for first- and higher-order bipartite embeddings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..hypergraph import BipartiteGraph
from .table import EmbeddingTable

SIGMA_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Observed vertex pairs with target scores in [0, 1]."""

    u: np.ndarray
    v: np.ndarray
    target: np.ndarray
    # marks sampled unrelated pairs; inferred from target == 0 when absent
    negative: np.ndarray | None = None

    def __post_init__(self):
        if not (len(self.u) == len(self.v) == len(self.target)):
            raise ValueError("u, v and target must have equal length")
        if len(self.u) and np.any(self.u == self.v):
            raise ValueError("self-pairs are not allowed")
        if len(self.target) and (self.target.min() < 0 or self.target.max() > 1):
            raise ValueError("targets must lie in [0, 1]")

    @classmethod
    def from_pairs(cls, pairs) -> "SampleSet":
        pairs = list(pairs)
        u = np.array([p[0] for p in pairs], dtype=np.int64)
        v = np.array([p[1] for p in pairs], dtype=np.int64)
        t = np.array([p[2] for p in pairs], dtype=np.float64)
        return cls(u, v, t)

    def __len__(self) -> int:
        return len(self.u)

    @property
    def pairs(self) -> list[tuple[int, int, float]]:
        return [(int(a), int(b), float(t)) for a, b, t in zip(self.u, self.v, self.target)]

    def lookup(self, u: int, v: int) -> float | None:
        """Target of the unordered pair ``{u, v}``, or None when absent."""
        hit = ((self.u == u) & (self.v == v)) | ((self.u == v) & (self.v == u))
        idx = np.flatnonzero(hit)
        return float(self.target[idx[0]]) if idx.size else None

    @property
    def negative_mask(self) -> np.ndarray:
        return self.target == 0 if self.negative is None else self.negative

    @property
    def positives(self) -> "SampleSet":
        keep = ~self.negative_mask
        return SampleSet(self.u[keep], self.v[keep], self.target[keep], np.zeros(int(keep.sum()), dtype=bool))

    def concat(self, other: "SampleSet") -> "SampleSet":
        return SampleSet(
            np.concatenate([self.u, other.u]),
            np.concatenate([self.v, other.v]),
            np.concatenate([self.target, other.target]),
            np.concatenate([self.negative_mask, other.negative_mask]),
        )


def _adjacency_sets(g: BipartiteGraph) -> list[frozenset[int]]:
    return [frozenset(a) for a in g.adjacency]


def coneighbor_pairs(g: BipartiteGraph, rng: np.random.Generator, pairs_per_vertex: int = 2) -> np.ndarray:
    """Unordered same-side pairs sharing a neighbour, shape ``(m, 2)``.

    Around each middle vertex of degree ``d`` all pairs are taken when there
    are at most ``pairs_per_vertex * d`` of them, otherwise that many are
    drawn at random.
    """
    found: set[tuple[int, int]] = set()
    for nbrs in g.adjacency:
        d = len(nbrs)
        if d < 2:
            continue
        budget = pairs_per_vertex * d
        if d * (d - 1) // 2 <= budget:
            for i in range(d):
                a = nbrs[i]
                for j in range(i + 1, d):
                    b = nbrs[j]
                    found.add((a, b) if a < b else (b, a))
        else:
            picks = rng.integers(0, d, size=(budget, 2))
            for i, j in picks:
                if i == j:
                    continue
                a, b = nbrs[i], nbrs[j]
                found.add((a, b) if a < b else (b, a))
    if not found:
        return np.zeros((0, 2), dtype=np.int64)
    return np.array(sorted(found), dtype=np.int64)


class NegativeSampler:
    """Uniform draws of vertex pairs that are neither adjacent nor co-neighbours."""

    def __init__(self, g: BipartiteGraph, max_tries_factor: int = 20):
        self.n = g.num_vertices
        self.adj = _adjacency_sets(g)
        self.max_tries_factor = max_tries_factor

    def related(self, u: int, v: int) -> bool:
        return v in self.adj[u] or not self.adj[u].isdisjoint(self.adj[v])

    def __call__(self, rng: np.random.Generator, count: int) -> SampleSet:
        us, vs = [], []
        if self.n >= 2 and count > 0:
            tries = 0
            limit = self.max_tries_factor * count
            while len(us) < count and tries < limit:
                batch = rng.integers(0, self.n, size=(max(count - len(us), 16), 2))
                tries += len(batch)
                for u, v in batch:
                    if u == v or self.related(u, v):
                        continue
                    us.append(u)
                    vs.append(v)
                    if len(us) == count:
                        break
        return SampleSet(
            np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64), np.zeros(len(us)), np.ones(len(us), dtype=bool)
        )


def _edge_array(g: BipartiteGraph) -> np.ndarray:
    edges = g.edges()
    if not edges:
        return np.zeros((0, 2), dtype=np.int64)
    return np.array(edges, dtype=np.int64)


def fobe_samples(g: BipartiteGraph, negatives_per_positive: int = 5, seed=None, pairs_per_vertex: int = 2) -> SampleSet:
    """Target 1 for edges and co-neighbour pairs, target 0 for sampled unrelated pairs."""
    rng = np.random.default_rng(seed)
    edges = _edge_array(g)
    co = coneighbor_pairs(g, rng, pairs_per_vertex)
    both = np.concatenate([edges, co])
    pos = SampleSet(both[:, 0], both[:, 1], np.ones(len(both)), np.zeros(len(both), dtype=bool))
    neg = NegativeSampler(g)(rng, negatives_per_positive * len(pos))
    return pos.concat(neg)


def hobe_scores(
    g: BipartiteGraph,
    s: Callable[[np.ndarray, np.ndarray], np.ndarray],
    negatives_per_positive: int = 5,
    seed=None,
    pairs_per_vertex: int = 2,
    max_fanout: int = 64,
) -> SampleSet:
    """Similarity-weighted targets.

    A co-neighbour pair scores the best ``min(s(u, x), s(v, x))`` over shared
    neighbours ``x``. An edge ``uv`` scores the best such value between one
    endpoint and the other endpoint's neighbours. Unrelated sampled pairs
    score 0. ``s`` is evaluated on index arrays.
    """
    rng = np.random.default_rng(seed)
    adj = _adjacency_sets(g)
    edges = _edge_array(g)

    sim_of: dict[tuple[int, int], float] = {}
    if len(edges):
        sims = np.clip(np.asarray(s(edges[:, 0], edges[:, 1]), dtype=np.float64), 0.0, 1.0)
        for (a, b), val in zip(edges.tolist(), sims.tolist()):
            sim_of[(a, b) if a < b else (b, a)] = val

    def sim(a: int, b: int) -> float:
        return sim_of[(a, b) if a < b else (b, a)]

    alpha_cache: dict[tuple[int, int], float] = {}

    def alpha(a: int, b: int) -> float:
        key = (a, b) if a < b else (b, a)
        hit = alpha_cache.get(key)
        if hit is None:
            shared = adj[a] & adj[b]
            hit = max((min(sim(a, x), sim(b, x)) for x in shared), default=0.0)
            alpha_cache[key] = hit
        return hit

    def fanout(vertex: int, exclude: int) -> list[int]:
        nbrs = [x for x in g.adjacency[vertex] if x != exclude]
        if len(nbrs) > max_fanout:
            idx = np.sort(rng.choice(len(nbrs), size=max_fanout, replace=False))
            nbrs = [nbrs[i] for i in idx]
        return nbrs

    co = coneighbor_pairs(g, rng, pairs_per_vertex)
    co_targets = np.array([alpha(a, b) for a, b in co.tolist()], dtype=np.float64)

    edge_targets = np.empty(len(edges))
    for i, (u, v) in enumerate(edges.tolist()):
        best = -1.0
        for x in fanout(v, u):
            best = max(best, alpha(u, x))
        for x in fanout(u, v):
            best = max(best, alpha(x, v))
        edge_targets[i] = best if best >= 0 else sim(u, v)

    pos = SampleSet(
        np.concatenate([edges[:, 0], co[:, 0]]),
        np.concatenate([edges[:, 1], co[:, 1]]),
        np.concatenate([edge_targets, co_targets]),
        np.zeros(len(edges) + len(co), dtype=bool),
    )
    neg = NegativeSampler(g)(rng, negatives_per_positive * len(pos))
    return pos.concat(neg)


# losses ---------------------------------------------------------------------


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=np.float64)))


def fobe_loss(dot, target):
    """``sigma * log(S / sigma)``; the ``log S`` term is dropped when ``S == 0``."""
    sig = np.clip(_sigmoid(dot), SIGMA_EPS, 1.0 - SIGMA_EPS)
    target = np.asarray(target, dtype=np.float64)
    log_s = np.log(np.where(target > 0, target, 1.0))
    return sig * (log_s - np.log(sig))


def fobe_dloss(dot, target):
    """Derivative of :func:`fobe_loss` with respect to the dot product."""
    raw = _sigmoid(dot)
    sig = np.clip(raw, SIGMA_EPS, 1.0 - SIGMA_EPS)
    target = np.asarray(target, dtype=np.float64)
    log_s = np.log(np.where(target > 0, target, 1.0))
    return (log_s - np.log(sig) - 1.0) * raw * (1.0 - raw)


def hobe_loss(dot, target):
    return (np.asarray(target) - np.maximum(0.0, dot)) ** 2


def hobe_dloss(dot, target):
    dot = np.asarray(dot, dtype=np.float64)
    return np.where(dot > 0, -2.0 * (np.asarray(target) - dot), 0.0)


LOSSES = {"fobe": (fobe_loss, fobe_dloss), "hobe": (hobe_loss, hobe_dloss)}


def pair_loss_and_grad(kind: str, eu: np.ndarray, ev: np.ndarray, target: float):
    """Loss of one observed pair and its gradients w.r.t. both embeddings."""
    loss, dloss = LOSSES[kind]
    dot = float(np.dot(eu, ev))
    g = float(dloss(dot, target))
    return float(loss(dot, target)), g * ev, g * eu


# training -------------------------------------------------------------------


def _train(
    kind: str,
    samples: SampleSet,
    dims: int,
    epochs: int,
    learning_rate: float,
    seed,
    num_vertices: int | None,
    negative_sampler: NegativeSampler | None,
    batch_size: int,
) -> EmbeddingTable:
    if len(samples) == 0:
        raise ValueError("cannot train on an empty sample set")
    if dims < 1:
        raise ValueError("dims must be >= 1")
    _, dloss = LOSSES[kind]
    n = num_vertices if num_vertices is not None else int(max(samples.u.max(), samples.v.max())) + 1
    rng = np.random.default_rng(seed)
    emb = rng.uniform(-0.5 / dims, 0.5 / dims, size=(n, dims))

    positives = samples.positives
    n_neg = len(samples) - len(positives)
    current = samples
    for epoch in range(epochs):
        if epoch > 0 and negative_sampler is not None and n_neg > 0:
            current = positives.concat(negative_sampler(rng, n_neg))
        order = rng.permutation(len(current))
        for start in range(0, len(order), batch_size):
            idx = order[start : start + batch_size]
            u, v, t = current.u[idx], current.v[idx], current.target[idx]
            eu, ev = emb[u], emb[v]
            g = dloss(np.einsum("ij,ij->i", eu, ev), t)[:, None]
            np.add.at(emb, u, -learning_rate * g * ev)
            np.add.at(emb, v, -learning_rate * g * eu)
        if not np.isfinite(emb).all():
            raise FloatingPointError(f"{kind} training diverged in epoch {epoch}; lower the learning rate")
    return EmbeddingTable(emb)


def fobe_train(
    samples: SampleSet,
    dims: int = 100,
    epochs: int = 10,
    learning_rate: float = 0.025,
    seed=None,
    num_vertices: int | None = None,
    negative_sampler: NegativeSampler | None = None,
    batch_size: int = 64,
) -> EmbeddingTable:
    return _train("fobe", samples, dims, epochs, learning_rate, seed, num_vertices, negative_sampler, batch_size)


def hobe_train(
    samples: SampleSet,
    dims: int = 100,
    epochs: int = 10,
    learning_rate: float = 0.025,
    seed=None,
    num_vertices: int | None = None,
    negative_sampler: NegativeSampler | None = None,
    batch_size: int = 64,
) -> EmbeddingTable:
    return _train("hobe", samples, dims, epochs, learning_rate, seed, num_vertices, negative_sampler, batch_size)
