"""Algebraic coordinates and the similarity they induce on a bipartite graph."""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy import sparse

from ..hypergraph import BipartiteGraph


def adjacency_matrix(g: BipartiteGraph) -> sparse.csr_matrix:
    rows = np.repeat(np.arange(g.num_vertices), [len(a) for a in g.adjacency])
    cols = np.fromiter((x for a in g.adjacency for x in a), dtype=np.int64, count=len(rows))
    data = np.ones(len(rows))
    return sparse.csr_matrix((data, (rows, cols)), shape=(g.num_vertices, g.num_vertices))


class AlgebraicCoordinates:
    """Per-restart relaxed coordinates, shape ``(restarts, num_vertices)``."""

    def __init__(self, coords: np.ndarray, iterations: int):
        self.coords = coords
        self.iterations = iterations

    @property
    def restarts(self) -> int:
        return self.coords.shape[0]

    def distance(self, u, v):
        diff = self.coords[:, u] - self.coords[:, v]
        return np.sqrt(np.sum(diff * diff, axis=0))

    def similarity(self, u, v):
        """``(sqrt(R) - d(u, v)) / sqrt(R)``; vectorized over index arrays."""
        root = np.sqrt(self.restarts)
        return (root - self.distance(u, v)) / root

    __call__ = similarity


def relax(
    g: BipartiteGraph,
    init: np.ndarray,
    iterations: int,
    callback: Callable[[int, np.ndarray], None] | None = None,
) -> np.ndarray:
    """Run the degree-weighted averaging update on ``init`` (restarts x vertices).

    Each step moves a coordinate halfway toward the inverse-degree-weighted
    mean of its neighbours. Isolated vertices keep their coordinate.
    """
    adj = adjacency_matrix(g)
    deg = np.asarray(adj.sum(axis=1)).ravel()
    inv_deg = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    denom = adj @ inv_deg
    isolated = denom == 0
    safe_denom = np.where(isolated, 1.0, denom)

    a = np.array(init, dtype=np.float64)
    if callback is not None:
        callback(0, a)
    for i in range(1, iterations + 1):
        avg = (adj @ (a * inv_deg).T).T / safe_denom
        nxt = 0.5 * (a + avg)
        nxt[:, isolated] = a[:, isolated]
        a = nxt
        if callback is not None:
            callback(i, a)
    return a


def algebraic_distance(
    g: BipartiteGraph,
    restarts: int = 10,
    iterations: int = 20,
    seed=None,
    callback: Callable[[int, np.ndarray], None] | None = None,
) -> AlgebraicCoordinates:
    """Random-restart algebraic coordinates for every vertex of ``g``.

    Coordinates start uniform in [0, 1]. The returned object maps a vertex
    pair to its similarity in [0, 1].
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    rng = np.random.default_rng(seed)
    init = rng.uniform(0.0, 1.0, size=(restarts, g.num_vertices))
    return AlgebraicCoordinates(relax(g, init, iterations, callback), iterations)
