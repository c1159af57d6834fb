"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numbers

import numpy as np
from scipy import sparse

from .embedding.table import EmbeddingTable
from .hypergraph import Hypergraph


def check_hypergraph(X) -> Hypergraph:
    """Coerce ``X`` to a :class:`Hypergraph`.

    Accepts a Hypergraph, a sparse or dense node-by-edge incidence matrix,
    or a list of edges (node ids inferred from the largest pin).
    """
    if isinstance(X, Hypergraph):
        return X
    if sparse.issparse(X) or isinstance(X, np.ndarray):
        mat = sparse.csc_matrix(X)
        edges = [mat.indices[mat.indptr[j] : mat.indptr[j + 1]].tolist() for j in range(mat.shape[1])]
        return Hypergraph(mat.shape[0], edges)
    if isinstance(X, (list, tuple)):
        edges = [list(e) for e in X]
        n = 1 + max((max(e) for e in edges if e), default=-1)
        return Hypergraph(n, edges)
    raise TypeError(f"expected a Hypergraph, incidence matrix or edge list, got {type(X).__name__}")


def check_embedding(eps, h: Hypergraph) -> EmbeddingTable:
    if not isinstance(eps, EmbeddingTable):
        eps = EmbeddingTable(eps)
    if eps.num_nodes != h.num_nodes:
        raise ValueError(f"embedding covers {eps.num_nodes} nodes, hypergraph has {h.num_nodes}")
    return eps


def check_k(k, h: Hypergraph | None = None) -> int:
    if not isinstance(k, numbers.Integral) or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k!r}")
    if h is not None and k > h.num_nodes:
        raise ValueError(f"k={k} exceeds the number of nodes ({h.num_nodes})")
    return int(k)


def check_alpha(alpha) -> float:
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha < 0:
        raise ValueError(f"imbalance tolerance must be a finite value >= 0, got {alpha}")
    return alpha


def check_objective(objective: str) -> str:
    if objective == "connectivity":
        return "km1"
    if objective not in ("cut", "km1"):
        raise ValueError(f"objective must be 'cut' or 'km1', got {objective!r}")
    return objective
