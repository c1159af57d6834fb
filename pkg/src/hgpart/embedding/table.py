"""Dense per-node embedding table and coarse-node interpolation."""

from __future__ import annotations

from typing import Sequence

import numpy as np


class EmbeddingTable:
    """Read-only ``(num_nodes, dims)`` array of finite floats."""

    __slots__ = ("vectors",)

    def __init__(self, vectors):
        arr = np.array(vectors, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise ValueError(f"embedding must be a 2-d array with dims >= 1, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("embedding contains non-finite values")
        arr.setflags(write=False)
        self.vectors = arr

    @property
    def num_nodes(self) -> int:
        return self.vectors.shape[0]

    @property
    def dims(self) -> int:
        return self.vectors.shape[1]

    def __getitem__(self, v):
        return self.vectors[v]

    def __len__(self) -> int:
        return self.num_nodes

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingTable):
            return NotImplemented
        return self.vectors.shape == other.vectors.shape and bool(np.array_equal(self.vectors, other.vectors))

    def __repr__(self) -> str:
        return f"EmbeddingTable(num_nodes={self.num_nodes}, dims={self.dims})"

    def scaled(self, factor: float) -> "EmbeddingTable":
        return EmbeddingTable(self.vectors * factor)

    def take(self, nodes: Sequence[int]) -> "EmbeddingTable":
        """Rows for ``nodes`` in the given order (used when remapping ids)."""
        return EmbeddingTable(self.vectors[np.asarray(nodes, dtype=np.int64)])


def interpolate_coarse(eps: EmbeddingTable, cmap: Sequence[int], u: int) -> np.ndarray:
    """Mean of the original embeddings of every node that ``cmap`` sends to ``u``.

    ``cmap`` is the cumulative map from original nodes to the current level.
    """
    members = np.flatnonzero(np.asarray(cmap) == u)
    if members.size == 0:
        raise ValueError(f"coarse node {u} aggregates no original node")
    return eps.vectors[members].mean(axis=0)


class CoarseEmbedding:
    """Running sums and member counts per coarse node.

    ``vectors`` is always the flat mean over original members, never an
    average of intermediate averages.
    """

    def __init__(self, sums: np.ndarray, counts: np.ndarray):
        self.sums = sums
        self.counts = counts

    @classmethod
    def from_table(cls, eps: EmbeddingTable) -> "CoarseEmbedding":
        return cls(np.array(eps.vectors), np.ones(eps.num_nodes, dtype=np.int64))

    def contract(self, cmap: Sequence[int], num_coarse: int) -> "CoarseEmbedding":
        idx = np.asarray(cmap, dtype=np.int64)
        sums = np.zeros((num_coarse, self.sums.shape[1]))
        np.add.at(sums, idx, self.sums)
        counts = np.bincount(idx, weights=self.counts, minlength=num_coarse).astype(np.int64)
        return CoarseEmbedding(sums, counts)

    @property
    def vectors(self) -> np.ndarray:
        return self.sums / self.counts[:, None]

    def table(self) -> EmbeddingTable:
        return EmbeddingTable(self.vectors)
