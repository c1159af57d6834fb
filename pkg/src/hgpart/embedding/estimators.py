"""Transformer-style wrappers that learn node embeddings from a hypergraph."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..hypergraph import star_expand
from ..validation import check_hypergraph
from .algebraic import algebraic_distance
from .table import EmbeddingTable
from .trainers import NegativeSampler, fobe_samples, fobe_train, hobe_scores, hobe_train


class _BipartiteEmbedding(TransformerMixin, BaseEstimator):
    """Shared fit/transform plumbing: train on the star expansion, keep node rows."""

    def _check_input(self, X):
        h = check_hypergraph(X)
        if h.num_nodes == 0:
            raise ValueError("cannot embed an empty hypergraph")
        return h

    def transform(self, X=None):
        check_is_fitted(self, "embedding_")
        if X is not None:
            h = check_hypergraph(X)
            if h.num_nodes != self.embedding_.num_nodes:
                raise ValueError(
                    f"fitted on {self.embedding_.num_nodes} nodes, got a hypergraph with {h.num_nodes}"
                )
        return np.array(self.embedding_.vectors)

    def _finish(self, h, full: EmbeddingTable):
        self.embedding_ = EmbeddingTable(full.vectors[: h.num_nodes])
        self.n_nodes_in_ = h.num_nodes
        return self


class FOBEEmbedding(_BipartiteEmbedding):
    """First-order bipartite embedding of a hypergraph's star expansion.

    Parameters
    ----------
    dims : int
        Embedding dimension.
    epochs : int
        Passes over the sampled pairs; negatives are redrawn every epoch.
    learning_rate : float
    negatives_per_positive : int
    batch_size : int
    random_state : int or None
    """

    def __init__(self, dims=100, epochs=10, learning_rate=0.025, negatives_per_positive=5, batch_size=64, random_state=None):
        self.dims = dims
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.negatives_per_positive = negatives_per_positive
        self.batch_size = batch_size
        self.random_state = random_state

    def fit(self, X, y=None):
        h = self._check_input(X)
        g = star_expand(h)
        sample_seed, train_seed = np.random.SeedSequence(self.random_state).spawn(2)
        samples = fobe_samples(g, self.negatives_per_positive, sample_seed)
        full = fobe_train(
            samples, self.dims, self.epochs, self.learning_rate, train_seed,
            num_vertices=g.num_vertices, negative_sampler=NegativeSampler(g), batch_size=self.batch_size,
        )
        return self._finish(h, full)


class HOBEEmbedding(_BipartiteEmbedding):
    """Higher-order bipartite embedding weighted by algebraic similarity.

    Parameters
    ----------
    dims : int
    epochs : int
    learning_rate : float
    negatives_per_positive : int
    n_restarts, n_iterations : int
        Algebraic-coordinate restarts and relaxation steps.
    batch_size : int
    random_state : int or None
    """

    def __init__(
        self,
        dims=100,
        epochs=10,
        learning_rate=0.025,
        negatives_per_positive=5,
        n_restarts=10,
        n_iterations=20,
        batch_size=64,
        random_state=None,
    ):
        self.dims = dims
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.negatives_per_positive = negatives_per_positive
        self.n_restarts = n_restarts
        self.n_iterations = n_iterations
        self.batch_size = batch_size
        self.random_state = random_state

    def fit(self, X, y=None):
        h = self._check_input(X)
        g = star_expand(h)
        coord_seed, sample_seed, train_seed = np.random.SeedSequence(self.random_state).spawn(3)
        self.coordinates_ = algebraic_distance(g, self.n_restarts, self.n_iterations, coord_seed)
        samples = hobe_scores(g, self.coordinates_.similarity, self.negatives_per_positive, sample_seed)
        full = hobe_train(
            samples, self.dims, self.epochs, self.learning_rate, train_seed,
            num_vertices=g.num_vertices, negative_sampler=NegativeSampler(g), batch_size=self.batch_size,
        )
        return self._finish(h, full)


class AlgebraicDistance(_BipartiteEmbedding):
    """Relaxed algebraic coordinates of each node; ``transform`` returns ``(n, restarts)``."""

    def __init__(self, n_restarts=10, n_iterations=20, random_state=None):
        self.n_restarts = n_restarts
        self.n_iterations = n_iterations
        self.random_state = random_state

    def fit(self, X, y=None):
        h = self._check_input(X)
        g = star_expand(h)
        self.coordinates_ = algebraic_distance(g, self.n_restarts, self.n_iterations, self.random_state)
        return self._finish(h, EmbeddingTable(self.coordinates_.coords.T))

    def similarity(self, u, v):
        check_is_fitted(self, "coordinates_")
        return self.coordinates_.similarity(u, v)


EMBEDDERS = {"fobe": FOBEEmbedding, "hobe": HOBEEmbedding, "algebraic": AlgebraicDistance}
