from .algebraic import AlgebraicCoordinates, algebraic_distance, relax
from .estimators import EMBEDDERS, AlgebraicDistance, FOBEEmbedding, HOBEEmbedding
from .table import CoarseEmbedding, EmbeddingTable, interpolate_coarse
from .trainers import (
    NegativeSampler,
    SampleSet,
    fobe_loss,
    fobe_samples,
    fobe_train,
    hobe_loss,
    hobe_scores,
    hobe_train,
    pair_loss_and_grad,
)

__all__ = [
    "AlgebraicCoordinates",
    "AlgebraicDistance",
    "CoarseEmbedding",
    "EMBEDDERS",
    "EmbeddingTable",
    "FOBEEmbedding",
    "HOBEEmbedding",
    "NegativeSampler",
    "SampleSet",
    "algebraic_distance",
    "fobe_loss",
    "fobe_samples",
    "fobe_train",
    "hobe_loss",
    "hobe_scores",
    "hobe_train",
    "interpolate_coarse",
    "pair_loss_and_grad",
    "relax",
]
