"""Multilevel hypergraph partitioning with embedding-based coarsening."""

from .coarsening import CoarseningConfig, LevelHierarchy, coarsen, match_level
from .embedding import AlgebraicDistance, EmbeddingTable, FOBEEmbedding, HOBEEmbedding
from .hypergraph import (
    BipartiteGraph,
    Hypergraph,
    Matching,
    PartitionAssignment,
    check_balance,
    contract,
    star_expand,
    weighted_connectivity,
    weighted_cut,
)
from .initial import InitialConfig
from .partitioner import HypergraphPartitioner, PartitionReport, VCycleConfig, partition, recursive_bisect

__version__ = "0.1.0"

__all__ = [
    "AlgebraicDistance",
    "BipartiteGraph",
    "CoarseningConfig",
    "EmbeddingTable",
    "FOBEEmbedding",
    "HOBEEmbedding",
    "Hypergraph",
    "HypergraphPartitioner",
    "InitialConfig",
    "LevelHierarchy",
    "Matching",
    "PartitionAssignment",
    "PartitionReport",
    "VCycleConfig",
    "check_balance",
    "coarsen",
    "contract",
    "match_level",
    "partition",
    "recursive_bisect",
    "star_expand",
    "weighted_connectivity",
    "weighted_cut",
]
