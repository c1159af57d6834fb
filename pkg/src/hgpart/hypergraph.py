"""Hypergraph container, star expansion, contraction and partition objectives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class InvalidMatchingError(ValueError):
    """Raised when a matching cannot be applied to a hypergraph."""


class Hypergraph:
    """Immutable hypergraph with integer node and edge weights.

    Edges are normalized on construction: duplicate pins are removed, pins
    are sorted, and edges left with fewer than two pins are dropped.
    Parallel edges are kept as given.
    """

    __slots__ = ("num_nodes", "pins_of_edge", "edges_of_node", "node_weight", "edge_weight", "_arrays")

    def __init__(
        self,
        num_nodes: int,
        edges: Iterable[Iterable[int]],
        node_weight: Sequence[int] | None = None,
        edge_weight: Sequence[int] | None = None,
    ):
        num_nodes = int(num_nodes)
        if num_nodes < 0:
            raise ValueError("num_nodes must be non-negative")
        edges = [list(e) for e in edges]
        if edge_weight is None:
            edge_weight = [1] * len(edges)
        elif len(edge_weight) != len(edges):
            raise ValueError("edge_weight length does not match edge count")
        if node_weight is None:
            node_weight = [1] * num_nodes
        elif len(node_weight) != num_nodes:
            raise ValueError("node_weight length does not match num_nodes")

        pins_of_edge = []
        kept_weights = []
        for pins, w in zip(edges, edge_weight):
            w = int(w)
            if w < 1:
                raise ValueError(f"edge weight must be positive, got {w}")
            unique = sorted(set(int(p) for p in pins))
            if unique and (unique[0] < 0 or unique[-1] >= num_nodes):
                raise ValueError(f"pin out of range in edge {pins}")
            if len(unique) < 2:
                continue
            pins_of_edge.append(tuple(unique))
            kept_weights.append(w)

        node_weight = tuple(int(w) for w in node_weight)
        if any(w < 1 for w in node_weight):
            raise ValueError("node weights must be positive")

        incident: list[list[int]] = [[] for _ in range(num_nodes)]
        for e, pins in enumerate(pins_of_edge):
            for v in pins:
                incident[v].append(e)

        self.num_nodes = num_nodes
        self.pins_of_edge: tuple[tuple[int, ...], ...] = tuple(pins_of_edge)
        self.edges_of_node: tuple[tuple[int, ...], ...] = tuple(tuple(x) for x in incident)
        self.node_weight: tuple[int, ...] = node_weight
        self.edge_weight: tuple[int, ...] = tuple(kept_weights)
        self._arrays = None

    @property
    def num_edges(self) -> int:
        return len(self.pins_of_edge)

    @property
    def num_pins(self) -> int:
        return sum(len(p) for p in self.pins_of_edge)

    @property
    def total_node_weight(self) -> int:
        return sum(self.node_weight)

    def neighbors(self, v: int) -> set[int]:
        """Nodes sharing at least one edge with ``v`` (excluding ``v``)."""
        out = set()
        for e in self.edges_of_node[v]:
            out.update(self.pins_of_edge[e])
        out.discard(v)
        return out

    def arrays(self) -> tuple[np.ndarray, ...]:
        """CSR views ``(node_ptr, node_edges, edge_ptr, edge_pins, node_weight, edge_weight)``."""
        if self._arrays is None:
            edge_ptr = np.zeros(self.num_edges + 1, dtype=np.int64)
            edge_ptr[1:] = np.cumsum([len(p) for p in self.pins_of_edge])
            node_ptr = np.zeros(self.num_nodes + 1, dtype=np.int64)
            node_ptr[1:] = np.cumsum([len(x) for x in self.edges_of_node])
            edge_pins = np.fromiter((v for p in self.pins_of_edge for v in p), dtype=np.int64, count=int(edge_ptr[-1]))
            node_edges = np.fromiter((e for x in self.edges_of_node for e in x), dtype=np.int64, count=int(node_ptr[-1]))
            arrays = (
                node_ptr,
                node_edges,
                edge_ptr,
                edge_pins,
                np.asarray(self.node_weight, dtype=np.int64).reshape(-1),
                np.asarray(self.edge_weight, dtype=np.int64).reshape(-1),
            )
            for a in arrays:
                a.setflags(write=False)
            self._arrays = arrays
        return self._arrays

    def incidence_matrix(self):
        """Sparse node-by-edge 0/1 incidence matrix (CSR)."""
        from scipy import sparse

        rows = np.fromiter((v for pins in self.pins_of_edge for v in pins), dtype=np.int64, count=self.num_pins)
        cols = np.repeat(np.arange(self.num_edges), [len(p) for p in self.pins_of_edge])
        data = np.ones(len(rows), dtype=np.float64)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.num_nodes, self.num_edges))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.num_nodes == other.num_nodes
            and self.pins_of_edge == other.pins_of_edge
            and self.node_weight == other.node_weight
            and self.edge_weight == other.edge_weight
        )

    def __hash__(self) -> int:
        return hash((self.num_nodes, self.pins_of_edge, self.node_weight, self.edge_weight))

    def __repr__(self) -> str:
        return f"Hypergraph(num_nodes={self.num_nodes}, num_edges={self.num_edges}, num_pins={self.num_pins})"

    def subhypergraph(self, nodes: Sequence[int]) -> tuple["Hypergraph", list[int]]:
        """Induced sub-hypergraph on ``nodes``, remapped to ``0..len(nodes)-1``.

        Each edge keeps its restriction to ``nodes``; restrictions with fewer
        than two pins vanish. Returns the sub-hypergraph and the list mapping
        new ids back to ids in ``self``.
        """
        nodes = list(nodes)
        local = {v: i for i, v in enumerate(nodes)}
        edges = []
        weights = []
        for pins, w in zip(self.pins_of_edge, self.edge_weight):
            kept = [local[v] for v in pins if v in local]
            if len(kept) >= 2:
                edges.append(kept)
                weights.append(w)
        sub = Hypergraph(len(nodes), edges, [self.node_weight[v] for v in nodes], weights)
        return sub, nodes


@dataclass(frozen=True)
class BipartiteGraph:
    """Star expansion: vertices ``0..left_count-1`` are hypergraph nodes,
    ``left_count..left_count+right_count-1`` are hyperedges."""

    left_count: int
    right_count: int
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def num_vertices(self) -> int:
        return self.left_count + self.right_count

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def degree(self, x: int) -> int:
        return len(self.adjacency[x])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.left_count) for v in self.adjacency[u]]


def star_expand(h: Hypergraph) -> BipartiteGraph:
    offset = h.num_nodes
    left = tuple(tuple(offset + e for e in h.edges_of_node[v]) for v in range(h.num_nodes))
    right = tuple(tuple(pins) for pins in h.pins_of_edge)
    return BipartiteGraph(h.num_nodes, h.num_edges, left + right)


class Matching:
    """Symmetric pairing array; ``partner[u]`` is ``-1`` for unmatched nodes."""

    __slots__ = ("partner",)

    def __init__(self, num_nodes: int | None = None, partner: Sequence[int] | None = None):
        if partner is not None:
            self.partner = [int(p) for p in partner]
        else:
            self.partner = [-1] * int(num_nodes or 0)

    @classmethod
    def from_pairs(cls, num_nodes: int, pairs: Iterable[tuple[int, int]]) -> "Matching":
        m = cls(num_nodes)
        for u, v in pairs:
            m.match(u, v)
        return m

    def match(self, u: int, v: int) -> None:
        n = len(self.partner)
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidMatchingError(f"pair ({u}, {v}) references an unknown node")
        if u == v:
            raise InvalidMatchingError(f"node {u} cannot be matched with itself")
        if self.partner[u] != -1 or self.partner[v] != -1:
            raise InvalidMatchingError(f"pair ({u}, {v}) reuses an already matched node")
        self.partner[u] = v
        self.partner[v] = u

    def pairs(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v in enumerate(self.partner) if v > u]

    def __len__(self) -> int:
        return len(self.pairs())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matching):
            return NotImplemented
        return self.partner == other.partner

    def __repr__(self) -> str:
        return f"Matching({self.pairs()})"

    def validate(self, num_nodes: int) -> None:
        if len(self.partner) != num_nodes:
            raise InvalidMatchingError(
                f"matching covers {len(self.partner)} nodes, hypergraph has {num_nodes}"
            )
        for u, v in enumerate(self.partner):
            if v == -1:
                continue
            if not 0 <= v < num_nodes:
                raise InvalidMatchingError(f"node {u} matched with unknown node {v}")
            if v == u or self.partner[v] != u:
                raise InvalidMatchingError(f"matching is not symmetric at node {u}")


def contract(h: Hypergraph, m: Matching) -> tuple[Hypergraph, list[int]]:
    """Contract matched pairs into coarse nodes.

    Coarse ids follow the smallest fine id of each group. Edges are rewritten
    onto coarse ids; edges that shrink below two pins are dropped and edges
    with identical pin sets are merged with summed weight.

    Returns the coarse hypergraph and the map from fine to coarse node ids.
    """
    m.validate(h.num_nodes)
    cmap = [-1] * h.num_nodes
    coarse_weight = []
    for u in range(h.num_nodes):
        if cmap[u] != -1:
            continue
        c = len(coarse_weight)
        cmap[u] = c
        w = h.node_weight[u]
        v = m.partner[u]
        if v != -1:
            cmap[v] = c
            w += h.node_weight[v]
        coarse_weight.append(w)

    merged: dict[tuple[int, ...], int] = {}
    for pins, w in zip(h.pins_of_edge, h.edge_weight):
        key = tuple(sorted({cmap[v] for v in pins}))
        if len(key) < 2:
            continue
        merged[key] = merged.get(key, 0) + w
    coarse = Hypergraph(len(coarse_weight), list(merged), coarse_weight, list(merged.values()))
    return coarse, cmap


@dataclass
class PartitionAssignment:
    """Mutable k-way labelling with incrementally maintained part weights."""

    label: list[int]
    k: int
    part_weight: list[int] = field(default_factory=list)

    @classmethod
    def from_labels(cls, h: Hypergraph, labels: Sequence[int], k: int) -> "PartitionAssignment":
        labels = [int(x) for x in labels]
        if len(labels) != h.num_nodes:
            raise ValueError(f"expected {h.num_nodes} labels, got {len(labels)}")
        pw = [0] * k
        for v, p in enumerate(labels):
            if not 0 <= p < k:
                raise ValueError(f"label {p} of node {v} outside [0, {k})")
            pw[p] += h.node_weight[v]
        return cls(labels, k, pw)

    def move(self, h: Hypergraph, v: int, target: int) -> None:
        source = self.label[v]
        w = h.node_weight[v]
        self.part_weight[source] -= w
        self.part_weight[target] += w
        self.label[v] = target

    def copy(self) -> "PartitionAssignment":
        return PartitionAssignment(list(self.label), self.k, list(self.part_weight))


def edge_lambda(h: Hypergraph, p: PartitionAssignment | Sequence[int], e: int) -> int:
    labels = p.label if isinstance(p, PartitionAssignment) else p
    return len({labels[v] for v in h.pins_of_edge[e]})


def weighted_cut(h: Hypergraph, p: PartitionAssignment | Sequence[int]) -> int:
    labels = p.label if isinstance(p, PartitionAssignment) else p
    total = 0
    for pins, w in zip(h.pins_of_edge, h.edge_weight):
        first = labels[pins[0]]
        if any(labels[v] != first for v in pins):
            total += w
    return total


def weighted_connectivity(h: Hypergraph, p: PartitionAssignment | Sequence[int]) -> int:
    labels = p.label if isinstance(p, PartitionAssignment) else p
    total = 0
    for pins, w in zip(h.pins_of_edge, h.edge_weight):
        total += (len({labels[v] for v in pins}) - 1) * w
    return total


OBJECTIVES = {"cut": weighted_cut, "km1": weighted_connectivity, "connectivity": weighted_connectivity}


def objective_value(h: Hypergraph, p: PartitionAssignment | Sequence[int], objective: str) -> int:
    try:
        fn = OBJECTIVES[objective]
    except KeyError:
        raise ValueError(f"unknown objective {objective!r}; expected 'cut' or 'km1'") from None
    return fn(h, p)


def balance_bound(total_weight: int, k: int, alpha: float) -> float:
    """Maximum admissible part weight ``(1 + alpha) * ceil(total / k)``."""
    return (1.0 + alpha) * math.ceil(total_weight / k)


def check_balance(h: Hypergraph, p: PartitionAssignment, alpha: float) -> bool:
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    bound = balance_bound(h.total_node_weight, p.k, alpha)
    return all(w <= bound for w in p.part_weight)


def imbalance(h: Hypergraph, p: PartitionAssignment) -> float:
    """Achieved imbalance ``max_part / ceil(total / k) - 1``."""
    ideal = math.ceil(h.total_node_weight / p.k)
    return max(p.part_weight) / ideal - 1.0 if ideal else 0.0
