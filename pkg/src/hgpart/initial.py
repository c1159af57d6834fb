"""Initial k-way assignments for the coarsest hypergraph."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .hypergraph import Hypergraph, PartitionAssignment, balance_bound, check_balance, imbalance, objective_value
from .refinement import fm_refine, rebalance

STRATEGIES = ("random", "greedy-growth")


class InfeasibleError(RuntimeError):
    """No attempt met the balance bound; ``assignment`` is the least imbalanced one."""

    def __init__(self, message: str, assignment: PartitionAssignment):
        super().__init__(message)
        self.assignment = assignment


def is_feasible(h: Hypergraph, p: PartitionAssignment, alpha: float) -> bool:
    """Balanced, and not forced to leave parts empty because ``k > |V|``."""
    return p.k <= h.num_nodes and check_balance(h, p, alpha)


def _lightest(part_weight: list[int]) -> int:
    return min(range(len(part_weight)), key=lambda q: (part_weight[q], q))


def random_balanced(h: Hypergraph, k: int, alpha: float, seed=None) -> PartitionAssignment:
    """Shuffle the nodes and drop each into the currently lightest part.

    Nodes are taken heaviest first (random order among equal weights), which
    keeps the final spread within one node weight. When a node fits nowhere
    it still goes to the lightest part and the result fails
    :func:`is_feasible`.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(seed)
    order = rng.permutation(h.num_nodes).tolist()
    order.sort(key=lambda v: -h.node_weight[v])
    label = [0] * h.num_nodes
    pw = [0] * k
    for v in order:
        q = _lightest(pw)
        label[v] = q
        pw[q] += h.node_weight[v]
    return PartitionAssignment(label, k, pw)


def _farthest_seeds(h: Hypergraph, k: int, rng: np.random.Generator) -> list[int]:
    n = h.num_nodes
    ranking = rng.permutation(n).tolist()
    rank = {v: i for i, v in enumerate(ranking)}
    dist = [math.inf] * n

    def bfs(src: int) -> None:
        dist[src] = 0
        queue = deque([src])
        while queue:
            x = queue.popleft()
            for e in h.edges_of_node[x]:
                for y in h.pins_of_edge[e]:
                    if dist[y] > dist[x] + 1:
                        dist[y] = dist[x] + 1
                        queue.append(y)

    # start from a pseudo-peripheral node: the farthest one from a random start
    bfs(ranking[0])
    first = max(range(n), key=lambda v: (dist[v] if dist[v] < math.inf else -1, -rank[v]))
    seeds = [first]
    dist = [math.inf] * n
    bfs(first)
    while len(seeds) < min(k, n):
        cand = max((v for v in range(n) if v not in seeds), key=lambda v: (dist[v], -rank[v]))
        seeds.append(cand)
        bfs(cand)
    return seeds


def greedy_growth(h: Hypergraph, k: int, alpha: float, seed=None) -> PartitionAssignment:
    """Grow ``k`` regions from spread-out seeds.

    The lightest growable part absorbs the frontier node whose addition
    raises connectivity least (ties: strongest connection, then lowest id)
    until it reaches ``ceil(total / k)``. A part whose frontier runs dry
    restarts from a random unassigned node. Whatever is left over goes to
    the lightest part.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(seed)
    n = h.num_nodes
    total = h.total_node_weight
    target = min(math.ceil(total / k), balance_bound(total, k, alpha))
    label = [-1] * n
    pw = [0] * k
    phi = [[0] * k for _ in range(h.num_edges)]
    assigned_pins = [0] * h.num_edges
    frontier: list[set[int]] = [set() for _ in range(k)]

    def absorb(v: int, q: int) -> None:
        label[v] = q
        pw[q] += h.node_weight[v]
        for e in h.edges_of_node[v]:
            phi[e][q] += 1
            assigned_pins[e] += 1
            for u in h.pins_of_edge[e]:
                if label[u] == -1:
                    frontier[q].add(u)
        for f in frontier:
            f.discard(v)

    for q, s in enumerate(_farthest_seeds(h, k, rng)):
        absorb(s, q)
    restart_order = rng.permutation(n).tolist()

    growing = set(range(k))
    while growing:
        q = min(growing, key=lambda x: (pw[x], x))
        best = None
        for v in frontier[q]:
            if pw[q] + h.node_weight[v] > target:
                continue
            increase = 0
            connection = 0
            for e in h.edges_of_node[v]:
                w = h.edge_weight[e]
                if phi[e][q]:
                    connection += w
                elif assigned_pins[e]:
                    increase += w
            key = (increase, -connection, v)
            if best is None or key < best:
                best = key
        if best is None and not frontier[q]:
            best = next(
                ((0, 0, v) for v in restart_order if label[v] == -1 and pw[q] + h.node_weight[v] <= target),
                None,
            )
        if best is None:
            growing.discard(q)
            continue
        absorb(best[2], q)

    for v in range(n):
        if label[v] == -1:
            q = _lightest(pw)
            label[v] = q
            pw[q] += h.node_weight[v]
    return PartitionAssignment(label, k, pw)


INITIALIZERS = {"random": random_balanced, "greedy-growth": greedy_growth}


@dataclass
class InitialConfig:
    """Portfolio of initial solvers.

    ``attempts`` runs are spread round-robin over ``strategies``, each with
    its own seed derived from ``seed``. With ``refine_passes > 0`` every
    attempt is polished by FM before comparison.
    """

    attempts: int = 10
    strategies: tuple[str, ...] = STRATEGIES
    seed: int | None = None
    refine_passes: int = 8

    def __post_init__(self):
        if self.attempts < 1:
            raise ValueError("attempts must be >= 1")
        unknown = set(self.strategies) - set(INITIALIZERS)
        if unknown or not self.strategies:
            raise ValueError(f"unknown initial strategies {sorted(unknown)}")


def best_initial(
    h: Hypergraph,
    k: int,
    alpha: float,
    objective: str = "km1",
    cfg: InitialConfig | None = None,
) -> PartitionAssignment:
    """Lowest-objective feasible assignment over the configured attempts.

    Ties go to the earliest attempt. Raises :class:`InfeasibleError` when no
    attempt is feasible.
    """
    cfg = cfg or InitialConfig()
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.attempts)
    best = None
    fallback = None
    for i, ss in enumerate(seeds):
        strategy = cfg.strategies[i % len(cfg.strategies)]
        p = INITIALIZERS[strategy](h, k, alpha, ss)
        if not check_balance(h, p, alpha):
            p = rebalance(h, p, alpha, objective)
        if cfg.refine_passes > 0 and check_balance(h, p, alpha):
            p = fm_refine(h, p, alpha, objective, cfg.refine_passes)
        if is_feasible(h, p, alpha):
            obj = objective_value(h, p, objective)
            if best is None or obj < best[0]:
                best = (obj, p)
        else:
            imb = imbalance(h, p)
            if fallback is None or imb < fallback[0]:
                fallback = (imb, p)
    if best is None:
        raise InfeasibleError(
            f"no feasible initial {k}-way assignment within imbalance {alpha}", fallback[1]
        )
    return best[1]
