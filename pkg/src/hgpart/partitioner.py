"""V-cycle orchestration, recursive bisection and the estimator front end."""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, clone
from sklearn.utils.validation import check_is_fitted

from .coarsening import CoarseningConfig, coarsen
from .embedding.table import EmbeddingTable
from .hypergraph import Hypergraph, PartitionAssignment, check_balance, imbalance, objective_value
from .initial import InfeasibleError, InitialConfig, best_initial, is_feasible
from .refinement import fm_refine, project, rebalance
from .validation import check_alpha, check_embedding, check_hypergraph, check_k, check_objective


@dataclass
class VCycleConfig:
    k: int = 2
    objective: str = "km1"
    alpha: float = 0.03
    coarsening: CoarseningConfig = field(default_factory=CoarseningConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    refinement_passes: int = 8
    seed: int | None = None
    mode: str = "direct-kway"

    def validate(self) -> "VCycleConfig":
        check_k(self.k)
        check_alpha(self.alpha)
        check_objective(self.objective)
        if self.mode not in ("direct-kway", "recursive-bisection"):
            raise ValueError(f"mode must be 'direct-kway' or 'recursive-bisection', got {self.mode!r}")
        return self

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["initial"]["strategies"] = list(d["initial"]["strategies"])
        return d


@dataclass
class PartitionReport:
    labels: list[int]
    k: int
    objective: str
    objective_value: int
    imbalance: float
    feasible: bool
    levels: int
    times: dict[str, float]
    config: dict
    level_objectives: list[tuple[int, int]] = field(default_factory=list)

    def as_dict(self, include_times: bool = True) -> dict:
        out = {
            "k": self.k,
            "objective": self.objective,
            "objective_value": self.objective_value,
            "imbalance": self.imbalance,
            "feasible": self.feasible,
            "levels": self.levels,
            "level_objectives": [list(x) for x in self.level_objectives],
            "config": self.config,
        }
        if include_times:
            out["times"] = dict(self.times)
        return out


def _derive(seed, n: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def partition(h: Hypergraph, eps: EmbeddingTable | None, cfg: VCycleConfig) -> PartitionReport:
    """Coarsen, solve the coarsest level, then project and refine level by level."""
    cfg.validate()
    objective = check_objective(cfg.objective)
    k = check_k(cfg.k, h)
    if cfg.coarsening.scorer == "embedding":
        if eps is None:
            raise ValueError("the embedding coarsener requires an embedding")
        eps = check_embedding(eps, h)

    coarse_seed, init_seed = _derive(cfg.seed, 2)
    ccfg = cfg.coarsening
    if ccfg.seed is None:
        ccfg = dataclasses.replace(ccfg, seed=coarse_seed)
    icfg = cfg.initial
    if icfg.seed is None:
        icfg = dataclasses.replace(icfg, seed=init_seed)

    times = {}
    t0 = time.perf_counter()
    hier = coarsen(h, eps, ccfg, k)
    t1 = time.perf_counter()
    times["coarsening"] = t1 - t0

    coarsest = hier.coarsest
    try:
        p = best_initial(coarsest, k, cfg.alpha, objective, icfg)
    except InfeasibleError as err:
        p = err.assignment
    t2 = time.perf_counter()
    times["initial"] = t2 - t1

    level_objectives = []
    for level in range(hier.depth - 1, -1, -1):
        fine = hier.hypergraphs[level]
        p = project(p, hier.maps[level], fine)
        if not check_balance(fine, p, cfg.alpha):
            p = rebalance(fine, p, cfg.alpha, objective)
        before = objective_value(fine, p, objective)
        if check_balance(fine, p, cfg.alpha):
            p = fm_refine(fine, p, cfg.alpha, objective, cfg.refinement_passes)
        level_objectives.append((before, objective_value(fine, p, objective)))
    times["refinement"] = time.perf_counter() - t2

    return PartitionReport(
        labels=list(p.label),
        k=k,
        objective=objective,
        objective_value=objective_value(h, p, objective),
        imbalance=imbalance(h, p),
        feasible=is_feasible(h, p, cfg.alpha),
        levels=hier.depth,
        times=times,
        config=cfg.as_dict(),
        level_objectives=level_objectives,
    )


def recursive_bisect(h: Hypergraph, eps: EmbeddingTable | None, cfg: VCycleConfig) -> PartitionReport:
    """Split in two with :func:`partition`, then recurse on each side.

    Each side becomes a dense 0-based sub-hypergraph; the embedding rows
    follow the same remapping. For ``cut`` only edges that stayed uncut are
    kept (a cut edge is paid for once). For ``km1`` a cut edge keeps its
    restriction to each side with at least 2 pins, since splitting it again
    deeper down adds to its connectivity. Each
    bisection uses the tolerance ``(1 + alpha) ** (1 / log2 k) - 1`` so the
    composed parts respect ``alpha``.
    """
    cfg.validate()
    k = check_k(cfg.k, h)
    depth = int(round(math.log2(k)))
    if 2**depth != k:
        raise ValueError(f"recursive bisection needs k to be a power of two, got {k}")
    objective = check_objective(cfg.objective)
    if cfg.coarsening.scorer == "embedding":
        if eps is None:
            raise ValueError("the embedding coarsener requires an embedding")
        eps = check_embedding(eps, h)
    step_alpha = (1.0 + cfg.alpha) ** (1.0 / depth) - 1.0

    labels = [0] * h.num_nodes
    times = {"coarsening": 0.0, "initial": 0.0, "refinement": 0.0}
    max_levels = 0

    def solve(sub: Hypergraph, sub_eps, original_ids: list[int], parts: int, offset: int, seed) -> None:
        nonlocal max_levels
        if parts == 1:
            for v in original_ids:
                labels[v] = offset
            return
        if sub.num_nodes < 2:
            for v in original_ids:
                labels[v] = offset
            return
        bcfg = dataclasses.replace(cfg, k=2, alpha=step_alpha, seed=seed, mode="direct-kway")
        rep = partition(sub, sub_eps, bcfg)
        for key, val in rep.times.items():
            times[key] += val
        max_levels = max(max_levels, rep.levels)
        left_seed, right_seed = _derive(seed, 2)
        for side, side_seed in ((0, left_seed), (1, right_seed)):
            local = [v for v in range(sub.num_nodes) if rep.labels[v] == side]
            child = _side_subhypergraph(sub, rep.labels, side, local, keep_cut=objective == "km1")
            child_eps = sub_eps.take(local) if sub_eps is not None else None
            solve(child, child_eps, [original_ids[v] for v in local], parts // 2, offset + side * (parts // 2), side_seed)

    solve(h, eps, list(range(h.num_nodes)), k, 0, cfg.seed)
    p = PartitionAssignment.from_labels(h, labels, k)
    return PartitionReport(
        labels=labels,
        k=k,
        objective=objective,
        objective_value=objective_value(h, p, objective),
        imbalance=imbalance(h, p),
        feasible=is_feasible(h, p, cfg.alpha),
        levels=max_levels,
        times=times,
        config=cfg.as_dict(),
    )


def _side_subhypergraph(h: Hypergraph, labels, side: int, local: list[int], keep_cut: bool) -> Hypergraph:
    index = {v: i for i, v in enumerate(local)}
    edges, weights = [], []
    for pins, w in zip(h.pins_of_edge, h.edge_weight):
        kept = [index[v] for v in pins if labels[v] == side]
        if len(kept) == len(pins) or (keep_cut and len(kept) >= 2):
            edges.append(kept)
            weights.append(w)
    return Hypergraph(len(local), edges, [h.node_weight[v] for v in local], weights)


def run(h: Hypergraph, eps: EmbeddingTable | None, cfg: VCycleConfig) -> PartitionReport:
    """Dispatch on ``cfg.mode``."""
    if cfg.mode == "recursive-bisection":
        return recursive_bisect(h, eps, cfg)
    return partition(h, eps, cfg)


class HypergraphPartitioner(ClusterMixin, BaseEstimator):
    """Multilevel k-way hypergraph partitioner.

    Parameters
    ----------
    n_parts : int
        Number of parts ``k``.
    objective : {"km1", "cut"}
    imbalance : float
        Allowed excess of any part over ``ceil(total_weight / k)``.
    coarsener : {"embedding", "heavy-edge"}
    embedding : EmbeddingTable, array of shape (n_nodes, dims), embedder or None
        Node embedding used by the embedding coarsener. An unfitted embedder
        (for example ``HOBEEmbedding()``) is cloned and fitted on the input.
    mode : {"logn", "nlevel"}
        Full matching per level, or a single contraction per level.
    strategy : {"kway", "rb"}
        Direct k-way V-cycle or recursive bisection.
    weight_tolerance, stop_node_count, max_levels : int or None
        Coarsening limits; ``None`` picks defaults from ``n_parts``.
    initial_attempts : int
    refinement_passes : int
    random_state : int or None

    Attributes
    ----------
    labels_ : ndarray of shape (n_nodes,)
    objective_ : int
    report_ : PartitionReport
    embedding_ : EmbeddingTable or None
    """

    def __init__(
        self,
        n_parts=2,
        objective="km1",
        imbalance=0.03,
        coarsener="embedding",
        embedding=None,
        mode="logn",
        strategy="kway",
        weight_tolerance=None,
        stop_node_count=None,
        max_levels=None,
        initial_attempts=10,
        refinement_passes=8,
        random_state=None,
    ):
        self.n_parts = n_parts
        self.objective = objective
        self.imbalance = imbalance
        self.coarsener = coarsener
        self.embedding = embedding
        self.mode = mode
        self.strategy = strategy
        self.weight_tolerance = weight_tolerance
        self.stop_node_count = stop_node_count
        self.max_levels = max_levels
        self.initial_attempts = initial_attempts
        self.refinement_passes = refinement_passes
        self.random_state = random_state

    def _config(self) -> VCycleConfig:
        if self.strategy not in ("kway", "rb"):
            raise ValueError(f"strategy must be 'kway' or 'rb', got {self.strategy!r}")
        return VCycleConfig(
            k=self.n_parts,
            objective=check_objective(self.objective),
            alpha=check_alpha(self.imbalance),
            coarsening=CoarseningConfig(
                weight_tolerance=self.weight_tolerance,
                mode=self.mode,
                stop_node_count=self.stop_node_count,
                max_levels=self.max_levels,
                scorer=self.coarsener,
            ),
            initial=InitialConfig(attempts=self.initial_attempts, refine_passes=self.refinement_passes),
            refinement_passes=self.refinement_passes,
            seed=self.random_state,
            mode="recursive-bisection" if self.strategy == "rb" else "direct-kway",
        ).validate()

    def _resolve_embedding(self, h: Hypergraph, embedding):
        source = embedding if embedding is not None else self.embedding
        if source is None:
            return None
        if hasattr(source, "fit") and hasattr(source, "transform"):
            return EmbeddingTable(clone(source).fit(h).transform(h))
        return check_embedding(source, h)

    def fit(self, X, y=None, embedding=None):
        """Partition ``X`` (Hypergraph, incidence matrix or edge list)."""
        h = check_hypergraph(X)
        cfg = self._config()
        eps = self._resolve_embedding(h, embedding) if self.coarsener == "embedding" else None
        if self.coarsener == "embedding" and eps is None:
            raise ValueError("coarsener='embedding' needs an embedding (table, array or embedder)")
        self.report_ = run(h, eps, cfg)
        self.labels_ = np.asarray(self.report_.labels, dtype=np.int64)
        self.objective_ = self.report_.objective_value
        self.embedding_ = eps
        self.n_levels_ = self.report_.levels
        return self

    def fit_predict(self, X, y=None, embedding=None):
        return self.fit(X, embedding=embedding).labels_

    def score(self, X, y=None):
        """Negative objective of the fitted labels on ``X`` (higher is better)."""
        check_is_fitted(self, "labels_")
        h = check_hypergraph(X)
        return -objective_value(h, self.labels_.tolist(), self.report_.objective)
