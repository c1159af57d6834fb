"""Seeded trial batches, improvement statistics and mixture-graph generation."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .embedding.table import EmbeddingTable
from .hypergraph import Hypergraph
from .partitioner import VCycleConfig, run

STATISTICS = ("mean", "min", "max", "std")
CSV_COLUMNS = ("graph", "config", "seed", "objective", "k", "objective_value", "feasible", "runtime_ms")


@dataclass(frozen=True)
class TrialRecord:
    graph: str
    config: str
    seed: int
    objective: str
    k: int
    objective_value: int
    feasible: bool
    runtime_ms: float

    def sort_key(self):
        return (self.graph, self.config, self.objective, self.k, self.seed)


def trial_seeds(master_seed, tau: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(master_seed).spawn(tau)]


def _one_trial(args) -> TrialRecord:
    h, eps, cfg, graph_id, config_id = args
    t0 = time.perf_counter()
    rep = run(h, eps, cfg)
    elapsed = (time.perf_counter() - t0) * 1000.0
    return TrialRecord(graph_id, config_id, cfg.seed, rep.objective, rep.k, rep.objective_value, rep.feasible, elapsed)


def run_trials(
    h: Hypergraph,
    cfg: VCycleConfig,
    tau: int = 20,
    master_seed=None,
    eps: EmbeddingTable | None = None,
    graph_id: str = "graph",
    config_id: str = "config",
    jobs: int = 1,
) -> list[TrialRecord]:
    """Run ``tau`` partitions with seeds derived from ``master_seed``.

    Infeasible results are kept and flagged.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    tasks = [(h, eps, dataclasses.replace(cfg, seed=s), graph_id, config_id) for s in trial_seeds(master_seed, tau)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_one_trial, tasks))
    return [_one_trial(t) for t in tasks]


def summarize(values: Sequence[float], stat: str) -> float:
    arr = np.asarray(values, dtype=np.float64)
    if stat == "mean":
        return float(arr.mean())
    if stat == "min":
        return float(arr.min())
    if stat == "max":
        return float(arr.max())
    if stat == "std":
        return float(arr.std())
    raise ValueError(f"unknown statistic {stat!r}; expected one of {STATISTICS}")


def _values(trials) -> list[float]:
    return [t.objective_value if isinstance(t, TrialRecord) else t for t in trials]


def improvement(method_trials, baseline_trials, stat: str = "mean") -> float:
    """``G(baseline) / G(method)``; above 1 means the method does better.

    A zero method summary gives ``inf`` against a positive baseline and 1.0
    against a zero baseline.
    """
    method, baseline = _values(method_trials), _values(baseline_trials)
    if not method or not baseline:
        raise ValueError("both trial lists must be non-empty")
    num = summarize(baseline, stat)
    den = summarize(method, stat)
    if den == 0:
        return 1.0 if num == 0 else math.inf
    return num / den


class MacroImprovement(NamedTuple):
    value: float
    excluded: int
    count: int


def macro_improvement(per_graph: Iterable[float]) -> MacroImprovement:
    """Mean of the finite per-graph improvements; infinite ones are counted apart."""
    values = list(per_graph)
    if not values:
        raise ValueError("macro improvement of an empty list")
    finite = sorted(v for v in values if math.isfinite(v))
    excluded = len(values) - len(finite)
    value = math.fsum(finite) / len(finite) if finite else math.inf
    return MacroImprovement(value, excluded, len(values))


@dataclass
class Comparison:
    """Method vs baseline configuration ids to compare within each (k, objective)."""

    method: str
    baseline: str


def improvement_report(records: Sequence[TrialRecord], comparisons: Sequence[Comparison], stats=STATISTICS) -> dict:
    """Per-graph improvements and macro summaries, keyed by comparison, k and objective."""
    groups: dict[tuple, list[int]] = {}
    for r in records:
        groups.setdefault((r.graph, r.config, r.k, r.objective), []).append(r.objective_value)
    settings = sorted({(r.k, r.objective) for r in records})
    graphs = sorted({r.graph for r in records})
    out = {}
    for comp in comparisons:
        for k, objective in settings:
            per_graph = {}
            trials = {}
            for g in graphs:
                m = groups.get((g, comp.method, k, objective))
                b = groups.get((g, comp.baseline, k, objective))
                if not m or not b:
                    continue
                per_graph[g] = {s: improvement(m, b, s) for s in stats}
                trials[g] = {"method": len(m), "baseline": len(b)}
            if not per_graph:
                continue
            macro = {}
            for s in stats:
                mi = macro_improvement(v[s] for v in per_graph.values())
                macro[s] = {"value": mi.value, "excluded": mi.excluded, "graphs": mi.count}
            key = f"{comp.method}/{comp.baseline}/k={k}/{objective}"
            out[key] = {
                "method": comp.method,
                "baseline": comp.baseline,
                "k": k,
                "objective": objective,
                "per_graph": per_graph,
                "macro": macro,
                "trials": trials,
            }
    return out


# serialization --------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits and infinities as strings."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps_json(str(k))}: {dumps_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps_json(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def format_records_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in sorted(records, key=TrialRecord.sort_key):
        writer.writerow(
            [r.graph, r.config, r.seed, r.objective, r.k, r.objective_value, int(r.feasible), _fmt_float(r.runtime_ms)]
        )
    return buf.getvalue()


def parse_records_csv(text: str) -> list[TrialRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [
        TrialRecord(
            row["graph"],
            row["config"],
            int(row["seed"]),
            row["objective"],
            int(row["k"]),
            int(row["objective_value"]),
            row["feasible"] == "1",
            float(row["runtime_ms"]),
        )
        for row in reader
    ]


def emit_report(records: Sequence[TrialRecord], comparisons: Sequence[Comparison] = (), csv_path=None, json_path=None):
    """Write the per-trial CSV and the improvement JSON; returns both texts."""
    csv_text = format_records_csv(records)
    json_text = dumps_json({"improvements": improvement_report(records, comparisons)}) + "\n"
    if csv_path is not None:
        with open(csv_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(csv_text)
    if json_path is not None:
        with open(json_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(json_text)
    return csv_text, json_text


# mixture graphs -------------------------------------------------------------


@dataclass(frozen=True)
class ComponentSpec:
    nodes: int
    edges: int
    mean_edge_size: float


def _edge_size(rng: np.random.Generator, mean: float, cap: int) -> int:
    extra = rng.poisson(max(mean - 2.0, 0.0))
    return int(min(2 + extra, cap))


def generate_mixture(
    components: Sequence[ComponentSpec | tuple],
    cross_fraction: float = 0.005,
    noise_fraction: float = 0.005,
    seed=None,
) -> Hypergraph:
    """Disjoint random components joined by a few cross edges plus random noise edges.

    Component ``i`` owns a contiguous node range. Edge sizes are
    ``2 + Poisson(mean - 2)`` capped at the pool size; pins are uniform
    without replacement. Cross edges draw pins from two distinct components
    (at least one from each). Cross and noise edge counts are the given
    fractions of the total component edge count, rounded.
    """
    specs = [c if isinstance(c, ComponentSpec) else ComponentSpec(*c) for c in components]
    if not specs:
        raise ValueError("at least one component is required")
    for i, c in enumerate(specs):
        if c.nodes < 2 or c.mean_edge_size < 2 or c.mean_edge_size > c.nodes or c.edges < 0:
            raise ValueError(f"infeasible component spec #{i}: {c}")
    if not (0 <= cross_fraction <= 1 and 0 <= noise_fraction <= 1):
        raise ValueError("fractions must lie in [0, 1]")
    if cross_fraction > 0 and len(specs) < 2:
        raise ValueError("cross edges need at least two components")

    rng = np.random.default_rng(seed)
    offsets = np.cumsum([0] + [c.nodes for c in specs])
    n = int(offsets[-1])
    edges: list[list[int]] = []
    for i, c in enumerate(specs):
        for _ in range(c.edges):
            size = _edge_size(rng, c.mean_edge_size, c.nodes)
            pins = rng.choice(c.nodes, size=size, replace=False) + offsets[i]
            edges.append(pins.tolist())

    base = len(edges)
    mean_size = float(np.mean([c.mean_edge_size for c in specs]))
    for _ in range(int(round(cross_fraction * base))):
        a, b = rng.choice(len(specs), size=2, replace=False)
        size = _edge_size(rng, mean_size, specs[a].nodes + specs[b].nodes)
        from_a = int(rng.integers(1, size)) if size > 2 else 1
        from_a = min(from_a, specs[a].nodes)
        from_b = min(size - from_a, specs[b].nodes)
        pins = np.concatenate([
            rng.choice(specs[a].nodes, size=from_a, replace=False) + offsets[a],
            rng.choice(specs[b].nodes, size=max(from_b, 1), replace=False) + offsets[b],
        ])
        edges.append(pins.tolist())
    for _ in range(int(round(noise_fraction * base))):
        size = _edge_size(rng, mean_size, n)
        edges.append(rng.choice(n, size=size, replace=False).tolist())
    return Hypergraph(n, edges)


def mixture_membership(components: Sequence[ComponentSpec | tuple]) -> list[int]:
    """Component index of every node of a generated mixture."""
    specs = [c if isinstance(c, ComponentSpec) else ComponentSpec(*c) for c in components]
    return [i for i, c in enumerate(specs) for _ in range(c.nodes)]
