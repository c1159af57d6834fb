import json
import math

import numpy as np
import pytest

from hgpart import CoarseningConfig, Hypergraph, VCycleConfig
from hgpart.bench import (
    Comparison,
    ComponentSpec,
    TrialRecord,
    dumps_json,
    emit_report,
    format_records_csv,
    generate_mixture,
    improvement,
    macro_improvement,
    mixture_membership,
    parse_records_csv,
    run_trials,
    trial_seeds,
)
from hgpart.hypergraph import weighted_cut
from hgpart.partitioner import partition

from conftest import brute_force_optimum


def test_improvement_examples():
    assert improvement([5, 5], [10, 10], "mean") == 2.0
    for stat in ("mean", "min", "max"):
        assert improvement([3, 7, 4], [3, 7, 4], stat) == 1.0
    assert improvement([10, 10], [9, 11], "std") == math.inf
    assert improvement([0, 0], [0, 0], "mean") == 1.0
    with pytest.raises(ValueError):
        improvement([], [1], "mean")
    with pytest.raises(ValueError):
        improvement([1], [1], "median")


def test_macro_examples():
    assert macro_improvement([1.0, 1.0, 1.0]).value == 1.0
    assert macro_improvement([2.0, 1.0]).value == 1.5
    mi = macro_improvement([2.0, math.inf])
    assert (mi.value, mi.excluded, mi.count) == (2.0, 1, 2)
    assert macro_improvement([0.3, 1.7, 2.2]).value == macro_improvement([2.2, 0.3, 1.7]).value
    with pytest.raises(ValueError):
        macro_improvement([])


def heavy_cfg(k=2):
    return VCycleConfig(k=k, coarsening=CoarseningConfig(scorer="heavy-edge"))


def small_graph():
    rng = np.random.default_rng(0)
    return Hypergraph(60, [rng.choice(60, size=3, replace=False).tolist() for _ in range(90)])


def test_run_trials_single_matches_direct_call():
    h = small_graph()
    [rec] = run_trials(h, heavy_cfg(), tau=1, master_seed=7)
    seed = trial_seeds(7, 1)[0]
    direct = partition(h, None, VCycleConfig(k=2, coarsening=CoarseningConfig(scorer="heavy-edge"), seed=seed))
    assert rec.seed == seed and rec.objective_value == direct.objective_value


def test_run_trials_reproducible_and_parallel():
    h = small_graph()
    a = run_trials(h, heavy_cfg(), tau=3, master_seed=1)
    b = run_trials(h, heavy_cfg(), tau=3, master_seed=1, jobs=2)
    strip = lambda rs: [(r.seed, r.objective_value, r.feasible) for r in rs]
    assert strip(a) == strip(b)
    with pytest.raises(ValueError):
        run_trials(h, heavy_cfg(), tau=0)


def records():
    out = []
    for cfg, vals in (("emb", [4, 6]), ("he", [8, 8])):
        for i, v in enumerate(vals):
            out.append(TrialRecord("g1", cfg, i, "km1", 2, v, True, 1.25))
    for cfg, vals in (("emb", [0, 0]), ("he", [2, 4])):
        for i, v in enumerate(vals):
            out.append(TrialRecord("g2", cfg, i, "km1", 2, v, i == 0, 0.5))
    return out


def test_csv_round_trip_and_order():
    recs = records()
    text = format_records_csv(reversed(recs))
    assert text.splitlines()[0] == "graph,config,seed,objective,k,objective_value,feasible,runtime_ms"
    assert text.endswith("\n")
    assert parse_records_csv(text) == sorted(recs, key=TrialRecord.sort_key)


def test_report_matches_recomputation_from_csv(tmp_path):
    csv_text, json_text = emit_report(records(), [Comparison("emb", "he")], tmp_path / "r.csv", tmp_path / "r.json")
    assert (tmp_path / "r.json").read_text() == json_text and json_text.endswith("\n")
    report = json.loads(json_text)["improvements"]["emb/he/k=2/km1"]
    parsed = parse_records_csv(csv_text)
    by = lambda g, c: [r.objective_value for r in parsed if r.graph == g and r.config == c]
    assert report["per_graph"]["g1"]["mean"] == 8 / 5
    assert report["per_graph"]["g2"]["mean"] == "inf"
    assert report["macro"]["mean"] == {"value": improvement(by("g1", "emb"), by("g1", "he")), "excluded": 1, "graphs": 2}


def test_zero_comparisons():
    csv_text, json_text = emit_report(records())
    assert json.loads(json_text) == {"improvements": {}}
    assert len(csv_text.splitlines()) == 9


def test_json_float_formatting():
    assert dumps_json({"a": 0.1, "b": [math.inf, 2]}) == '{\n  "a": 0.10000000000000001,\n  "b": [\n    "inf",\n    2\n  ]\n}'


def test_mixture_counts_and_isolation():
    specs = [ComponentSpec(30, 40, 3.0), ComponentSpec(20, 30, 2.5)]
    h = generate_mixture(specs, cross_fraction=0.0, noise_fraction=0.0, seed=1)
    mem = mixture_membership(specs)
    assert h.num_nodes == 50 and h.num_edges == 70
    assert all(len({mem[v] for v in pins}) == 1 for pins in h.pins_of_edge)
    h2 = generate_mixture(specs, cross_fraction=0.01, noise_fraction=0.01, seed=1)
    assert h2.num_edges == 70 + 1 + 1
    crossing = [pins for pins in h2.pins_of_edge[70:71]]
    assert len({mem[v] for v in crossing[0]}) == 2


def test_mixture_two_components_optimum_splits_them():
    specs = [(6, 8, 2.5), (6, 8, 2.5)]
    h = generate_mixture(specs, 0.0, 0.0, seed=3)
    mem = mixture_membership(specs)
    assert weighted_cut(h, mem) == 0 == brute_force_optimum(h, 2, 0.0, "cut")


def test_mixture_rejects_bad_specs():
    with pytest.raises(ValueError):
        generate_mixture([(3, 5, 4.0), (3, 5, 2.0)])
    with pytest.raises(ValueError):
        generate_mixture([(10, 5, 2.0)], cross_fraction=0.01)
    with pytest.raises(ValueError):
        generate_mixture([(10, 5, 2.0), (10, 5, 2.0)], noise_fraction=-0.1)


def test_mixture_deterministic():
    specs = [(40, 60, 3.0), (40, 60, 3.0)]
    assert generate_mixture(specs, seed=5) == generate_mixture(specs, seed=5)
