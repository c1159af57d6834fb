import numpy as np
import pytest
from sklearn.base import clone

from hgpart import CoarseningConfig, Hypergraph, HypergraphPartitioner, HOBEEmbedding, VCycleConfig, partition, recursive_bisect
from hgpart.embedding import EmbeddingTable
from hgpart.hypergraph import objective_value
from hgpart.partitioner import run

from conftest import brute_force_optimum


def clique_pair(bridge=False):
    edges = [[a, b] for a in range(5) for b in range(a + 1, 5)]
    edges += [[a + 5, b + 5] for a in range(5) for b in range(a + 1, 5)]
    weights = [1] * len(edges)
    if bridge:
        edges.append([4, 5])
        weights.append(3)
    return Hypergraph(10, edges, edge_weight=weights)


def separated_embedding(n, groups):
    vecs = np.zeros((n, 2))
    for g, members in enumerate(groups):
        vecs[members, g] = 1.0
    return EmbeddingTable(vecs)


def small_cfg(**kw):
    kw.setdefault("coarsening", CoarseningConfig(stop_node_count=4))
    kw.setdefault("seed", 0)
    return VCycleConfig(**kw)


def test_disjoint_cliques_zero():
    h = clique_pair()
    eps = separated_embedding(10, [list(range(5)), list(range(5, 10))])
    rep = partition(h, eps, small_cfg(k=2, alpha=0.0))
    assert rep.objective_value == 0 and rep.feasible
    assert rep.levels > 0


def test_bridge_costs_its_weight():
    h = clique_pair(bridge=True)
    eps = separated_embedding(10, [list(range(5)), list(range(5, 10))])
    rep = partition(h, eps, small_cfg(k=2, alpha=0.0))
    assert rep.objective_value == 3 == brute_force_optimum(h, 2, 0.0, "km1")


def test_report_consistency_and_determinism():
    rng = np.random.default_rng(3)
    edges = [rng.choice(120, size=int(rng.integers(2, 5)), replace=False).tolist() for _ in range(200)]
    h = Hypergraph(120, edges)
    eps = EmbeddingTable(rng.normal(size=(120, 4)))
    for objective in ("cut", "km1"):
        cfg = VCycleConfig(k=4, objective=objective, seed=5, coarsening=CoarseningConfig(stop_node_count=20))
        a, b = partition(h, eps, cfg), partition(h, eps, cfg)
        assert a.labels == b.labels
        assert a.objective_value == objective_value(h, a.labels, objective)
        for before, after in a.level_objectives:
            assert after <= before
    c = partition(h, eps, VCycleConfig(k=2, objective="cut", seed=5))
    d = partition(h, eps, VCycleConfig(k=2, objective="km1", seed=5))
    assert c.objective_value == d.objective_value


def test_missing_embedding_and_bad_k():
    h = clique_pair()
    with pytest.raises(ValueError):
        partition(h, None, VCycleConfig(k=2))
    with pytest.raises(ValueError):
        partition(h, None, VCycleConfig(k=11, coarsening=CoarseningConfig(scorer="heavy-edge")))
    with pytest.raises(ValueError):
        VCycleConfig(k=1).validate()


def test_recursive_bisection_four_components():
    blocks = [list(range(4 * i, 4 * i + 4)) for i in range(4)]
    edges = [[b[i], b[j]] for b in blocks for i in range(4) for j in range(i + 1, 4)]
    h = Hypergraph(16, edges)
    vecs = np.zeros((16, 4))
    for i, b in enumerate(blocks):
        vecs[b, i] = 1.0
    cfg = small_cfg(k=4, alpha=0.0, mode="recursive-bisection")
    rep = recursive_bisect(h, EmbeddingTable(vecs), cfg)
    assert rep.objective_value == 0
    assert sorted(rep.labels) == sorted([p for p in range(4) for _ in range(4)])


def test_recursive_bisection_k2_equals_partition():
    h = clique_pair(bridge=True)
    cfg = small_cfg(k=2, coarsening=CoarseningConfig(scorer="heavy-edge", stop_node_count=4))
    assert recursive_bisect(h, None, cfg).labels == partition(h, None, cfg).labels


def test_recursive_bisection_requires_power_of_two():
    h = Hypergraph(12, [[i, i + 1] for i in range(11)])
    cfg = VCycleConfig(k=3, coarsening=CoarseningConfig(scorer="heavy-edge"), mode="recursive-bisection")
    with pytest.raises(ValueError):
        run(h, None, cfg)


def test_recursive_bisection_km1_accounts_split_edges():
    rng = np.random.default_rng(9)
    edges = [rng.choice(80, size=int(rng.integers(2, 6)), replace=False).tolist() for _ in range(150)]
    h = Hypergraph(80, edges)
    for objective in ("cut", "km1"):
        cfg = VCycleConfig(k=8, objective=objective, seed=1, mode="recursive-bisection",
                           coarsening=CoarseningConfig(scorer="heavy-edge"))
        rep = run(h, None, cfg)
        assert rep.objective_value == objective_value(h, rep.labels, objective)
        assert set(rep.labels) == set(range(8))


def test_estimator_api():
    h = clique_pair(bridge=True)
    est = HypergraphPartitioner(n_parts=2, embedding=HOBEEmbedding(dims=4, epochs=2, random_state=0),
                                stop_node_count=4, random_state=0)
    assert clone(est).get_params()["n_parts"] == 2
    labels = est.fit_predict(h)
    assert labels.shape == (10,)
    assert est.objective_ == objective_value(h, labels.tolist(), "km1")
    assert est.score(h) == -est.objective_
    assert isinstance(est.embedding_, EmbeddingTable)


def test_estimator_heavy_edge_and_rb():
    h = clique_pair(bridge=True)
    est = HypergraphPartitioner(n_parts=2, coarsener="heavy-edge", strategy="rb", random_state=1).fit(h.incidence_matrix())
    # the incidence matrix carries no edge weights, so the bridge costs 1
    assert est.objective_ == 1
    with pytest.raises(ValueError):
        HypergraphPartitioner(coarsener="embedding").fit(h)
    with pytest.raises(ValueError):
        HypergraphPartitioner(strategy="spiral", coarsener="heavy-edge").fit(h)
