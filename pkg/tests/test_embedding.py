import math

import numpy as np
import pytest
from sklearn.base import clone

from hgpart import Hypergraph
from hgpart.embedding import (
    AlgebraicDistance,
    CoarseEmbedding,
    EmbeddingTable,
    FOBEEmbedding,
    HOBEEmbedding,
    NegativeSampler,
    SampleSet,
    algebraic_distance,
    fobe_loss,
    fobe_samples,
    fobe_train,
    hobe_loss,
    hobe_scores,
    hobe_train,
    interpolate_coarse,
    pair_loss_and_grad,
    relax,
)
from hgpart.embedding.algebraic import AlgebraicCoordinates
from hgpart.embedding.trainers import fobe_dloss, hobe_dloss
from hgpart.hypergraph import BipartiteGraph, Matching, contract, star_expand

from conftest import gradient_probes, random_hypergraph


def two_vertex_graph():
    return BipartiteGraph(1, 1, ((1,), (0,)))


# tables and interpolation ----------------------------------------------------


def test_table_validation():
    with pytest.raises(ValueError):
        EmbeddingTable([1.0, 2.0])
    with pytest.raises(ValueError):
        EmbeddingTable([[1.0, np.nan]])
    t = EmbeddingTable([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(ValueError):
        t.vectors[0, 0] = 5.0
    assert t.take([1]).vectors.tolist() == [[3.0, 4.0]]
    assert t.scaled(2.0).vectors[1].tolist() == [6.0, 8.0]


def test_interpolate_identity_and_mean():
    eps = EmbeddingTable([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])
    assert interpolate_coarse(eps, [0, 1, 2], 2).tolist() == [2.0, 2.0]
    assert interpolate_coarse(eps, [0, 0, 1], 0).tolist() == [0.5, 0.5]


def test_coarse_embedding_is_flat_mean():
    rng = np.random.default_rng(0)
    eps = EmbeddingTable(rng.normal(size=(4, 3)))
    # first level groups {0,1,2} step by step, then merges with {3}
    ce = CoarseEmbedding.from_table(eps).contract([0, 0, 1, 2], 3).contract([0, 0, 1], 2).contract([0, 0], 1)
    assert np.allclose(ce.vectors[0], eps.vectors.mean(axis=0), atol=1e-12)
    three = eps.vectors[:3].mean(axis=0)
    assert np.allclose(ce.vectors[0], (3 * three + eps.vectors[3]) / 4, atol=1e-12)


def test_coarse_embedding_independent_of_contraction_order():
    rng = np.random.default_rng(1)
    h = random_hypergraph(rng, n_max=20, e_max=30)
    eps = EmbeddingTable(rng.normal(size=(h.num_nodes, 4)))
    n = h.num_nodes
    perm = rng.permutation(n).tolist()
    groups = [perm[i : i + 4] for i in range(0, n, 4)]

    def run(order_pairs_first):
        ce = CoarseEmbedding.from_table(eps)
        cur, cum = h, list(range(n))
        stages = [[(g[0], g[1]) for g in groups if len(g) > 1], [(g[2], g[3]) for g in groups if len(g) > 3]]
        if not order_pairs_first:
            stages.reverse()
        for stage in stages:
            pairs = [(cum[a], cum[b]) for a, b in stage]
            cur, cmap = contract(cur, Matching.from_pairs(cur.num_nodes, pairs))
            ce = ce.contract(cmap, cur.num_nodes)
            cum = [cmap[c] for c in cum]
        return {tuple(sorted(np.flatnonzero(np.array(cum) == c))): ce.vectors[c] for c in range(cur.num_nodes)}

    a, b = run(True), run(False)
    assert a.keys() == b.keys()
    for key in a:
        assert np.allclose(a[key], b[key], atol=1e-9)
        assert np.allclose(a[key], eps.vectors[list(key)].mean(axis=0), atol=1e-9)


# algebraic coordinates ------------------------------------------------------


def test_algebraic_plug_in():
    coords = AlgebraicCoordinates(np.array([[0.0, 1.0]]), 0)
    assert coords.distance(0, 1) == 1.0
    assert coords.similarity(0, 1) == 0.0
    assert coords.similarity(1, 1) == 1.0


def test_two_vertices_converge_to_midpoint():
    g = two_vertex_graph()
    init = np.array([[0.2, 0.8]])
    out = relax(g, init, 30)
    assert np.allclose(out, 0.5, atol=1e-6)
    coords = algebraic_distance(g, 10, 30, seed=3)
    assert coords.similarity(0, 1) == pytest.approx(1.0, abs=1e-6)


def test_isolated_vertex_keeps_coordinate():
    g = star_expand(Hypergraph(3, [[0, 1]]))
    init = np.array([[0.1, 0.9, 0.4, 0.7]])
    assert relax(g, init, 5)[0, 2] == 0.4


def test_algebraic_confinement_every_step():
    rng = np.random.default_rng(5)
    for _ in range(10):
        g = star_expand(random_hypergraph(rng, n_max=30, e_max=25))
        seen = []

        def check(i, a):
            seen.append(i)
            if i == 0:
                check.lo = a.min(axis=1, keepdims=True)
                check.hi = a.max(axis=1, keepdims=True)
            assert np.all(a >= check.lo) and np.all(a <= check.hi)

        algebraic_distance(g, 10, 20, seed=int(rng.integers(1 << 30)), callback=check)
        assert seen == list(range(21))


def test_algebraic_deterministic():
    g = star_expand(Hypergraph(4, [[0, 1, 2], [2, 3]]))
    a = algebraic_distance(g, seed=7)
    b = algebraic_distance(g, seed=7)
    assert np.array_equal(a.coords, b.coords)


# sample sets ----------------------------------------------------------------


def test_sample_set_validation():
    with pytest.raises(ValueError):
        SampleSet.from_pairs([(1, 1, 0.5)])
    with pytest.raises(ValueError):
        SampleSet.from_pairs([(0, 1, 1.5)])


def test_fobe_samples_targets():
    h = Hypergraph(5, [[0, 1], [1, 2], [3, 4]])
    g = star_expand(h)
    samples = fobe_samples(g, negatives_per_positive=5, seed=0)
    # node-edge incidences
    assert samples.lookup(0, 5) == 1.0
    assert samples.lookup(2, 6) == 1.0
    # co-neighbours on both sides of the star: nodes 0,1 share edge-vertex 5, edges 5,6 share node 1
    assert samples.lookup(0, 1) == 1.0
    assert samples.lookup(5, 6) == 1.0
    sampler = NegativeSampler(g)
    neg = samples.u[samples.negative_mask], samples.v[samples.negative_mask]
    assert len(neg[0]) > 0
    assert all(not sampler.related(a, b) for a, b in zip(*neg))
    assert np.all(samples.target[samples.negative_mask] == 0)


def test_hobe_scores_alpha():
    g = star_expand(Hypergraph(3, [[0, 1], [1, 2]]))
    sims = {(0, 3): 0.9, (1, 3): 0.6, (1, 4): 0.8, (2, 4): 0.3}

    def s(a, b):
        return np.array([sims.get((min(x, y), max(x, y)), 0.0) for x, y in zip(a, b)])

    samples = hobe_scores(g, s, negatives_per_positive=2, seed=0)
    # 0 and 1 share only edge-vertex 3
    assert samples.lookup(0, 1) == pytest.approx(min(0.9, 0.6))
    # edge-vertices 3 and 4 share node 1
    assert samples.lookup(3, 4) == pytest.approx(min(0.6, 0.8))
    assert np.all(samples.target[samples.negative_mask] == 0)
    # incidence (0, 3): best alpha through the other endpoint's neighbourhood
    assert samples.lookup(0, 3) == pytest.approx(0.6)


def test_hobe_scores_all_ones():
    g = star_expand(Hypergraph(4, [[0, 1, 2], [2, 3]]))
    samples = hobe_scores(g, lambda a, b: np.ones(len(a)), seed=1)
    assert np.all(samples.target[~samples.negative_mask] == 1.0)


# losses and gradients -------------------------------------------------------


def test_fobe_loss_values():
    dot = 0.3
    sig = 1 / (1 + math.exp(-dot))
    assert fobe_loss(dot, 0.5) == pytest.approx(sig * math.log(0.5 / sig))
    assert fobe_loss(dot, 0.0) == pytest.approx(-sig * math.log(sig))


def test_hobe_hinge_region():
    loss, gu, gv = pair_loss_and_grad("hobe", np.array([1.0, 0.0]), np.array([-1.0, 0.0]), 0.0)
    assert loss == 0.0 and not gu.any() and not gv.any()
    assert hobe_loss(0.5, 1.0) == pytest.approx(0.25)


@pytest.mark.parametrize("kind", ["fobe", "hobe"])
def test_gradients_match_finite_differences(kind):
    errors = gradient_probes(kind, 100, seed=11)
    assert max(errors) < 1e-4


@pytest.mark.parametrize("dloss, loss", [(fobe_dloss, fobe_loss), (hobe_dloss, hobe_loss)])
def test_scalar_derivatives(dloss, loss):
    for dot in (-1.3, 0.2, 0.9):
        for t in (0.0, 0.4, 1.0):
            numeric = (loss(dot + 1e-6, t) - loss(dot - 1e-6, t)) / 2e-6
            assert float(dloss(dot, t)) == pytest.approx(float(numeric), rel=1e-5, abs=1e-9)


# training -------------------------------------------------------------------


def test_empty_samples_rejected():
    empty = SampleSet(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0))
    with pytest.raises(ValueError):
        fobe_train(empty, dims=4)
    with pytest.raises(ValueError):
        hobe_train(empty, dims=4)


def test_single_positive_pair_raises_sigma():
    samples = SampleSet.from_pairs([(0, 1, 1.0)])
    before = fobe_train(samples, dims=4, epochs=0, seed=3)
    after = fobe_train(samples, dims=4, epochs=50, learning_rate=0.5, seed=3)

    def sig(t):
        return 1 / (1 + math.exp(-float(t.vectors[0] @ t.vectors[1])))

    assert sig(after) > sig(before)


@pytest.mark.parametrize("train", [fobe_train, hobe_train])
def test_training_is_deterministic(train):
    g = star_expand(Hypergraph(6, [[0, 1, 2], [2, 3], [3, 4, 5]]))
    samples = fobe_samples(g, seed=2)
    sampler = NegativeSampler(g)
    a = train(samples, dims=8, epochs=3, seed=9, num_vertices=g.num_vertices, negative_sampler=sampler)
    b = train(samples, dims=8, epochs=3, seed=9, num_vertices=g.num_vertices, negative_sampler=sampler)
    assert a == b


def test_hobe_training_fits_targets():
    g = star_expand(Hypergraph(4, [[0, 1], [2, 3]]))
    samples = SampleSet.from_pairs([(0, 4, 0.8), (1, 4, 0.8), (0, 1, 0.6)])
    t = hobe_train(samples, dims=4, epochs=400, learning_rate=0.1, seed=0, batch_size=3)
    v = t.vectors
    assert float(v[0] @ v[1]) == pytest.approx(0.6, abs=1e-6)
    assert float(v[0] @ v[4]) == pytest.approx(0.8, abs=1e-6)


def test_hobe_pair_starting_in_hinge_gets_no_signal():
    samples = SampleSet.from_pairs([(0, 1, 0.8)])
    start = hobe_train(samples, dims=4, epochs=0, seed=1)
    assert float(start.vectors[0] @ start.vectors[1]) < 0
    assert hobe_train(samples, dims=4, epochs=50, seed=1) == start


# estimators -----------------------------------------------------------------


@pytest.mark.parametrize("cls", [FOBEEmbedding, HOBEEmbedding, AlgebraicDistance])
def test_estimator_api(cls):
    h = Hypergraph(6, [[0, 1, 2], [2, 3], [3, 4, 5]])
    params = {"random_state": 4}
    if cls is not AlgebraicDistance:
        params.update(dims=5, epochs=2)
    est = cls(**params)
    assert clone(est).get_params() == est.get_params()
    out = est.fit_transform(h)
    assert out.shape[0] == 6
    assert np.array_equal(out, cls(**params).fit(h).transform(h))
    with pytest.raises(ValueError):
        est.transform(Hypergraph(3, []))


def test_estimator_accepts_incidence_matrix():
    h = Hypergraph(4, [[0, 1], [1, 2, 3]])
    a = HOBEEmbedding(dims=3, epochs=1, random_state=0).fit_transform(h)
    b = HOBEEmbedding(dims=3, epochs=1, random_state=0).fit_transform(h.incidence_matrix())
    assert np.array_equal(a, b)
