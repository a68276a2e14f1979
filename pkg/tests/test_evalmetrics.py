import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from citerec.corpus import GraphSnapshot
from citerec.evalmetrics import (auc, auc_bruteforce, bootstrap, cohens_d,
                                 diversity, mean_hop_distance, ndcg_at_k,
                                 novelty, precision_recall_at_k,
                                 reciprocal_rank, subset_metrics)
from citerec.matrix import EmbeddingMatrix


def ref_matrix(vectors: dict):
    ids = sorted(vectors)
    return EmbeddingMatrix("ref", len(next(iter(vectors.values()))), ids,
                           dense=np.array([vectors[i] for i in ids], dtype=float))


# --- precision / recall -------------------------------------------------------

def test_precision_counting():
    p, r = precision_recall_at_k(["r1", "x", "r2"], {"r1", "r2"}, 3)
    assert p == pytest.approx(2 / 3)
    assert r == 1.0


def test_precision_short_ranking_keeps_k_denominator():
    p, _ = precision_recall_at_k(list("abcdefg"), {"a", "b"}, 10)
    assert p == pytest.approx(0.2)


def test_recall_absent_when_no_relevant():
    p, r = precision_recall_at_k(["a", "b"], set(), 2)
    assert p == 0.0
    assert r is None


# --- auc -----------------------------------------------------------------------

def test_auc_extremes():
    assert auc(["r1", "r2", "x", "y"], {"r1", "r2"}) == 1.0
    assert auc(["x", "y", "r1", "r2"], {"r1", "r2"}) == 0.0


def test_auc_hand_case():
    # relevant at ranks 1 and 3 of 4: pairs won = 2 + 1 of 4
    assert auc(["r1", "x", "r2", "y"], {"r1", "r2"}) == 0.75


def test_auc_absent_cases():
    assert auc(["a", "b"], set()) is None
    assert auc(["a", "b"], {"a", "b"}) is None


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=2, max_value=50), st.randoms(use_true_random=False))
def test_auc_equals_bruteforce(n, rnd):
    ranking = [f"i{j}" for j in range(n)]
    rnd.shuffle(ranking)
    relevant = {c for c in ranking if rnd.random() < 0.4}
    assert auc(ranking, relevant) == auc_bruteforce(ranking, relevant)


# --- ndcg ------------------------------------------------------------------------

def test_ndcg_ideal_is_one():
    assert ndcg_at_k(["r1", "r2", "x"], {"r1", "r2"}, 3) == pytest.approx(1.0)


def test_ndcg_hand_case():
    # [rel, irrel, rel], k=3: DCG = 1 + 1/2 = 1.5; ideal = 1 + 1/log2(3)
    got = ndcg_at_k(["r1", "x", "r2"], {"r1", "r2"}, 3)
    ideal = 1.0 + 1.0 / math.log2(3.0)
    assert got == pytest.approx(1.5 / ideal)
    assert got == pytest.approx(0.9197, abs=1e-4)


def test_ndcg_no_hits_zero():
    assert ndcg_at_k(["x", "y"], {"r"}, 2) == 0.0
    assert ndcg_at_k(["x"], set(), 1) is None


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=1, max_value=25),
       st.integers(min_value=1, max_value=10),
       st.randoms(use_true_random=False))
def test_ndcg_one_iff_ideal_prefix(n, k, rnd):
    ranking = [f"i{j}" for j in range(n)]
    relevant = {c for c in ranking if rnd.random() < 0.4}
    if not relevant:
        return
    got = ndcg_at_k(ranking, relevant, k)
    prefix_ideal = all(c in relevant for c in ranking[:min(k, len(relevant))])
    assert (abs(got - 1.0) < 1e-12) == prefix_ideal


# --- reciprocal rank -------------------------------------------------------------

def test_rr():
    assert reciprocal_rank(["r", "x"], {"r"}) == 1.0
    assert reciprocal_rank(["a", "b", "c", "r"], {"r"}) == 0.25
    assert reciprocal_rank(["a", "b"], {"r"}) is None


def test_rr_tenth_item():
    ranking = [f"x{i}" for i in range(9)] + ["r"]
    assert reciprocal_rank(ranking, {"r"}) == pytest.approx(0.1)


# --- novelty / diversity ----------------------------------------------------------

def test_novelty_zero_for_identical():
    ref = ref_matrix({"q": [1, 0], "a": [1, 0], "b": [2, 0]})
    assert novelty(ref, "q", ["a", "b"]) == pytest.approx(0.0)


def test_novelty_orthogonal():
    ref = ref_matrix({"q": [1, 0], "a": [0, 1], "b": [0, 2]})
    assert novelty(ref, "q", ["a", "b"]) == pytest.approx(1.0)


def test_novelty_mixed_hand_case():
    ref = ref_matrix({"q": [1, 0], "same": [2, 0], "orth": [0, 1],
                      "anti": [-3, 0]})
    got = novelty(ref, "q", ["same", "orth", "anti"])
    assert got == pytest.approx((0.0 + 1.0 + 2.0) / 3)


def test_diversity_cases():
    ref = ref_matrix({"a": [1, 0, 0], "b": [0, 1, 0], "c": [0, 0, 1],
                      "a2": [5, 0, 0]})
    assert diversity(ref, ["a", "a2"]) == pytest.approx(0.0)
    assert diversity(ref, ["a", "b"]) == pytest.approx(1.0)
    assert diversity(ref, ["a", "b", "c"]) == pytest.approx(1.0)
    assert diversity(ref, ["a"]) is None


def test_subset_metrics_rules():
    ref = ref_matrix({"q": [1, 0], "r1": [0, 1], "r2": [1, 0], "x": [1, 1]})
    ranking = ["x", "r1", "r2"]
    nov, div = subset_metrics(ref, "q", ranking, {"r1", "r2"}, 3)
    assert nov == pytest.approx((1.0 + 0.0) / 2)
    assert div == pytest.approx(1.0)
    nov, div = subset_metrics(ref, "q", ranking, {"r1"}, 3)
    assert nov == pytest.approx(1.0)
    assert div is None
    nov, div = subset_metrics(ref, "q", ranking, {"zz"}, 3)
    assert nov is None and div is None


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.1, max_value=100.0))
def test_cosine_scale_invariance(scale):
    ref1 = ref_matrix({"q": [1, 2], "a": [2, 1], "b": [-1, 1]})
    ref2 = ref_matrix({"q": [1 * scale, 2 * scale], "a": [2, 1], "b": [-1, 1]})
    assert novelty(ref1, "q", ["a", "b"]) == pytest.approx(
        novelty(ref2, "q", ["a", "b"]))


def test_diversity_permutation_invariant():
    ref = ref_matrix({"a": [1, 0.2], "b": [0.3, 1], "c": [-1, 0.5]})
    assert diversity(ref, ["a", "b", "c"]) == pytest.approx(
        diversity(ref, ["c", "a", "b"]))


# --- monotone transform invariance -------------------------------------------------

def test_rank_metrics_depend_only_on_order():
    ranking = ["a", "b", "c", "d", "e"]
    relevant = {"b", "d"}
    # any strictly monotone rescoring keeps the ranking identical, so every
    # rank-based metric is trivially unchanged; assert the integer property
    p, r = precision_recall_at_k(ranking, relevant, 3)
    assert (p * 3) == round(p * 3)
    assert (r * len(relevant)) == round(r * len(relevant))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=40),
       st.integers(min_value=1, max_value=15),
       st.randoms(use_true_random=False))
def test_precision_recall_products_are_integers(n, k, rnd):
    ranking = [f"i{j}" for j in range(n)]
    relevant = {c for c in ranking if rnd.random() < 0.5}
    p, r = precision_recall_at_k(ranking, relevant, k)
    assert p * k == round(p * k)
    if relevant:
        assert r * len(relevant) == round(r * len(relevant))


# --- hop distances -------------------------------------------------------------------

def path_graph():
    edges = [("a", "b"), ("b", "c"), ("c", "d")]
    return GraphSnapshot(0, ["a", "b", "c", "d", "iso"], edges)


def test_hop_distance_cases():
    g = path_graph()
    mean, unreachable = mean_hop_distance(g, "a", ["b"])
    assert mean == 1.0 and unreachable == 0
    mean, unreachable = mean_hop_distance(g, "a", ["b", "d"])
    assert mean == 2.0
    mean, unreachable = mean_hop_distance(g, "a", ["c", "iso"])
    assert mean == 2.0 and unreachable == 1
    mean, unreachable = mean_hop_distance(g, "a", ["iso"])
    assert mean is None and unreachable == 1


# --- bootstrap -------------------------------------------------------------------------

def test_bootstrap_constant_zero_std():
    mean, std = bootstrap([2.5] * 40, 500, seed=1)
    assert mean == 2.5
    assert std == 0.0


def test_bootstrap_deterministic():
    vals = list(np.random.Generator(np.random.PCG64(9)).normal(size=50))
    assert bootstrap(vals, 300, seed=4) == bootstrap(vals, 300, seed=4)


def test_bootstrap_bernoulli_calibration():
    # theoretical SE of the mean of 500 zeros and 500 ones = 0.0158
    values = [0.0] * 500 + [1.0] * 500
    mean, std = bootstrap(values, 1000, seed=3)
    assert mean == 0.5
    assert 0.012 <= std <= 0.020


def test_bootstrap_empty_rejected():
    with pytest.raises(ValueError):
        bootstrap([], 1000, 0)


# --- cohen's d ----------------------------------------------------------------------------

def test_cohens_d_identical_zero():
    assert cohens_d([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0


def test_cohens_d_unit():
    rng = np.random.Generator(np.random.PCG64(17))
    a = rng.normal(1.0, 1.0, size=20000)
    b = rng.normal(0.0, 1.0, size=20000)
    assert cohens_d(a, b) == pytest.approx(1.0, abs=0.05)


def test_cohens_d_hand_case():
    # a = {2,4}, b = {1,3}: pooled sd = sqrt(2), d = 1/sqrt(2)
    assert cohens_d([2.0, 4.0], [1.0, 3.0]) == pytest.approx(1 / math.sqrt(2))


def test_cohens_d_degenerate_absent():
    assert cohens_d([1.0, 1.0], [2.0, 2.0]) is None
