from __future__ import annotations

import math

import pytest

from clone_lattice.detector import (
    FeatureVector,
    WeightedVector,
    brute_force_cluster,
    cluster_key,
    cluster_threshold,
    euclidean_distance,
    hamming_distance,
    is_clone_pair,
    lsh_cluster,
    shared_nodes,
    similarity,
    similarity_from_counts,
    vectorize,
)
from clone_lattice.errors import DimensionMismatch
from clone_lattice.frontend import NodeKind

from conftest import parse_one

V1 = (7, 2, 2, 2, 0, 1, 1, 1, 1)
V2 = (8, 1, 1, 2, 1, 1, 1, 1, 1)


def wv(counts, ref=None):
    return WeightedVector.of(FeatureVector.from_counts(counts, ref))


def test_vectorize_counts_postorder_nodes():
    t = parse_one("int f(int *p) { return p[0]; }")
    v = vectorize(t)
    assert v.size == sum(v.counts) == sum(1 for _ in t.root.walk())
    assert v.counts[NodeKind.ArrayRef] == 1
    assert v.counts[NodeKind.Return] == 1
    assert len(v.counts) == 17


def test_from_counts_pads():
    v = FeatureVector.from_counts(V1)
    assert len(v.counts) == 17 and v.size == 17


def test_distances_of_worked_pair():
    assert euclidean_distance(wv(V1), wv(V2)) == pytest.approx(2.0, abs=1e-12)
    assert hamming_distance(wv(V1), wv(V2)) == pytest.approx(4.0, abs=1e-12)


def test_threshold_formula():
    assert cluster_threshold(0.75, 17, 17) == pytest.approx(math.sqrt(8.5), abs=1e-12)
    assert cluster_threshold(1.0, 40, 10) == 0.0
    assert cluster_threshold(0.8, wv(V1), 30) == pytest.approx(math.sqrt(0.4 * 17))


def test_clone_pair_at_worked_threshold():
    assert is_clone_pair(wv(V1), wv(V2), 0.75)
    assert not is_clone_pair(wv(V1), wv(V2), 0.95)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        euclidean_distance([1, 2, 3], [1, 2])
    with pytest.raises(DimensionMismatch):
        hamming_distance([1], [1, 2])


def test_similarity_of_identical_trees_is_one():
    t = parse_one("void f(int *p, int n) { int i; for (i = 0; i < n; i++) p[i] = 0; }")
    assert similarity(t, t) == 1.0
    shared, left, right = shared_nodes(t, t)
    assert left == right == 0 and shared > 0


def test_similarity_formula():
    assert similarity_from_counts(10, 0, 0) == 1.0
    assert similarity_from_counts(3, 1, 1) == pytest.approx(0.75)
    assert similarity_from_counts(0, 0, 0) == 0.0


def test_similarity_drops_with_edits():
    a = parse_one("void f(int *p, int n) { int i; for (i = 0; i < n; i++) p[i] = 0; }")
    b = parse_one("void f(int *p, int n) { int i; for (i = 0; i < n; i++) p[i + 1] = 0; }")
    assert 0.8 < similarity(a, b) < 1.0


def test_lsh_matches_brute_force_small():
    vectors = [wv(V1, "a"), wv(V2, "b"), wv((30, 10, 4), "c"), wv((30, 10, 5), "d"), wv((1, 1), "e")]
    lsh = {cluster_key(c) for c in lsh_cluster(vectors, 0.75)}
    brute = {cluster_key(c) for c in brute_force_cluster(vectors, 0.75)}
    assert lsh == brute
    assert len(lsh) == 2


def test_cluster_pairs_are_edges():
    vectors = [wv(V1, "a"), wv(V2, "b")]
    (c,) = lsh_cluster(vectors, 0.75)
    assert c.pairs == ((0, 1),)
    assert c.threshold == pytest.approx(math.sqrt(8.5))


@pytest.mark.parametrize("s", [0.5, 0.69, 1.01])
def test_lsh_rejects_similarity_outside_range(s):
    with pytest.raises(ValueError):
        lsh_cluster([wv(V1), wv(V2)], s)


def test_lsh_is_deterministic():
    vectors = [wv((i % 5, i % 3, 4, i % 7), str(i)) for i in range(30)]
    first = [cluster_key(c) for c in lsh_cluster(vectors, 0.8, seed=3)]
    second = [cluster_key(c) for c in lsh_cluster(vectors, 0.8, seed=3)]
    assert first == second


def test_empty_and_singleton_inputs():
    assert lsh_cluster([], 0.8) == []
    assert lsh_cluster([wv(V1)], 0.8) == []
