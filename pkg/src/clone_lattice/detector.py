"""Characteristic vectors, tree similarity and LSH clustering.

Candidate pairs come from p-stable random projections; every candidate is
then checked exactly against the pairwise threshold, so the final clusters
are the same as those of a brute-force single-linkage pass.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch
from .frontend import NUM_KINDS, AstNode, AstTree

log = logging.getLogger(__name__)

NUM_PROJECTIONS = 4


@dataclass(frozen=True)
class FeatureVector:
    counts: tuple[int, ...]
    size: int
    slice_ref: Any = field(default=None, compare=False, hash=False)

    @classmethod
    def from_counts(cls, counts: Sequence[int], slice_ref: Any = None) -> "FeatureVector":
        counts = tuple(int(c) for c in counts)
        if len(counts) < NUM_KINDS:
            counts = counts + (0,) * (NUM_KINDS - len(counts))
        return cls(counts, sum(counts), slice_ref)


@dataclass(frozen=True)
class WeightedVector:
    base: FeatureVector
    weighted: tuple[float, ...]
    provenance: tuple[Any, ...] = ()

    @classmethod
    def of(cls, base: FeatureVector) -> "WeightedVector":
        return cls(base, tuple(float(c) for c in base.counts))

    @property
    def size(self) -> int:
        return self.base.size

    def array(self) -> np.ndarray:
        return np.asarray(self.weighted, dtype=float)


@dataclass(frozen=True)
class CloneCluster:
    members: tuple[WeightedVector, ...]
    similarity: float
    threshold: float  # threshold at the smallest member size
    pairs: tuple[tuple[int, int], ...] = ()  # verified edges, indices into members


# -- vectors and similarity ----------------------------------------------------


def vectorize(tree: AstTree | AstNode, slice_ref: Any = None) -> FeatureVector:
    root = tree.root if isinstance(tree, AstTree) else tree
    counts = [0] * NUM_KINDS
    for node in root.postorder():
        counts[int(node.kind)] += 1
    return FeatureVector(tuple(counts), sum(counts), slice_ref)


def _lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def shared_nodes(t1: AstTree | AstNode, t2: AstTree | AstNode) -> tuple[int, int, int]:
    """(Shared, L, R) from the LCS of post-order kind sequences."""
    s1 = [int(n.kind) for n in (t1.root if isinstance(t1, AstTree) else t1).postorder()]
    s2 = [int(n.kind) for n in (t2.root if isinstance(t2, AstTree) else t2).postorder()]
    shared = _lcs_length(s1, s2)
    return shared, len(s1) - shared, len(s2) - shared


def similarity_from_counts(shared: int, left: int, right: int) -> float:
    denom = 2 * shared + left + right
    return 0.0 if denom == 0 else 2 * shared / denom


def similarity(t1: AstTree | AstNode, t2: AstTree | AstNode) -> float:
    return similarity_from_counts(*shared_nodes(t1, t2))


def _weights(v: WeightedVector | FeatureVector | Sequence[float]) -> np.ndarray:
    if isinstance(v, WeightedVector):
        return v.array()
    if isinstance(v, FeatureVector):
        return np.asarray(v.counts, dtype=float)
    return np.asarray(v, dtype=float)


def _diff(a, b) -> np.ndarray:
    wa, wb = _weights(a), _weights(b)
    if wa.shape != wb.shape:
        raise DimensionMismatch(f"vector lengths differ: {wa.shape[0]} vs {wb.shape[0]}")
    return wa - wb


def euclidean_distance(a, b) -> float:
    return float(np.linalg.norm(_diff(a, b)))


def hamming_distance(a, b) -> float:
    return float(np.abs(_diff(a, b)).sum())


def _size(v) -> int:
    return v.size if isinstance(v, (WeightedVector, FeatureVector)) else int(v)


def cluster_threshold(s: float, a, b) -> float:
    if not 0 < s <= 1:
        raise ValueError(f"similarity must be in (0, 1], got {s}")
    return math.sqrt(max(0.0, 2 * (1 - s)) * min(_size(a), _size(b)))


def is_clone_pair(a: WeightedVector, b: WeightedVector, s: float) -> bool:
    # small tolerance so that distance == threshold stays a clone on float noise
    return euclidean_distance(a, b) <= cluster_threshold(s, a, b) + 1e-9


# -- clustering -----------------------------------------------------------------


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _groups(n: int, edges: list[tuple[int, int]], vectors, s: float) -> list[CloneCluster]:
    uf = _UnionFind(n)
    for i, j in edges:
        uf.union(i, j)
    comps: dict[int, list[int]] = {}
    for i in range(n):
        comps.setdefault(uf.find(i), []).append(i)
    clusters = []
    for idx in sorted(comps.values()):
        if len(idx) < 2:
            continue
        local = {g: k for k, g in enumerate(idx)}
        pairs = tuple(sorted((local[i], local[j]) for i, j in edges if i in local))
        members = tuple(vectors[i] for i in idx)
        thr = cluster_threshold(s, min(m.size for m in members), min(m.size for m in members))
        clusters.append(CloneCluster(members, s, thr, pairs))
    return clusters


def brute_force_pairs(vectors: Sequence[WeightedVector], s: float) -> list[tuple[int, int]]:
    return [
        (i, j)
        for i in range(len(vectors))
        for j in range(i + 1, len(vectors))
        if is_clone_pair(vectors[i], vectors[j], s)
    ]


def brute_force_cluster(vectors: Sequence[WeightedVector], s: float) -> list[CloneCluster]:
    return _groups(len(vectors), brute_force_pairs(vectors, s), list(vectors), s)


def _min_tokens_ok(v: WeightedVector, min_tokens: int) -> bool:
    ref = v.base.slice_ref
    tree = getattr(ref, "slice_tree", ref)
    count = getattr(tree, "token_count", None)
    return count is None or count >= min_tokens


def lsh_candidates(vectors: Sequence[WeightedVector], s: float, seed: int = 0) -> set[tuple[int, int]]:
    """Pairs that share a projection bucket neighbourhood under every projection.

    For query i the probe radius is derived from its own threshold bound
    (T_i >= T(i, j) for every j), so no true clone pair is ever missed.
    """
    n = len(vectors)
    if n < 2:
        return set()
    data = np.stack([v.array() for v in vectors])
    sizes = np.array([v.size for v in vectors], dtype=float)
    rng = np.random.default_rng(seed)
    proj = rng.standard_normal((NUM_PROJECTIONS, data.shape[1]))
    offs = rng.uniform(0.0, 1.0, NUM_PROJECTIONS)
    t_med = math.sqrt(max(0.0, 2 * (1 - s)) * float(np.median(sizes)))
    width = max(t_med, 1.0)
    keys = np.floor(data @ proj.T / width + offs).astype(np.int64)  # n x P
    reach = np.sqrt(max(0.0, 2 * (1 - s)) * sizes) + 1e-9
    norms = np.linalg.norm(proj, axis=1)
    radius = np.ceil(np.outer(reach, norms) / width).astype(np.int64)  # n x P
    cand: set[tuple[int, int]] = set()
    for i in range(n):
        close = np.all(np.abs(keys - keys[i]) <= radius[i] + 1, axis=1)
        for j in np.nonzero(close)[0]:
            if j > i:
                cand.add((i, int(j)))
    return cand


def lsh_cluster(
    vectors: Sequence[WeightedVector], s: float, min_tokens: int = 0, seed: int = 0
) -> list[CloneCluster]:
    if not 0.70 <= s <= 1.0:
        raise ValueError(f"similarity {s} outside the supported range 0.70..1.00")
    vectors = [v for v in vectors if _min_tokens_ok(v, min_tokens)]
    cand = lsh_candidates(vectors, s, seed)
    edges = sorted(p for p in cand if is_clone_pair(vectors[p[0]], vectors[p[1]], s))
    log.debug("lsh: %d vectors, %d candidates, %d verified", len(vectors), len(cand), len(edges))
    return _groups(len(vectors), edges, vectors, s)


def cluster_key(c: CloneCluster) -> frozenset[Optional[str]]:
    return frozenset(getattr(m.base.slice_ref, "slice_id", id(m)) for m in c.members)
