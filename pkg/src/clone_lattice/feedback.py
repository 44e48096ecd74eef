"""Verification-driven reweighting of characteristic vectors.

Sampled clone pairs are checked with the constraint engine.  A false positive
has its differing dimensions inflated until the pair falls outside the
clustering threshold; a confirmed clone has its uncommon nodes removed so the
pair collapses to its shared core.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from .constraints import DEFAULT_RADIUS, Verdict, check_equivalence, match_variables, simplify
from .detector import (
    CloneCluster,
    WeightedVector,
    cluster_threshold,
    euclidean_distance,
    is_clone_pair,
    lsh_cluster,
    vectorize,
)
from .errors import DomainTooLarge, NoMatching, NonSeparable, UnsupportedConstruct
from .frontend import AstNode, AstTree
from .slicer import PointerSlice
from .symexec import symbolic_execute

log = logging.getLogger(__name__)

DELTA_MAX = 1024.0


class VerdictKind(enum.Enum):
    TrueClone = "TrueClone"
    FalsePositive = "FalsePositive"
    Skipped = "Skipped"


@dataclass(frozen=True)
class PairVerdict:
    kind: VerdictKind
    reason: str = ""

    @property
    def is_fp(self) -> bool:
        return self.kind == VerdictKind.FalsePositive


TrueClone = PairVerdict(VerdictKind.TrueClone)
FalsePositive = PairVerdict(VerdictKind.FalsePositive)


@dataclass(frozen=True)
class FeedbackRecord:
    pair: tuple[str, str]
    verdict: VerdictKind
    touched_dims: tuple[int, ...]
    delta: float
    iteration: int

    def __post_init__(self) -> None:
        if self.delta <= 1.0:
            raise ValueError("delta must exceed 1.0")
        if bool(self.touched_dims) != (self.verdict == VerdictKind.FalsePositive):
            raise ValueError("touched_dims must be nonempty exactly for false positives")


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    clusters: int
    pairs_verified: int
    fps_eliminated: int
    tps_confirmed: int
    repairs: int = 0


@dataclass
class ConvergenceLog:
    iterations: list[IterationStats] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.iterations)


# -- sampling -----------------------------------------------------------------


def sample_pairs(cluster: CloneCluster, k: int, rng: Optional[random.Random] = None) -> list[tuple[int, int]]:
    """(medoid, farthest) member-index pairs, one per random sub-cluster."""
    n = len(cluster.members)
    if n < 2:
        return []
    if k < 1:
        raise ValueError("k must be at least 1")
    if n == 2:
        return [(0, 1)]
    rng = rng or random.Random(0)
    k = max(1, min(k, n // 2))
    order = list(range(n))
    rng.shuffle(order)
    chunks = [order[i::k] for i in range(k)]
    pairs = []
    for chunk in chunks:
        if len(chunk) < 2:
            continue
        chunk = sorted(chunk)
        dist = {(a, b): euclidean_distance(cluster.members[a], cluster.members[b]) for a in chunk for b in chunk}
        medoid = min(chunk, key=lambda a: (sum(dist[a, b] for b in chunk), a))
        far = max((b for b in chunk if b != medoid), key=lambda b: (dist[medoid, b], -b))
        pairs.append((medoid, far))
    return pairs


# -- verification ---------------------------------------------------------------


def verify_pair(
    a: PointerSlice, b: PointerSlice, unroll_bound: int = 2, radius: int = DEFAULT_RADIUS
) -> PairVerdict:
    try:
        ca = simplify(symbolic_execute(a, unroll_bound))
        cb = simplify(symbolic_execute(b, unroll_bound))
        m = match_variables(ca, cb)
        verdict = check_equivalence(ca, cb, m, radius)
    except NoMatching as exc:
        return PairVerdict(VerdictKind.FalsePositive, f"no variable matching: {exc}")
    except (UnsupportedConstruct, DomainTooLarge) as exc:
        return PairVerdict(VerdictKind.Skipped, f"{type(exc).__name__}: {exc}")
    if verdict == Verdict.Equivalent:
        return TrueClone
    return PairVerdict(VerdictKind.FalsePositive, "bound constraints differ")


# -- feedback -------------------------------------------------------------------


def _lcs_marks(a: Sequence[int], b: Sequence[int]) -> tuple[list[bool], list[bool]]:
    """Which positions of a and b belong to one longest common subsequence."""
    n, m = len(a), len(b)
    # walk from the end so the two roots pair up whenever their kinds agree
    ra, rb = list(reversed(a)), list(reversed(b))
    rev = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            rev[i][j] = rev[i + 1][j + 1] + 1 if ra[i] == rb[j] else max(rev[i + 1][j], rev[i][j + 1])
    ka, kb = [False] * n, [False] * m
    i = j = 0
    while i < n and j < m:
        if ra[i] == rb[j]:
            ka[n - 1 - i] = kb[m - 1 - j] = True
            i += 1
            j += 1
        elif rev[i + 1][j] >= rev[i][j + 1]:
            i += 1
        else:
            j += 1
    return ka, kb


def _prune(node: AstNode, keep: list[bool], counter: list[int]) -> list[AstNode]:
    kids: list[AstNode] = []
    roles: list[str] = []
    for role, c in zip(node.roles, node.children):
        for r in _prune(c, keep, counter):
            kids.append(r)
            roles.append(role)
    idx = counter[0]
    counter[0] += 1
    if keep[idx]:
        return [dataclasses.replace(node, children=tuple(kids), roles=tuple(roles))]
    return kids


def residual_trees(ti: AstTree, tj: AstTree) -> tuple[AstTree, AstTree]:
    """Both trees with every node outside their LCS removed (children spliced up)."""
    si = [int(n.kind) for n in ti.root.postorder()]
    sj = [int(n.kind) for n in tj.root.postorder()]
    ki, kj = _lcs_marks(si, sj)
    return _rebuild(ti, ki), _rebuild(tj, kj)


def _rebuild(tree: AstTree, keep: list[bool]) -> AstTree:
    forest = _prune(tree.root, keep, [0])
    if len(forest) == 1:
        root = forest[0]
    else:
        root = dataclasses.replace(tree.root, children=tuple(forest), roles=tuple("stmt" for _ in forest))
    return dataclasses.replace(tree, root=root)


def _fp_dims(v: WeightedVector) -> set[int]:
    dims: set[int] = set()
    for rec in v.provenance:
        if isinstance(rec, FeedbackRecord) and rec.verdict == VerdictKind.FalsePositive:
            dims.update(rec.touched_dims)
    return dims


def _pair_ids(vi: WeightedVector, vj: WeightedVector) -> tuple[str, str]:
    def ident(v: WeightedVector) -> str:
        ref = v.base.slice_ref
        return str(getattr(ref, "slice_id", ref))

    return ident(vi), ident(vj)


def separate(
    vi: WeightedVector,
    vj: WeightedVector,
    s: float,
    delta_init: float = 2.0,
    delta_max: float = DELTA_MAX,
    iteration: int = 0,
) -> tuple[WeightedVector, WeightedVector]:
    """Inflate the differing dimensions until the pair is no longer a clone pair."""
    ci, cj = vi.base.counts, vj.base.counts
    dims = tuple(t for t in range(len(ci)) if ci[t] != cj[t])
    if not dims:
        raise NonSeparable("vectors have identical counts")
    threshold = cluster_threshold(s, vi.base, vj.base)
    delta = delta_init
    while delta <= delta_max:
        wi, wj = list(vi.weighted), list(vj.weighted)
        for t in dims:
            common = min(ci[t], cj[t])
            if ci[t] > cj[t]:
                wi[t] = max(wi[t], common + (ci[t] - common) * delta)
            else:
                wj[t] = max(wj[t], common + (cj[t] - common) * delta)
        if euclidean_distance(wi, wj) > threshold + 1e-9:
            rec = FeedbackRecord(_pair_ids(vi, vj), VerdictKind.FalsePositive, dims, delta, iteration)
            return (
                WeightedVector(vi.base, tuple(wi), vi.provenance + (rec,)),
                WeightedVector(vj.base, tuple(wj), vj.provenance + (rec,)),
            )
        delta *= 2
    raise NonSeparable(f"pair {_pair_ids(vi, vj)} stays within {threshold:.4f} up to delta {delta_max}")


def collapse(
    vi: WeightedVector, vj: WeightedVector, ti: AstTree, tj: AstTree, iteration: int = 0, delta: float = 2.0
) -> tuple[WeightedVector, WeightedVector]:
    """Replace both overlays by the counts of the shared residual tree."""
    ri, rj = residual_trees(ti, tj)
    res_i, res_j = vectorize(ri).counts, vectorize(rj).counts
    rec = FeedbackRecord(_pair_ids(vi, vj), VerdictKind.TrueClone, (), delta, iteration)

    def fold(v: WeightedVector, residual: tuple[int, ...]) -> WeightedVector:
        locked = _fp_dims(v)
        w = tuple(v.weighted[t] if t in locked else float(residual[t]) for t in range(len(residual)))
        return WeightedVector(v.base, w, v.provenance + (rec,))

    return fold(vi, res_i), fold(vj, res_j)


def apply_feedback(
    vi: WeightedVector,
    vj: WeightedVector,
    ti: AstTree,
    tj: AstTree,
    verdict: PairVerdict | VerdictKind,
    s: float,
    delta_init: float = 2.0,
    delta_max: float = DELTA_MAX,
    iteration: int = 0,
) -> tuple[WeightedVector, WeightedVector]:
    kind = verdict.kind if isinstance(verdict, PairVerdict) else verdict
    if kind == VerdictKind.FalsePositive:
        return separate(vi, vj, s, delta_init, delta_max, iteration)
    if kind == VerdictKind.TrueClone:
        return collapse(vi, vj, ti, tj, iteration, delta_init)
    return vi, vj


# -- the loop -------------------------------------------------------------------


@dataclass(frozen=True)
class FeedbackConfig:
    similarity: float = 0.80
    max_iterations: int = 64
    seed: int = 42
    delta_init: float = 2.0
    delta_max: float = DELTA_MAX
    sample_k: int = 2
    unroll_bound: int = 2
    domain_radius: int = DEFAULT_RADIUS
    min_tokens: int = 0


@dataclass
class FeedbackResult:
    clusters: list[CloneCluster]
    log: ConvergenceLog
    vectors: list[WeightedVector]
    verdicts: dict[tuple[int, int], PairVerdict]
    false_positives: set[tuple[int, int]]
    true_clones: set[tuple[int, int]]
    non_separable: set[tuple[int, int]]
    initial_clusters: list[CloneCluster]
    similarity: float = 1.0

    @property
    def skipped(self) -> set[tuple[int, int]]:
        return {p for p, v in self.verdicts.items() if v.kind == VerdictKind.Skipped}

    def remaining_false_positives(self) -> set[tuple[int, int]]:
        """Separable false positives that are still within the clustering threshold."""
        return {
            (a, b)
            for a, b in self.false_positives - self.non_separable
            if is_clone_pair(self.vectors[a], self.vectors[b], self.similarity)
        }


Verifier = Callable[[Any, Any], PairVerdict]


def run_until_convergence(
    vectors: Sequence[WeightedVector],
    config: FeedbackConfig,
    verifier: Optional[Verifier] = None,
) -> FeedbackResult:
    """Sample, verify, reweight and re-cluster until nothing changes."""
    if config.max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    s = config.similarity
    if verifier is None:
        def verifier(a: PointerSlice, b: PointerSlice) -> PairVerdict:
            return verify_pair(a, b, config.unroll_bound, config.domain_radius)

    current = list(vectors)
    position = {id(v): i for i, v in enumerate(current)}
    verdicts: dict[tuple[int, int], PairVerdict] = {}
    fps: set[tuple[int, int]] = set()
    tps: set[tuple[int, int]] = set()
    stuck: set[tuple[int, int]] = set()
    clog = ConvergenceLog()

    def cluster() -> list[CloneCluster]:
        found = lsh_cluster(current, s, config.min_tokens, config.seed)
        position.clear()
        position.update({id(v): i for i, v in enumerate(current)})
        return found

    clusters = cluster()
    initial = clusters
    for it in range(1, config.max_iterations + 1):
        rng = random.Random(config.seed * 7919 + it)
        sampled: list[tuple[int, int]] = []
        for c in clusters:
            for a, b in sample_pairs(c, config.sample_k, rng):
                ia, ib = position[id(c.members[a])], position[id(c.members[b])]
                sampled.append((min(ia, ib), max(ia, ib)))
        verified = eliminated = confirmed = observed = 0
        for pair in dict.fromkeys(sampled):
            a, b = pair
            if pair not in verdicts:
                verdicts[pair] = verifier(current[a].base.slice_ref, current[b].base.slice_ref)
                verified += 1
                observed += verdicts[pair].kind == VerdictKind.FalsePositive
            verdict = verdicts[pair]
            if verdict.kind == VerdictKind.FalsePositive and pair not in stuck:
                if not is_clone_pair(current[a], current[b], s):
                    continue  # linked only through other members
                fps.add(pair)
                try:
                    current[a], current[b] = separate(
                        current[a], current[b], s, config.delta_init, config.delta_max, it
                    )
                except NonSeparable as exc:
                    log.warning("non-separable pair: %s", exc)
                    stuck.add(pair)
                    continue
                eliminated += 1
            elif verdict.kind == VerdictKind.TrueClone and pair not in tps:
                tps.add(pair)
                confirmed += 1
                ta = current[a].base.slice_ref.slice_tree
                tb = current[b].base.slice_ref.slice_tree
                current[a], current[b] = collapse(current[a], current[b], ta, tb, it, config.delta_init)
        known = {p for p, v in verdicts.items() if v.kind == VerdictKind.FalsePositive} - stuck
        repairs = _repair(current, known, fps, s, config, it)
        clusters = cluster()
        stats = IterationStats(it, len(clusters), verified, eliminated, confirmed, repairs)
        clog.iterations.append(stats)
        log.info(
            "iteration %d: %d clusters, %d pairs verified, %d FPs eliminated, %d TPs confirmed",
            it, stats.clusters, verified, eliminated, confirmed,
        )
        if eliminated == 0 and confirmed == 0 and observed == 0:
            break
    return FeedbackResult(clusters, clog, current, verdicts, fps, tps, stuck, initial, s)


def _repair(
    current: list[WeightedVector],
    known: set[tuple[int, int]],
    fps: set[tuple[int, int]],
    s: float,
    config: FeedbackConfig,
    it: int,
) -> int:
    """Push apart known false positives that later clone feedback pulled back together."""
    repairs = 0
    for _ in range(len(known) + 1):
        again = [p for p in sorted(known) if is_clone_pair(current[p[0]], current[p[1]], s)]
        if not again:
            break
        for a, b in again:
            fps.add((a, b))
            try:
                current[a], current[b] = separate(current[a], current[b], s, config.delta_init, config.delta_max, it)
                repairs += 1
            except NonSeparable:
                known.discard((a, b))
    return repairs
