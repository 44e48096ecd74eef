"""End-to-end run over a corpus directory and the JSON report."""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterator, Optional, Union

from . import __version__
from .detector import CloneCluster, WeightedVector, lsh_cluster, vectorize
from .errors import CSyntaxError, EmptyCorpus, EmptySlice, PointerNotInFunction
from .feedback import FeedbackConfig, FeedbackResult, VerdictKind, run_until_convergence
from .frontend import AstTree, PointerDecl, enumerate_pointers, parse_translation_unit
from .slicer import PointerSlice, isolate
from .taint import build_dependency_graph, taint_pointer

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"


@dataclass(frozen=True)
class PipelineConfig:
    corpus: Path
    similarity: float = 0.80
    min_tokens: int = 20
    report: Optional[Path] = None
    slicing: bool = True
    seed: int = 42
    unroll_bound: int = 2
    domain_radius: int = 64
    max_iterations: int = 64
    delta_init: float = 2.0
    sample_k: int = 2
    stride: Optional[int] = None  # accepted for parity, unused

    def __post_init__(self) -> None:
        if not 0.70 <= self.similarity <= 1.0:
            raise ValueError(f"similarity must be within 0.70..1.00, got {self.similarity}")
        if self.min_tokens < 0:
            raise ValueError("min_tokens must be nonnegative")
        if self.unroll_bound < 1:
            raise ValueError("unroll_bound must be at least 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.delta_init <= 1.0:
            raise ValueError("delta_init must exceed 1.0")
        if self.sample_k < 1:
            raise ValueError("sample_k must be at least 1")

    def echo(self) -> dict[str, Any]:
        return {
            "corpus": str(self.corpus),
            "similarity": self.similarity,
            "min_tokens": self.min_tokens,
            "slicing": self.slicing,
            "seed": self.seed,
            "unroll_bound": self.unroll_bound,
            "domain_radius": self.domain_radius,
            "max_iterations": self.max_iterations,
            "delta_init": self.delta_init,
            "sample_k": self.sample_k,
            "stride": self.stride,
        }


@dataclass(frozen=True)
class FunctionUnit:
    """A whole function standing in for a slice when slicing is disabled."""

    slice_tree: AstTree
    origin: str

    @property
    def slice_id(self) -> str:
        return f"{self.slice_tree.file}:{self.origin}"

    @property
    def line_range(self) -> tuple[int, int]:
        sp = self.slice_tree.root.span
        return sp.line_start, sp.line_end


@dataclass
class ParsedCorpus:
    root: Path
    trees: list[AstTree]
    errors: list[dict[str, Any]]
    files: list[str]


@dataclass
class Report:
    config: dict[str, Any]
    files: list[str]
    errors: list[dict[str, Any]]
    stats: dict[str, Any]
    clusters: list[dict[str, Any]]
    convergence: list[dict[str, Any]]
    verdicts: list[dict[str, Any]]
    slices_per_function: dict[str, int] = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION
    tool_version: str = __version__

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


# -- corpus -----------------------------------------------------------------------


def corpus_files(corpus: Path) -> list[Path]:
    if corpus.is_file():
        return [corpus]
    if not corpus.is_dir():
        raise EmptyCorpus(f"corpus {corpus} does not exist")
    return sorted(p for p in corpus.rglob("*.c") if p.is_file())


def _relative(path: Path, root: Path) -> str:
    base = root if root.is_dir() else root.parent
    try:
        return path.relative_to(base).as_posix()
    except ValueError:
        return path.as_posix()


def parse_corpus(corpus: Path) -> ParsedCorpus:
    corpus = Path(corpus)
    files = corpus_files(corpus)
    trees: list[AstTree] = []
    errors: list[dict[str, Any]] = []
    parsed: list[str] = []
    for path in files:
        rel = _relative(path, corpus)
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
            trees.extend(parse_translation_unit(text, rel))
            parsed.append(rel)
        except CSyntaxError as exc:
            log.warning("skipping %s: %s", rel, exc.reason)
            errors.append({"file": rel, "line": exc.line, "col": exc.col, "message": exc.reason})
    if not parsed:
        raise EmptyCorpus(f"no parseable C files under {corpus}")
    return ParsedCorpus(corpus, trees, errors, parsed)


def function_slices(ast: AstTree) -> Iterator[PointerSlice]:
    """One slice per pointer of ``ast``; unused pointers are skipped."""
    graph = build_dependency_graph(ast)
    for pointer in enumerate_pointers(ast):
        try:
            related = taint_pointer(graph, pointer)
            yield isolate(ast, pointer, related)
        except (EmptySlice, PointerNotInFunction) as exc:
            log.debug("no slice for %s: %s", pointer.name, exc)


def find_pointer(ast: AstTree, name: str) -> PointerDecl:
    for p in enumerate_pointers(ast):
        if p.name == name:
            return p
    raise PointerNotInFunction(f"{name} is not a pointer in {ast.function_name}")


def units_for(trees: list[AstTree], slicing: bool) -> list[Union[PointerSlice, FunctionUnit]]:
    units: list[Union[PointerSlice, FunctionUnit]] = []
    for ast in trees:
        if slicing:
            units.extend(function_slices(ast))
        else:
            units.append(FunctionUnit(ast, ast.function_name))
    return units


def build_vectors(units, min_tokens: int) -> list[WeightedVector]:
    out = []
    for u in units:
        if u.slice_tree.token_count < min_tokens:
            continue
        out.append(WeightedVector.of(vectorize(u.slice_tree, u)))
    return out


# -- report -----------------------------------------------------------------------


def _member(v: WeightedVector) -> dict[str, Any]:
    unit = v.base.slice_ref
    start, end = unit.line_range
    pointer = unit.pointer.name if isinstance(unit, PointerSlice) else None
    return {
        "slice_id": unit.slice_id,
        "function": unit.origin,
        "pointer": pointer,
        "span": {"file": unit.slice_tree.file, "line_start": start, "line_end": end},
        "size": v.base.size,
        "tokens": unit.slice_tree.token_count,
    }


def _cluster_entry(i: int, c: CloneCluster) -> dict[str, Any]:
    members = sorted((_member(m) for m in c.members), key=lambda m: m["slice_id"])
    ids = [m.base.slice_ref.slice_id for m in c.members]
    pairs = sorted(sorted((ids[a], ids[b])) for a, b in c.pairs)
    return {
        "id": i,
        "similarity": c.similarity,
        "threshold": round(c.threshold, 12),
        "members": members,
        "pairs": pairs,
    }


def _sorted_clusters(clusters: list[CloneCluster]) -> list[dict[str, Any]]:
    entries = [_cluster_entry(0, c) for c in clusters]
    entries.sort(key=lambda e: [m["slice_id"] for m in e["members"]])
    for i, e in enumerate(entries):
        e["id"] = i
    return entries


def _slice_counts(units) -> dict[str, int]:
    counts: dict[str, int] = {}
    for u in units:
        key = f"{u.slice_tree.file}:{u.origin}"
        counts[key] = counts.get(key, 0) + 1
    return counts


def run_pipeline(config: PipelineConfig) -> Report:
    corpus = parse_corpus(Path(config.corpus))
    units = units_for(corpus.trees, config.slicing)
    vectors = build_vectors(units, config.min_tokens)
    log.info("%d functions, %d units, %d vectors", len(corpus.trees), len(units), len(vectors))
    result: Optional[FeedbackResult] = None
    if config.slicing:
        fcfg = FeedbackConfig(
            similarity=config.similarity,
            max_iterations=config.max_iterations,
            seed=config.seed,
            delta_init=config.delta_init,
            sample_k=config.sample_k,
            unroll_bound=config.unroll_bound,
            domain_radius=config.domain_radius,
            min_tokens=config.min_tokens,
        )
        result = run_until_convergence(vectors, fcfg)
        initial, final = result.initial_clusters, result.clusters
    else:
        initial = final = lsh_cluster(vectors, config.similarity, config.min_tokens, config.seed)
    stats: dict[str, Any] = {
        "functions": len(corpus.trees),
        "units": len(units),
        "vectors": len(vectors),
        "initial_clusters": len(initial),
        "final_clusters": len(final),
        "clone_pairs": sum(len(c.pairs) for c in final),
    }
    convergence: list[dict[str, Any]] = []
    verdicts: list[dict[str, Any]] = []
    if result is not None:
        observed = result.false_positives
        remaining = result.remaining_false_positives()
        stuck = observed & result.non_separable
        stats.update(
            {
                "iterations": len(result.log),
                "pairs_verified": len(result.verdicts),
                "true_clones": sum(1 for v in result.verdicts.values() if v.kind == VerdictKind.TrueClone),
                "false_positives_observed": len(observed),
                "false_positives_eliminated": len(observed) - len(remaining) - len(stuck),
                "false_positives_remaining": len(remaining),
                "skipped": len(result.skipped),
                "non_separable": len(result.non_separable),
                "elimination_pct": (
                    100.0 * (len(observed) - len(remaining) - len(stuck)) / len(observed) if observed else None
                ),
            }
        )
        convergence = [asdict(s) for s in result.log.iterations]
        for (a, b), v in sorted(result.verdicts.items()):
            ida = result.vectors[a].base.slice_ref.slice_id
            idb = result.vectors[b].base.slice_ref.slice_id
            verdicts.append({"a": ida, "b": idb, "verdict": v.kind.value, "reason": v.reason})
        verdicts.sort(key=lambda d: (d["a"], d["b"]))
    return Report(
        config=config.echo(),
        files=corpus.files,
        errors=corpus.errors,
        stats=stats,
        clusters=_sorted_clusters(final),
        convergence=convergence,
        verdicts=verdicts,
        slices_per_function=_slice_counts(units),
    )


def emit_report(report: Report, path: Optional[Union[str, Path]] = None) -> None:
    text = report.to_json()
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
