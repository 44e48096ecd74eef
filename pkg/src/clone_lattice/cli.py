"""Command-line entry point: ``clone-lattice {analyze,slice,vectors,verify}``.

Exit status is 0 on success, 2 for usage or corpus problems and 1 for
anything unexpected.  ``CLONE_LATTICE_LOG`` sets the log level.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .constraints import match_variables, simplify
from .detector import vectorize
from .errors import CloneLatticeError, CSyntaxError, EmptyCorpus, NoMatching, PointerNotInFunction
from .feedback import verify_pair
from .frontend import parse_translation_unit
from .pipeline import PipelineConfig, emit_report, find_pointer, function_slices, parse_corpus, run_pipeline
from .slicer import annotate, isolate
from .symexec import symbolic_execute
from .taint import build_dependency_graph, taint_pointer

log = logging.getLogger("clone_lattice")


class UsageError(Exception):
    pass


def _similarity(text: str) -> float:
    value = float(text)
    if not 0.70 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"similarity must be within 0.70..1.00, got {value}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return value


def _delta(text: str) -> float:
    value = float(text)
    if value <= 1.0:
        raise argparse.ArgumentTypeError("delta must exceed 1.0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clone-lattice", description="Pointer-sliced clone detection with bound-constraint verification."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="detect and verify clones in a corpus")
    an.add_argument("--corpus", type=Path, required=True, help="directory of .c files (or one file)")
    an.add_argument("--similarity", type=_similarity, default=0.80)
    an.add_argument("--min-tokens", type=_nonnegative, default=20)
    an.add_argument("--report", type=Path, default=None, help="write JSON here instead of stdout")
    an.add_argument("--no-slicing", action="store_true", help="cluster whole functions, no verification")
    an.add_argument("--seed", type=int, default=42)
    an.add_argument("--unroll-bound", type=_positive, default=2)
    an.add_argument("--domain-radius", type=_positive, default=64)
    an.add_argument("--max-iterations", type=_positive, default=64)
    an.add_argument("--delta-init", type=_delta, default=2.0)
    an.add_argument("--sample-k", type=_positive, default=2)
    an.add_argument("--stride", type=int, default=None, help="accepted for compatibility; ignored")

    sl = sub.add_parser("slice", help="print pointer slices with original line numbers")
    sl.add_argument("file", type=Path)
    sl.add_argument("--function", default=None)
    sl.add_argument("--pointer", default=None)
    sl.add_argument("--dot", action="store_true", help="print the dependency graph as DOT instead")

    vc = sub.add_parser("vectors", help="print characteristic vectors of every slice")
    vc.add_argument("--corpus", type=Path, required=True)
    vc.add_argument("--min-tokens", type=_nonnegative, default=0)

    vf = sub.add_parser("verify", help="compare the bound constraints of two slices")
    vf.add_argument("left", help="FILE:FUNCTION:POINTER")
    vf.add_argument("right", help="FILE:FUNCTION:POINTER")
    vf.add_argument("--unroll-bound", type=_positive, default=2)
    vf.add_argument("--domain-radius", type=_positive, default=64)
    return parser


def _trees(path: Path):
    if not path.is_file():
        raise UsageError(f"{path} is not a file")
    return parse_translation_unit(path.read_text(encoding="utf-8", errors="replace"), path.as_posix())


def cmd_analyze(args: argparse.Namespace) -> int:
    config = PipelineConfig(
        corpus=args.corpus,
        similarity=args.similarity,
        min_tokens=args.min_tokens,
        report=args.report,
        slicing=not args.no_slicing,
        seed=args.seed,
        unroll_bound=args.unroll_bound,
        domain_radius=args.domain_radius,
        max_iterations=args.max_iterations,
        delta_init=args.delta_init,
        sample_k=args.sample_k,
        stride=args.stride,
    )
    report = run_pipeline(config)
    emit_report(report, args.report)
    return 0


def cmd_slice(args: argparse.Namespace) -> int:
    source_lines = args.file.read_text(encoding="utf-8", errors="replace").splitlines() if args.file.is_file() else []
    trees = [t for t in _trees(args.file) if args.function in (None, t.function_name)]
    if not trees:
        raise UsageError(f"no function {args.function!r} in {args.file}")
    out = sys.stdout
    for ast in trees:
        if args.dot:
            out.write(build_dependency_graph(ast).to_dot())
            continue
        for slc in function_slices(ast):
            if args.pointer in (None, slc.pointer.name):
                out.write(annotate(slc, source_lines))
                out.write("\n")
    return 0


def cmd_vectors(args: argparse.Namespace) -> int:
    corpus = parse_corpus(args.corpus)
    for ast in corpus.trees:
        for slc in function_slices(ast):
            if slc.slice_tree.token_count < args.min_tokens:
                continue
            v = vectorize(slc.slice_tree)
            counts = ",".join(str(c) for c in v.counts)
            sys.stdout.write(f"{slc.slice_id}\tsize={v.size}\ttokens={slc.slice_tree.token_count}\t<{counts}>\n")
    return 0


def _locate(target: str):
    parts = target.rsplit(":", 2)
    if len(parts) != 3:
        raise UsageError(f"expected FILE:FUNCTION:POINTER, got {target!r}")
    file, function, pointer = parts
    for ast in _trees(Path(file)):
        if ast.function_name == function:
            ptr = find_pointer(ast, pointer)
            return isolate(ast, ptr, taint_pointer(build_dependency_graph(ast), ptr))
    raise UsageError(f"no function {function!r} in {file}")


def cmd_verify(args: argparse.Namespace) -> int:
    a, b = _locate(args.left), _locate(args.right)
    for label, slc in (("left", a), ("right", b)):
        sys.stdout.write(f"[{label}] {slc.slice_id}\n")
        try:
            sys.stdout.write(simplify(symbolic_execute(slc, args.unroll_bound)).to_text())
        except CloneLatticeError as exc:
            sys.stdout.write(f"  ({type(exc).__name__}: {exc})\n")
    try:
        m = match_variables(
            simplify(symbolic_execute(a, args.unroll_bound)), simplify(symbolic_execute(b, args.unroll_bound))
        )
        for x, y in m.pairs:
            sys.stdout.write(f"  {x} <-> {y}\n")
    except (NoMatching, CloneLatticeError):
        pass
    verdict = verify_pair(a, b, args.unroll_bound, args.domain_radius)
    reason = f" ({verdict.reason})" if verdict.reason else ""
    sys.stdout.write(f"verdict: {verdict.kind.value}{reason}\n")
    return 0


COMMANDS = {"analyze": cmd_analyze, "slice": cmd_slice, "vectors": cmd_vectors, "verify": cmd_verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    level = os.environ.get("CLONE_LATTICE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, EmptyCorpus, PointerNotInFunction, CSyntaxError, ValueError, OSError) as exc:
        sys.stderr.write(f"clone-lattice: error: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        sys.stderr.write(f"clone-lattice: internal error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
