from __future__ import annotations

import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from clone_lattice import corpus_path
from clone_lattice.frontend import AstTree, parse_translation_unit
from clone_lattice.pipeline import find_pointer
from clone_lattice.slicer import PointerSlice, isolate
from clone_lattice.taint import build_dependency_graph, taint_pointer

settings.register_profile("deep", max_examples=1500, deadline=None, suppress_health_check=list(HealthCheck))
if os.environ.get("CLONE_LATTICE_DEEP"):
    settings.load_profile("deep")

MICRO = corpus_path("micro")
FP_SEEDED = corpus_path("fp_seeded")
FIXTURES = MICRO / "fixtures.c"


def parse_one(source: str, file: str = "t.c") -> AstTree:
    trees = parse_translation_unit(source, file)
    assert len(trees) == 1
    return trees[0]


def function(path: Path, name: str) -> AstTree:
    for t in parse_translation_unit(path.read_text(), path.name):
        if t.function_name == name:
            return t
    raise KeyError(name)


def slice_of(tree: AstTree, pointer: str) -> PointerSlice:
    ptr = find_pointer(tree, pointer)
    return isolate(tree, ptr, taint_pointer(build_dependency_graph(tree), ptr))


def fixture_slice(func: str, pointer: str) -> PointerSlice:
    return slice_of(function(FIXTURES, func), pointer)


def source_slice(source: str, pointer: str) -> PointerSlice:
    return slice_of(parse_one(source), pointer)


@pytest.fixture(scope="session")
def fixtures_path() -> Path:
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
