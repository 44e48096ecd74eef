from __future__ import annotations

import pytest

from clone_lattice.errors import PointerNotInFunction
from clone_lattice.frontend import PointerDecl, SourceSpan
from clone_lattice.taint import build_dependency_graph, related_sets, taint_pointer

from conftest import FIXTURES, function, parse_one
from clone_lattice.pipeline import find_pointer


def related(func: str, pointer: str):
    t = function(FIXTURES, func)
    return taint_pointer(build_dependency_graph(t), find_pointer(t, pointer))


def short(names):
    return {n.split("->")[-1] for n in names}


@pytest.mark.parametrize(
    "func, pointer, expected",
    [
        ("mgau_eval", "active", {"j"}),
        ("lextree_hmm_histbin", "list", {"i", "n_active"}),
        ("fe_spec_loop1", "IN", {"wrap", "j", "data_len"}),
        ("fe_spec_loop2", "IN", {"j", "fftsize"}),
    ],
)
def test_fixture_related_sets(func, pointer, expected):
    assert short(related(func, pointer).variables) == expected


def test_roles_distinguish_index_and_bound():
    r = related("lextree_hmm_histbin", "list")
    assert r.roles == {"i": "index", "lextree->n_active": "bound"}


def test_field_pointer_sets():
    assert set(related("dict2pid_dump", "mdef->sseq").variables) == {"i", "j", "mdef->n_sseq", "mdef->n_emit_state"}
    assert set(related("gc_compute_closest_cw", "gs->codeword").variables) == {"codeid", "cid", "gs->n_code", "gs->n_featlen"}


def test_indirect_index_flows_through_assignment():
    r = related("mgau_eval", "x")
    assert {"c", "active", "j"} <= set(r.variables)
    assert r.roles["c"] == "index"


def test_edges_are_labelled():
    g = build_dependency_graph(function(FIXTURES, "mgau_eval"))
    edges = g.edge_set()
    assert ("j", "active", "array-index") in edges
    assert ("active", "c", "assignment") in edges
    assert ("j", "c", "control") in edges
    assert {label for _, _, label in edges} <= {"array-index", "assignment", "call-argument", "control"}


def test_dot_output():
    dot = build_dependency_graph(function(FIXTURES, "mgau_eval")).to_dot()
    assert dot.startswith('digraph "mgau_eval"')
    assert '"j" -> "active" [label="array-index"];' in dot


def test_unrelated_scalars_stay_out():
    t = parse_one("void f(int *p, int n, int junk) { int i, t; t = junk * 2; for (i = 0; i < n; i++) p[i] = 0; }")
    r = taint_pointer(build_dependency_graph(t), find_pointer(t, "p"))
    assert set(r.variables) == {"i", "n"}


def test_call_argument_edge():
    t = parse_one("void f(int *p, int n) { int k; k = clamp(n); p[k] = 1; }")
    g = build_dependency_graph(t)
    assert any(label == "call-argument" for _, _, label in g.edge_set())
    r = taint_pointer(g, find_pointer(t, "p"))
    assert {"k", "n"} <= set(r.variables)


def test_related_sets_cover_every_pointer():
    t = function(FIXTURES, "fe_spec_loop1")
    assert [r.pointer.name for r in related_sets(t)] == ["IN", "data"]


def test_foreign_pointer_rejected():
    t = parse_one("void f(int *p) { p[0] = 1; }")
    ghost = PointerDecl("q", "other", "int", True, SourceSpan("t.c", 1, 1, 1, 2))
    with pytest.raises(PointerNotInFunction):
        taint_pointer(build_dependency_graph(t), ghost)
