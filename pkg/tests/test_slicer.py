from __future__ import annotations

import pytest

from clone_lattice.detector import vectorize
from clone_lattice.errors import EmptySlice
from clone_lattice.frontend import NodeKind, unparse
from clone_lattice.slicer import annotate, iter_statements

from conftest import FIXTURES, fixture_slice, function, parse_one, slice_of, source_slice

INTERTWINED = """void f(int *a, int *b, int n, int m)
{
    int i, k;
    for (i = 0; i < n; i++)
        a[i] = 0;
    k = m - 1;
    while (k >= 0) {
        b[k] = 1;
        k--;
    }
}
"""


def test_mgau_slice_vector():
    slc = fixture_slice("mgau_eval", "active")
    v = vectorize(slc.slice_tree)
    assert v.counts[:9] == (7, 2, 2, 2, 0, 1, 1, 1, 1)
    assert sum(v.counts[:9]) == 17


def test_slice_root_is_function_with_pointer_param():
    slc = fixture_slice("mgau_eval", "active")
    root = slc.slice_tree.root
    assert root.kind == NodeKind.FunctionDef
    params = [c for c in root.children if c.kind == NodeKind.Param]
    assert [p.text for p in params] == ["active"]
    assert NodeKind.Compound not in [c.kind for c in root.children if c.kind != NodeKind.For]


def test_slice_separates_intertwined_pointers():
    a = unparse(source_slice(INTERTWINED, "a").slice_tree.root)
    b = unparse(source_slice(INTERTWINED, "b").slice_tree.root)
    assert "a[i]" in a and "b[k]" not in a and "while" not in a
    assert "b[k]" in b and "a[i]" not in b and "for" not in b


def test_slice_keeps_bound_definitions():
    text = unparse(source_slice(INTERTWINED, "b").slice_tree.root)
    assert "k = (m - 1);" in text


def test_slice_is_subset_of_function():
    tree = function(FIXTURES, "gc_compute_closest_cw")
    whole = vectorize(tree).counts
    for ptr in ("gs->codeword", "feat"):
        part = vectorize(slice_of(tree, ptr).slice_tree).counts
        assert all(p <= w for p, w in zip(part, whole))


def test_slice_identity_and_lines():
    slc = fixture_slice("mgau_eval", "active")
    assert slc.slice_id == "fixtures.c:mgau_eval:active"
    assert slc.origin == "mgau_eval"
    assert slc.line_range == (7, 13)


def test_annotate_uses_original_lines():
    slc = fixture_slice("mgau_eval", "active")
    text = annotate(slc, FIXTURES.read_text().splitlines())
    lines = text.splitlines()
    assert lines[0].startswith("// slice mgau_eval :: active")
    numbers = [int(l.split()[0]) for l in lines[1:] if l.strip()]
    assert numbers == [7, 10, 11]
    assert "score" not in text


def test_unused_pointer_is_empty_slice():
    with pytest.raises(EmptySlice):
        source_slice("void f(int *p, int n) { int *q; p[0] = n; }", "q")


def test_token_count_is_smaller_than_function():
    tree = function(FIXTURES, "mgau_eval")
    slc = slice_of(tree, "active")
    assert 0 < slc.slice_tree.token_count < tree.token_count


def test_iter_statements_paths_are_unique():
    tree = parse_one(INTERTWINED)
    paths = [p for p, _ in iter_statements(tree.root)]
    assert len(paths) == len(set(paths))
