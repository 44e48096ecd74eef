from __future__ import annotations

import pytest

from clone_lattice.constraints import Verdict, check_equivalence, simplify
from clone_lattice.errors import PathLimitExceeded, UnsupportedConstruct
from clone_lattice.symexec import int_literal, symbolic_execute

from conftest import fixture_slice, source_slice


def constraints(source: str, pointer: str = "p", **kw):
    return simplify(symbolic_execute(source_slice(source, pointer), **kw))


def test_counted_loop():
    text = constraints("void f(int *p, int n) { int i; for (i = 0; i < n; i++) p[i] = 0; }").to_text()
    assert text == "0 <= i && i < len(p) && i < n\n"


def test_guard_conjunction():
    text = constraints("void f(int *p, int i, int n) { if (i < n && i >= 0) p[i] = 1; }").to_text()
    assert text == "0 <= i && i < len(p) && i < n\n"


def test_pointer_walk_uses_offset_term():
    text = constraints("void f(int *p, int n) { while (n > 0) { *p = 0; p++; n--; } }").to_text()
    assert "off(p)" in text and "len(p)" in text


def test_multiple_accesses_collapse_to_tightest():
    text = constraints("void f(int *p, int i) { p[i] = 1; p[i + 3] = 2; }").to_text()
    assert text == "0 <= i && i <= len(p) - 4\n"


def test_nonlinear_index_is_unsupported():
    with pytest.raises(UnsupportedConstruct):
        constraints("void f(int *p, int i, int n) { p[i * n] = 1; }")


def test_path_limit():
    params = ", ".join(f"int a{k}" for k in range(8))
    body = " ".join(f"if (a{k} > 0) p[{k}] = 1;" for k in range(8))
    source = f"void f(int *p, {params}) {{ {body} }}"
    with pytest.raises(PathLimitExceeded):
        constraints(source)
    assert len(symbolic_execute(source_slice(source, "p"), max_paths=1000).paths) > 64


def test_unroll_bound_must_be_positive():
    with pytest.raises(ValueError):
        constraints("void f(int *p) { p[0] = 1; }", unroll_bound=0)


def test_nested_dereference_levels():
    cs = simplify(symbolic_execute(fixture_slice("dict2pid_dump", "mdef->sseq")))
    names = set(cs.atom_variables())
    assert {"len(mdef->sseq)", "len(*mdef->sseq)"} <= names


def test_shifted_access_differs_from_plain():
    a = constraints("void f(int *p, int n) { int i; for (i = 0; i < n; i++) p[i] = 0; }")
    b = constraints("void f(int *p, int n) { int i; for (i = 0; i < n; i++) p[i + 1] = 0; }")
    assert check_equivalence(a, b) == Verdict.NotEquivalent


def test_renamed_loop_is_equivalent():
    a = constraints("void f(int *p, int n) { int i; for (i = 0; i < n; i++) p[i] = 0; }")
    b = source_slice("void g(int *q, int m) { int k; for (k = 0; k < m; k++) q[k] = 7; }", "q")
    assert check_equivalence(a, simplify(symbolic_execute(b))) == Verdict.Equivalent


@pytest.mark.parametrize("text, value", [("0", 0), ("42", 42), ("0x10", 16), ("7u", 7), ("'a'", 97), ("1.5", None)])
def test_int_literal(text, value):
    assert int_literal(text) == value
