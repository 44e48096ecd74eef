from __future__ import annotations

import pytest

from clone_lattice.constraints import (
    EQ,
    LE,
    Atom,
    ConstraintSet,
    LinExpr,
    Verdict,
    VariableMatching,
    check_equivalence,
    compare,
    enumerate_equivalent,
    fast_path_equal,
    implies,
    length_term,
    make_atom,
    match_variables,
    satisfiable,
    simplify,
    simplify_path,
)
from clone_lattice.errors import DomainTooLarge, NoMatching

X, Y, N = LinExpr.var("x"), LinExpr.var("y"), LinExpr.var("n")
L = LinExpr.var(length_term("p"))


def atom(lhs, op, rhs):
    a = compare(lhs, op, rhs)
    assert isinstance(a, Atom)
    return a


def cs(paths, roles=None, pointer="p"):
    roles = roles or {}
    names = sorted({v for p in paths for a in p for v in a.variables()})
    return ConstraintSet.make([(v, roles.get(v, "index")) for v in names if "(" not in v], paths, pointer)


def test_strict_comparison_becomes_integer_le():
    a = atom(X, "<", N)
    assert a.op == LE and a.const == 1
    assert str(a) == "x < n"


def test_gcd_normalisation():
    a = atom(X.scale(2), "<=", LinExpr.of(5))
    assert a.terms == (("x", 1),) and a.const == -2  # 2x <= 5  ->  x <= 2


def test_constant_comparisons_fold():
    assert compare(LinExpr.of(1), "<", LinExpr.of(2)) is True
    assert compare(LinExpr.of(3), "==", LinExpr.of(2)) is False
    assert make_atom(X.scale(2) + LinExpr.of(1), EQ) is False


def test_equality_sign_is_canonical():
    assert atom(X, "==", Y) == atom(Y, "==", X)


def test_atom_holds():
    a = atom(X, "<", L)
    assert a.holds({"x": 2, "len(p)": 3})
    assert not a.holds({"x": 3, "len(p)": 3})


def test_satisfiable_and_implies():
    assert satisfiable([atom(X, ">=", LinExpr.of(0)), atom(X, "<", N)])
    assert not satisfiable([atom(X, "<", LinExpr.of(0)), atom(X, ">", LinExpr.of(0))])
    assert implies([atom(X, "<", N), atom(N, "<=", L)], atom(X, "<", L))
    assert not implies([atom(X, "<", N)], atom(X, "<", L))


def test_simplify_path_drops_implied_atoms():
    p = simplify_path([atom(X, "<", N), atom(X, "<", N + LinExpr.of(5)), atom(X, ">=", LinExpr.of(0))])
    assert set(p) == {atom(X, "<", N), atom(X, ">=", LinExpr.of(0))}


def test_simplify_path_rejects_unsat():
    assert simplify_path([atom(X, "<", LinExpr.of(0)), atom(X, ">=", LinExpr.of(1))]) is None


def test_simplify_absorbs_subsumed_paths():
    narrow = [atom(X, ">=", LinExpr.of(0)), atom(X, "<", LinExpr.of(3))]
    wide = [atom(X, ">=", LinExpr.of(0))]
    out = simplify(cs([narrow, wide]))
    assert out.paths == (tuple(wide),)


def test_rename_maps_paths_and_pointer():
    a = cs([[atom(X, "<", N)]], {"n": "bound"})
    r = a.rename({"x": "i", "n": "m", "p": "q"})
    assert r.pointer == "q"
    assert r.paths == ((atom(LinExpr.var("i"), "<", LinExpr.var("m")),),)


def test_match_variables_by_role():
    a = cs([[atom(X, "<", N), atom(X, "<", L)]], {"n": "bound"})
    b = cs(
        [[atom(LinExpr.var("i"), "<", LinExpr.var("m")), atom(LinExpr.var("i"), "<", LinExpr.var("len(q)"))]],
        {"m": "bound"},
        pointer="q",
    )
    m = match_variables(a, b)
    assert ("n", "m") in m.pairs and ("x", "i") in m.pairs and ("len(p)", "len(q)") in m.pairs
    assert check_equivalence(a, b, m) == Verdict.Equivalent


def test_match_variables_role_mismatch():
    a = cs([[atom(X, "<", N)]], {"n": "bound"})
    b = cs([[atom(X, "<", N)]], {"n": "index"})
    with pytest.raises(NoMatching):
        match_variables(a, b)


def test_off_by_one_is_not_equivalent():
    a = cs([[atom(X, ">=", LinExpr.of(0)), atom(X, "<", L)]])
    b = cs([[atom(X, ">=", LinExpr.of(0)), atom(X + LinExpr.of(1), "<", L)]])
    m = VariableMatching((("x", "x"), ("len(p)", "len(p)")))
    assert not fast_path_equal(a, b, m)
    assert check_equivalence(a, b, m) == Verdict.NotEquivalent


def test_semantic_equivalence_without_syntax_match():
    # x < n  versus  x + 1 <= n  are the same atom; x <= n - 1 also
    a = cs([[atom(X, "<", N)]], {"n": "bound"})
    b = cs([[atom(X, "<=", N - LinExpr.of(1))]], {"n": "bound"})
    assert check_equivalence(a, b) == Verdict.Equivalent


def test_enumeration_budget():
    many = [[atom(LinExpr.var(v), "<", N) for v in "abcd"]]
    a = cs(many, {"n": "bound"})
    with pytest.raises(DomainTooLarge):
        enumerate_equivalent(a, a, radius=64)


def test_to_text_is_stable():
    a = cs([[atom(X, "<", N), atom(X, ">=", LinExpr.of(0))]], {"n": "bound"})
    assert a.to_text() == cs([[atom(X, ">=", LinExpr.of(0)), atom(X, "<", N)]], {"n": "bound"}).to_text()
    assert ConstraintSet.make([], []).to_text() == "false\n"


def test_two_variable_lower_bounds_match():
    y1, x1, y2, x2 = (LinExpr.var(v) for v in ("y1", "x1", "y2", "x2"))
    ten, twenty = LinExpr.of(10), LinExpr.of(20)
    a = ConstraintSet.make([("y1", "index"), ("x1", "bound")], [[atom(y1, ">=", ten), atom(x1, ">=", twenty)]])
    b = ConstraintSet.make([("y2", "index"), ("x2", "bound")], [[atom(y2, ">=", ten), atom(x2, ">=", twenty)]])
    m = match_variables(a, b)
    assert m.pairs == (("x1", "x2"), ("y1", "y2"))
    assert check_equivalence(a, b, m) == Verdict.Equivalent


def test_extra_bound_variable_has_no_matching():
    j, i, n = LinExpr.var("j"), LinExpr.var("i"), LinExpr.var("n")
    a = ConstraintSet.make([("j", "index")], [[atom(j, "<", LinExpr.var("len(a)"))]], "a")
    b = ConstraintSet.make([("i", "index"), ("n", "bound")], [[atom(i, "<", n), atom(i, "<", LinExpr.var("len(b)"))]], "b")
    with pytest.raises(NoMatching):
        match_variables(a, b)
