"""Hypothesis strategies for small C functions in the supported subset."""

from __future__ import annotations

from hypothesis import strategies as st

POINTERS = ("p", "q")
SCALARS = ("n", "m")
LOCALS = ("i", "j", "k", "t")
HEADER = "void f(int *p, int *q, int n, int m)\n{\n    int i, j, k, t;\n"


def _var():
    return st.sampled_from(SCALARS + LOCALS)


@st.composite
def expr(draw, depth: int = 0):
    choice = draw(st.integers(0, 4 if depth < 2 else 1))
    if choice == 0:
        return draw(_var())
    if choice == 1:
        return str(draw(st.integers(0, 9)))
    if choice == 2:
        op = draw(st.sampled_from(["+", "-"]))
        return f"{draw(expr(depth + 1))} {op} {draw(expr(depth + 1))}"
    if choice == 3:
        return f"{draw(st.integers(1, 3))} * {draw(_var())}"
    return f"{draw(st.sampled_from(POINTERS))}[{draw(expr(depth + 1))}]"


@st.composite
def condition(draw):
    op = draw(st.sampled_from(["<", "<=", ">", ">=", "==", "!="]))
    return f"{draw(_var())} {op} {draw(expr(1))}"


@st.composite
def statement(draw, depth: int = 0):
    kind = draw(st.integers(0, 5 if depth < 2 else 2))
    pad = "    " * (depth + 1)
    if kind == 0:
        return f"{pad}{draw(st.sampled_from(LOCALS))} = {draw(expr())};\n"
    if kind == 1:
        return f"{pad}{draw(st.sampled_from(POINTERS))}[{draw(expr(1))}] = {draw(expr())};\n"
    if kind == 2:
        return f"{pad}{draw(st.sampled_from(LOCALS))}++;\n"
    body = "".join(draw(st.lists(statement(depth + 1), min_size=1, max_size=3)))
    if kind == 3:
        v = draw(st.sampled_from(LOCALS))
        return f"{pad}for ({v} = 0; {v} < {draw(st.sampled_from(SCALARS))}; {v}++) {{\n{body}{pad}}}\n"
    if kind == 4:
        return f"{pad}while ({draw(condition())}) {{\n{body}{pad}}}\n"
    return f"{pad}if ({draw(condition())}) {{\n{body}{pad}}}\n"


def function_source(statements: list[str]) -> str:
    return HEADER + "".join(statements) + "}\n"


functions = st.lists(statement(), min_size=1, max_size=5).map(function_source)
statement_lists = st.lists(statement(), min_size=1, max_size=5)
