"""Array-bound constraints and their equivalence.

Every atom is kept in one canonical shape, ``sum(c_k * x_k) + k <= 0`` or
``... = 0``, with integer coefficients, variables sorted by name and the gcd
divided out.  Strict comparisons are tightened (``e < 0`` becomes
``e + 1 <= 0``), which is exact over the integers.  A constraint set is a
disjunction of paths, each path a conjunction of atoms.

Length terms are plain variables named ``len(p)`` and ``len(*p)``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DomainTooLarge, NoMatching

log = logging.getLogger(__name__)

LE = "<="
EQ = "=="

DEFAULT_RADIUS = 64
ENUMERATION_BUDGET = 129**3


def length_term(pointer: str, level: int = 1) -> str:
    return f"len({'*' * (level - 1)}{pointer})"


def is_length(name: str) -> bool:
    return name.startswith("len(")


def offset_term(pointer: str) -> str:
    return f"off({pointer})"


def is_pointer_term(name: str) -> bool:
    """Length and offset terms belong to a pointer, not to a program variable."""
    return is_length(name) or name.startswith("off(")


def _term_role(name: str) -> str:
    if is_length(name):
        return "length"
    return "offset" if name.startswith("off(") else "base-offset"


# -- linear expressions --------------------------------------------------------


@dataclass(frozen=True)
class LinExpr:
    """Integer affine expression ``sum(coef * var) + const``."""

    terms: tuple[tuple[str, int], ...] = ()
    const: int = 0

    @staticmethod
    def var(name: str) -> "LinExpr":
        return LinExpr(((name, 1),), 0)

    @staticmethod
    def of(value: int) -> "LinExpr":
        return LinExpr((), int(value))

    @staticmethod
    def build(coeffs: Mapping[str, int], const: int = 0) -> "LinExpr":
        return LinExpr(tuple(sorted((v, c) for v, c in coeffs.items() if c != 0)), const)

    def coeffs(self) -> dict[str, int]:
        return dict(self.terms)

    def is_const(self) -> bool:
        return not self.terms

    def __add__(self, other: "LinExpr") -> "LinExpr":
        out = self.coeffs()
        for v, c in other.terms:
            out[v] = out.get(v, 0) + c
        return LinExpr.build(out, self.const + other.const)

    def __neg__(self) -> "LinExpr":
        return LinExpr(tuple((v, -c) for v, c in self.terms), -self.const)

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        return self + (-other)

    def scale(self, k: int) -> "LinExpr":
        return LinExpr.build({v: c * k for v, c in self.terms}, self.const * k)

    def rename(self, mapping: Mapping[str, str]) -> "LinExpr":
        out: dict[str, int] = {}
        for v, c in self.terms:
            w = mapping.get(v, v)
            out[w] = out.get(w, 0) + c
        return LinExpr.build(out, self.const)

    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.terms)

    def __str__(self) -> str:
        return _render_side(self.terms, self.const) or "0"


def _render_side(terms: Iterable[tuple[str, int]], const: int = 0) -> str:
    parts: list[str] = []
    for v, c in terms:
        mag = abs(c)
        token = v if mag == 1 else f"{mag}*{v}"
        parts.append(("- " if c < 0 else "+ ") + token)
    if const:
        parts.append(("- " if const < 0 else "+ ") + str(abs(const)))
    text = " ".join(parts)
    if text.startswith("+ "):
        text = text[2:]
    elif text.startswith("- "):
        text = "-" + text[2:]
    return text


# -- atoms ---------------------------------------------------------------------

AtomOrTruth = Union["Atom", bool]


@dataclass(frozen=True, order=True)
class Atom:
    """Canonical atomic condition ``expr <= 0`` or ``expr == 0``."""

    terms: tuple[tuple[str, int], ...]
    const: int
    op: str

    @property
    def expr(self) -> LinExpr:
        return LinExpr(self.terms, self.const)

    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.terms)

    def rename(self, mapping: Mapping[str, str]) -> AtomOrTruth:
        return make_atom(self.expr.rename(mapping), self.op)

    def holds(self, env: Mapping[str, int]) -> bool:
        value = self.const + sum(c * env[v] for v, c in self.terms)
        return value <= 0 if self.op == LE else value == 0

    def __str__(self) -> str:
        pos = [(v, c) for v, c in self.terms if c > 0]
        neg = [(v, -c) for v, c in self.terms if c < 0]
        k = self.const
        if self.op == LE and k == 1 and pos and neg:
            return f"{_render_side(pos)} < {_render_side(neg)}"
        if self.op == LE and k == 1 and pos and not neg:
            return f"{_render_side(pos)} < 0"
        if self.op == LE and k == 1 and neg and not pos:
            return f"0 < {_render_side(neg)}"
        op = "<=" if self.op == LE else "=="
        left = _render_side(pos) or "0"
        right = _render_side(neg, -k) or "0"
        return f"{left} {op} {right}"


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def make_atom(expr: LinExpr, op: str) -> AtomOrTruth:
    """Canonical atom for ``expr op 0``; constant comparisons fold to True/False."""
    if op == ">":
        return make_atom(-expr, "<")
    if op == ">=":
        return make_atom(-expr, "<=")
    if op == "<":
        return make_atom(expr + LinExpr.of(1), "<=")
    if op not in (LE, EQ, "="):
        raise ValueError(f"unknown comparison {op!r}")
    if expr.is_const():
        return expr.const <= 0 if op == LE else expr.const == 0
    g = 0
    for _, c in expr.terms:
        g = math.gcd(g, abs(c))
    if op == LE:
        terms = tuple((v, c // g) for v, c in expr.terms)
        return Atom(terms, _ceil_div(expr.const, g), LE)
    if expr.const % g:
        return False
    terms = tuple((v, c // g) for v, c in expr.terms)
    const = expr.const // g
    if terms[0][1] < 0:
        terms = tuple((v, -c) for v, c in terms)
        const = -const
    return Atom(terms, const, EQ)


def compare(lhs: LinExpr, op: str, rhs: LinExpr) -> AtomOrTruth:
    """Atom for ``lhs op rhs`` with op in <, <=, >, >=, ==."""
    return make_atom(lhs - rhs, "==" if op == "==" else op)


# -- constraint sets -------------------------------------------------------------

Path = tuple[Atom, ...]


def canonical_path(atoms: Iterable[Atom]) -> Path:
    return tuple(sorted(set(atoms)))


def canonical_paths(paths: Iterable[Iterable[Atom]]) -> tuple[Path, ...]:
    return tuple(sorted({canonical_path(p) for p in paths}))


@dataclass(frozen=True)
class ConstraintSet:
    symbolic_vars: tuple[tuple[str, str], ...]  # (name, role)
    paths: tuple[Path, ...]
    pointer: str = ""

    @staticmethod
    def make(symbolic_vars: Iterable[tuple[str, str]], paths: Iterable[Iterable[Atom]], pointer: str = "") -> "ConstraintSet":
        symbolic_vars = tuple(symbolic_vars)
        paths = canonical_paths(paths)
        names = {n for n, _ in symbolic_vars}
        extra = sorted({v for p in paths for a in p for v in a.variables()} - names)
        sv = tuple(symbolic_vars) + tuple((v, _term_role(v)) for v in extra)
        return ConstraintSet(sv, paths, pointer)

    def variables(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.symbolic_vars)

    def atom_variables(self) -> list[str]:
        return sorted({v for p in self.paths for a in p for v in a.variables()})

    def holds(self, env: Mapping[str, int]) -> bool:
        return any(all(a.holds(env) for a in p) for p in self.paths)

    def rename(self, mapping: Mapping[str, str]) -> "ConstraintSet":
        paths = []
        for p in self.paths:
            renamed = [a.rename(mapping) for a in p]
            if False not in renamed:
                paths.append([a for a in renamed if isinstance(a, Atom)])
        sv = tuple((mapping.get(n, n), r) for n, r in self.symbolic_vars)
        return ConstraintSet(sv, canonical_paths(paths), mapping.get(self.pointer, self.pointer))

    def to_text(self) -> str:
        """Canonical text form, one path per line."""
        if not self.paths:
            return "false\n"
        lines = []
        for p in self.paths:
            lines.append(" && ".join(str(a) for a in p) if p else "true")
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        return " || ".join("(" + " && ".join(str(a) for a in p) + ")" for p in self.paths) or "false"


# -- Fourier-Motzkin -----------------------------------------------------------

_Row = tuple[dict[str, Fraction], Fraction]  # sum(c*x) + k <= 0


def _rows(atoms: Iterable[Atom]) -> list[_Row]:
    rows: list[_Row] = []
    for a in atoms:
        co = {v: Fraction(c) for v, c in a.terms}
        rows.append((co, Fraction(a.const)))
        if a.op == EQ:
            rows.append(({v: -c for v, c in co.items()}, Fraction(-a.const)))
    return rows


def _normalize_row(co: dict[str, Fraction], k: Fraction) -> tuple:
    scale = max((abs(c) for c in co.values()), default=Fraction(1))
    return tuple(sorted((v, c / scale) for v, c in co.items() if c != 0)), k / scale


def _feasible(rows: list[_Row]) -> bool:
    """Rational feasibility of ``rows`` by Fourier-Motzkin elimination."""
    current = rows
    while True:
        seen = set()
        clean: list[_Row] = []
        for co, k in current:
            co = {v: c for v, c in co.items() if c != 0}
            if not co:
                if k > 0:
                    return False
                continue
            key = _normalize_row(co, k)
            if key not in seen:
                seen.add(key)
                clean.append((co, k))
        if not clean:
            return True
        counts: dict[str, int] = {}
        for co, _ in clean:
            for v in co:
                counts[v] = counts.get(v, 0) + 1
        # eliminate the variable with the cheapest product first
        def cost(v: str) -> tuple[int, str]:
            pos = sum(1 for co, _ in clean if co.get(v, 0) > 0)
            neg = sum(1 for co, _ in clean if co.get(v, 0) < 0)
            return pos * neg - pos - neg, v

        x = min(counts, key=cost)
        pos = [(co, k) for co, k in clean if co.get(x, 0) > 0]
        neg = [(co, k) for co, k in clean if co.get(x, 0) < 0]
        rest = [(co, k) for co, k in clean if co.get(x, 0) == 0]
        for cp, kp in pos:
            for cn, kn in neg:
                a, b = cp[x], -cn[x]
                co = {}
                for v in set(cp) | set(cn):
                    co[v] = cp.get(v, 0) * b + cn.get(v, 0) * a
                co.pop(x, None)
                rest.append((co, kp * b + kn * a))
        current = rest


def satisfiable(atoms: Iterable[Atom]) -> bool:
    """Sound unsatisfiability test: False means no integer solution exists."""
    return _feasible(_rows(atoms))


def _negations(a: Atom) -> list[Atom]:
    """Atoms whose disjunction is the integer negation of ``a``."""
    out = []
    if a.op == LE:
        neg = make_atom(-a.expr + LinExpr.of(1), LE)  # expr >= 1
        if isinstance(neg, Atom):
            out.append(neg)
    else:
        for e in (a.expr - LinExpr.of(1), -a.expr - LinExpr.of(1)):
            neg = make_atom(-e, LE)  # e >= 0 shifted
            if isinstance(neg, Atom):
                out.append(neg)
    return out


def implies(premises: Sequence[Atom], goal: Atom) -> bool:
    return all(not satisfiable(list(premises) + [n]) for n in _negations(goal))


def _path_implies(p: Path, q: Path) -> bool:
    return all(implies(p, a) for a in q)


def simplify_path(path: Iterable[Atom]) -> Optional[Path]:
    atoms = list(canonical_path(path))
    if not satisfiable(atoms):
        return None
    kept = list(atoms)
    for a in atoms:
        others = [b for b in kept if b != a]
        if implies(others, a):
            kept = others
    return canonical_path(kept)


def simplify(cs: ConstraintSet) -> ConstraintSet:
    paths = []
    for p in cs.paths:
        sp = simplify_path(p)
        if sp is not None:
            paths.append(sp)
    kept: list[Path] = []
    for p in canonical_paths(paths):
        if any(_path_implies(p, q) for q in kept):
            continue  # p is absorbed by a weaker path
        kept = [q for q in kept if not _path_implies(q, p)]
        kept.append(p)
    return ConstraintSet(cs.symbolic_vars, canonical_paths(kept), cs.pointer)


# -- matching and equivalence ----------------------------------------------------


class Verdict(enum.Enum):
    Equivalent = "Equivalent"
    NotEquivalent = "NotEquivalent"


@dataclass(frozen=True)
class VariableMatching:
    pairs: tuple[tuple[str, str], ...]

    def mapping_b_to_a(self) -> dict[str, str]:
        return {b: a for a, b in self.pairs}

    def mapping_a_to_b(self) -> dict[str, str]:
        return {a: b for a, b in self.pairs}


def _by_role(cs: ConstraintSet) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for name, role in cs.symbolic_vars:
        if is_pointer_term(name):
            continue
        out.setdefault(role, []).append(name)
    return out


def match_variables(a: ConstraintSet, b: ConstraintSet) -> VariableMatching:
    ra, rb = _by_role(a), _by_role(b)
    if {r: len(v) for r, v in ra.items()} != {r: len(v) for r, v in rb.items()}:
        raise NoMatching(
            "role counts differ: "
            + str({r: len(v) for r, v in sorted(ra.items())})
            + " vs "
            + str({r: len(v) for r, v in sorted(rb.items())})
        )
    pairs: list[tuple[str, str]] = []
    for role in sorted(ra):
        pairs.extend(zip(ra[role], rb[role]))
    la = {n for n, _ in a.symbolic_vars if is_pointer_term(n)} | {v for v in a.atom_variables() if is_pointer_term(v)}
    lb = {n for n, _ in b.symbolic_vars if is_pointer_term(n)} | {v for v in b.atom_variables() if is_pointer_term(v)}
    if a.pointer and b.pointer:
        terms = [(length_term(a.pointer, lv), length_term(b.pointer, lv)) for lv in (1, 2)]
        terms.append((offset_term(a.pointer), offset_term(b.pointer)))
        for ta, tb in terms:
            if (ta in la) != (tb in lb):
                raise NoMatching(f"{ta} has no counterpart")
            pairs.append((ta, tb))
            la.discard(ta)
            lb.discard(tb)
    if len(la) != len(lb):
        raise NoMatching("pointer terms differ")
    pairs.extend(zip(sorted(la), sorted(lb)))
    return VariableMatching(tuple(pairs))


def _domain(name: str, radius: int) -> np.ndarray:
    return np.arange(0 if is_length(name) else -radius, radius + 1, dtype=np.int64)


def _evaluate(cs: ConstraintSet, axes: Mapping[str, np.ndarray], shape: tuple[int, ...]) -> np.ndarray:
    out = np.zeros(shape, dtype=bool)
    for p in cs.paths:
        acc = np.ones(shape, dtype=bool)
        for a in p:
            val = np.full(shape, a.const, dtype=np.int64) if not a.terms else a.const
            for v, c in a.terms:
                val = val + c * axes[v]
            acc &= (val <= 0) if a.op == LE else (val == 0)
        out |= acc
    return out


def enumerate_equivalent(
    a: ConstraintSet, b: ConstraintSet, radius: int = DEFAULT_RADIUS, budget: int = ENUMERATION_BUDGET
) -> bool:
    """Exhaustive comparison over the bounded integer domain (b already renamed)."""
    names = sorted(set(a.atom_variables()) | set(b.atom_variables()))
    domains = [_domain(n, radius) for n in names]
    total = math.prod(len(d) for d in domains)
    if total > budget:
        raise DomainTooLarge(f"{len(names)} variables, {total} assignments exceed budget {budget}")
    shape = tuple(len(d) for d in domains)
    axes = {}
    for i, (n, d) in enumerate(zip(names, domains)):
        view = [1] * len(names)
        view[i] = len(d)
        axes[n] = d.reshape(view)
    return bool(np.array_equal(_evaluate(a, axes, shape), _evaluate(b, axes, shape)))


def check_equivalence(
    a: ConstraintSet,
    b: ConstraintSet,
    m: Optional[VariableMatching] = None,
    radius: int = DEFAULT_RADIUS,
    budget: int = ENUMERATION_BUDGET,
) -> Verdict:
    if m is None:
        m = match_variables(a, b)
    rb = b.rename(m.mapping_b_to_a())
    if simplify(a).paths == simplify(rb).paths:
        return Verdict.Equivalent
    same = enumerate_equivalent(a, rb, radius, budget)
    return Verdict.Equivalent if same else Verdict.NotEquivalent


def fast_path_equal(a: ConstraintSet, b: ConstraintSet, m: VariableMatching) -> bool:
    return simplify(a).paths == simplify(b.rename(m.mapping_b_to_a())).paths
