"""Bounded symbolic execution of a pointer slice.

Related variables start as symbols named after themselves.  Each access to
the target pointer adds ``0 <= e`` and ``e < len(p)`` (``len(*p)`` one level
down), and branch and loop conditions add their own atoms.

A loop is summarised by three kinds of path:

* the zero-trip path (condition false right after ``init``),
* ``unroll_bound`` iterations, where variables that only change by a constant
  step are reset to their own symbol before the guard is assumed, so that
  ``i++`` and ``i += 2`` lead to the same guard atom ``i < n``,
* the exit path, where everything the loop assigns is reset and the guard is
  false.

Only paths that touched the target pointer are kept.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .constraints import Atom, ConstraintSet, LinExpr, compare, length_term, offset_term, satisfiable
from .errors import PathLimitExceeded, UnsupportedConstruct
from .frontend import AstNode, NodeKind, chain_name, function_body
from .slicer import PointerSlice
from .taint import deref_base

log = logging.getLogger(__name__)

MAX_PATHS = 64
RELATIONAL = {"<", ">", "<=", ">=", "==", "!="}
_NEGATE = {"<": ">=", ">=": "<", ">": "<=", "<=": ">"}


def int_literal(text: str) -> Optional[int]:
    t = text.strip()
    if len(t) >= 3 and t[0] == "'" and t[-1] == "'":
        body = t[1:-1]
        escapes = {"\\n": 10, "\\t": 9, "\\0": 0, "\\r": 13, "\\\\": 92, "\\'": 39}
        if body in escapes:
            return escapes[body]
        return ord(body) if len(body) == 1 else None
    t = t.rstrip("uUlL")
    try:
        if t.lower().startswith("0x"):
            return int(t, 16)
        if len(t) > 1 and t.startswith("0") and t.isdigit():
            return int(t, 8)
        return int(t, 10)
    except ValueError:
        return None


def _c_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


@dataclass
class _Path:
    atoms: set[Atom] = field(default_factory=set)
    env: dict[str, LinExpr] = field(default_factory=dict)
    offset: LinExpr = field(default_factory=LinExpr)
    touched: bool = False

    def copy(self) -> "_Path":
        return _Path(set(self.atoms), dict(self.env), self.offset, self.touched)

    def key(self) -> tuple:
        return (frozenset(self.atoms), tuple(sorted(self.env.items())), self.offset, self.touched)


def _dedup(paths: Iterable[_Path]) -> list[_Path]:
    seen: dict[tuple, _Path] = {}
    for p in paths:
        seen.setdefault(p.key(), p)
    return list(seen.values())


class _Executor:
    def __init__(self, pointer: str, unroll_bound: int, max_paths: int = MAX_PATHS):
        self.ptr = pointer
        self.unroll = unroll_bound
        self.max_paths = max_paths
        self.observed: list[frozenset[Atom]] = []
        self.finished: list[_Path] = []

    # -- expressions ---------------------------------------------------------

    def value(self, n: AstNode, p: _Path) -> Optional[LinExpr]:
        """Linear value of ``n`` under ``p`` (None if opaque); applies side effects."""
        k = n.kind
        name = chain_name(n)
        if name is not None:
            if name == self.ptr:
                return None
            if k == NodeKind.StructRef:
                self.chain_accesses(n, p)
            return p.env.get(name, LinExpr.var(name))
        if k == NodeKind.Constant:
            lit = int_literal(n.text)
            return None if lit is None else LinExpr.of(lit)
        if k in (NodeKind.ArrayRef, NodeKind.Deref) or (k == NodeKind.StructRef and n.text == "->"):
            self.access(n, p)
            return None
        if k == NodeKind.StructRef:
            self.value(n.children[0], p)
            return None
        if k == NodeKind.BinaryOp:
            return self.binary(n, p)
        if k == NodeKind.UnaryOp:
            return self.unary(n, p)
        if k == NodeKind.Assignment:
            return self.assign(n, p)
        if k == NodeKind.Call:
            for a in n.children_with("arg"):
                self.value(a, p)
            for a in n.children_with("arg"):
                if a.kind == NodeKind.UnaryOp and a.text == "&":
                    target = chain_name(a.children[0])
                    if target is not None:
                        self.havoc(p, target)
            return None
        for c in n.children:
            self.value(c, p)
        return None

    def binary(self, n: AstNode, p: _Path) -> Optional[LinExpr]:
        op = n.text
        left = self.value(n.children[0], p)
        right = self.value(n.children[1], p)
        if left is None or right is None or op in RELATIONAL or op in ("&&", "||"):
            return None
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            if left.is_const():
                return right.scale(left.const)
            if right.is_const():
                return left.scale(right.const)
            return None
        if not (left.is_const() and right.is_const()):
            return None
        a, b = left.const, right.const
        try:
            folded = {
                "/": lambda: _c_div(a, b),
                "%": lambda: a - b * _c_div(a, b),
                "<<": lambda: a << b,
                ">>": lambda: a >> b,
                "&": lambda: a & b,
                "|": lambda: a | b,
                "^": lambda: a ^ b,
            }[op]()
        except (KeyError, ZeroDivisionError, ValueError):
            return None
        return LinExpr.of(folded)

    def unary(self, n: AstNode, p: _Path) -> Optional[LinExpr]:
        op = n.text
        if op in ("++", "--", "p++", "p--"):
            operand = n.children[0]
            target = chain_name(operand)
            step = LinExpr.of(1 if "+" in op else -1)
            if target is None:
                self.value(operand, p)
                return None
            if target == self.ptr:
                p.offset = p.offset + step
                return None
            old = p.env.get(target, LinExpr.var(target))
            new = old + step
            p.env[target] = new
            return old if op.startswith("p") else new
        if op == "sizeof":
            return None
        if op == "&":
            return None  # address arithmetic, not an access
        inner = self.value(n.children[0], p)
        if inner is None:
            return None
        if op == "-":
            return -inner
        if op == "+":
            return inner
        if op == "!" and inner.is_const():
            return LinExpr.of(int(inner.const == 0))
        if op == "~" and inner.is_const():
            return LinExpr.of(~inner.const)
        return None

    def assign(self, n: AstNode, p: _Path) -> Optional[LinExpr]:
        lhs, rhs = n.children[0], n.children[1]
        target = chain_name(lhs)
        if target == self.ptr:
            p.offset = self.pointer_offset(rhs, p)
            return None
        val = self.value(rhs, p)
        if target is None:
            self.value(lhs, p)
            return val
        if val is None:
            self.havoc(p, target)
        else:
            p.env[target] = val
        return val

    def pointer_offset(self, rhs: AstNode, p: _Path) -> LinExpr:
        """New offset of the target after ``ptr = rhs``."""
        if chain_name(rhs) == self.ptr:
            return p.offset
        if rhs.kind == NodeKind.BinaryOp and rhs.text in ("+", "-"):
            left, right = rhs.children
            if chain_name(left) == self.ptr:
                step = self.value(right, p)
                if step is None:
                    raise UnsupportedConstruct(f"non-linear step for {self.ptr}")
                return p.offset + step if rhs.text == "+" else p.offset - step
            if rhs.text == "+" and chain_name(right) == self.ptr:
                step = self.value(left, p)
                if step is None:
                    raise UnsupportedConstruct(f"non-linear step for {self.ptr}")
                return p.offset + step
        self.value(rhs, p)
        return LinExpr()  # points at a fresh region

    def havoc(self, p: _Path, name: str) -> None:
        if name == self.ptr:
            p.offset = LinExpr.var(offset_term(self.ptr))
        else:
            p.env.pop(name, None)

    # -- accesses --------------------------------------------------------------

    def chain_accesses(self, n: AstNode, p: _Path) -> None:
        """``ptr->field`` inside a member chain reads through ``ptr``."""
        while n.kind == NodeKind.StructRef:
            if n.text == "->" and deref_base(n) == self.ptr:
                self.access(n, p)
                return
            n = n.children[0]

    def access(self, n: AstNode, p: _Path) -> None:
        if deref_base(n) != self.ptr:
            self.value(n.children[0], p)
            if n.kind == NodeKind.ArrayRef:
                self.value(n.children[1], p)
            return
        offsets = self.levels(n, p)
        if len(offsets) > 2:
            raise UnsupportedConstruct(f"{len(offsets)}-level access through {self.ptr}")
        for level, off in enumerate(offsets, start=1):
            if off is None:
                raise UnsupportedConstruct(f"non-linear index into {self.ptr}")
            if level == 1:
                off = p.offset + off
            length = LinExpr.var(length_term(self.ptr, level))
            for atom in (compare(LinExpr.of(0), "<=", off), compare(off, "<", length)):
                if atom is False:
                    raise UnsupportedConstruct(f"access through {self.ptr} is always out of bounds")
                if isinstance(atom, Atom):
                    p.atoms.add(atom)
        p.touched = True

    def levels(self, n: AstNode, p: _Path) -> list[Optional[LinExpr]]:
        """Offsets of a target access, outermost pointer level first."""
        k = n.kind
        if k == NodeKind.ArrayRef:
            inner, idx = n.children
            outer = [] if chain_name(inner) == self.ptr else self.levels(inner, p)
            return outer + [self.value(idx, p)]
        if k == NodeKind.StructRef:
            inner = n.children[0]
            return ([] if chain_name(inner) == self.ptr else self.levels(inner, p)) + [LinExpr()]
        if k == NodeKind.Deref:
            return self.deref_levels(n.children[0], p)
        raise UnsupportedConstruct(f"unrecognised access to {self.ptr}")

    def deref_levels(self, expr: AstNode, p: _Path) -> list[Optional[LinExpr]]:
        if chain_name(expr) == self.ptr:
            return [LinExpr()]
        if expr.kind == NodeKind.BinaryOp and expr.text in ("+", "-"):
            left, right = expr.children
            if self._mentions_ptr(left):
                base = self.deref_levels(left, p)
                step = self.value(right, p)
                if step is None:
                    return base[:-1] + [None]
                last = base[-1]
                if last is None:
                    return base
                return base[:-1] + [last + step if expr.text == "+" else last - step]
            if expr.text == "+" and self._mentions_ptr(right):
                base = self.deref_levels(right, p)
                step = self.value(left, p)
                if step is None or base[-1] is None:
                    return base[:-1] + [None]
                return base[:-1] + [base[-1] + step]
        if expr.kind in (NodeKind.ArrayRef, NodeKind.Deref, NodeKind.StructRef):
            return self.levels(expr, p) + [LinExpr()]
        raise UnsupportedConstruct(f"unrecognised pointer expression over {self.ptr}")

    def _mentions_ptr(self, n: AstNode) -> bool:
        return chain_name(n) == self.ptr or any(
            chain_name(c) == self.ptr for c in n.walk() if c.kind in (NodeKind.ID, NodeKind.StructRef)
        )

    # -- conditions --------------------------------------------------------------

    def branch(self, n: AstNode, p: _Path) -> tuple[list[_Path], list[_Path]]:
        """Paths on which condition ``n`` is true and false, with short-circuiting."""
        if n.kind == NodeKind.BinaryOp and n.text in ("&&", "||"):
            t1, f1 = self.branch(n.children[0], p)
            first, other = (t1, f1) if n.text == "&&" else (f1, t1)
            t2: list[_Path] = []
            f2: list[_Path] = []
            for q in first:
                a, b = self.branch(n.children[1], q)
                t2 += a
                f2 += b
            if n.text == "&&":
                return t2, other + f2
            return other + t2, f2
        if n.kind == NodeKind.UnaryOp and n.text == "!":
            t, f = self.branch(n.children[0], p)
            return f, t
        q = p.copy()
        if n.kind == NodeKind.BinaryOp and n.text in RELATIONAL:
            left = self.value(n.children[0], q)
            right = self.value(n.children[1], q)
            op = n.text
        else:
            left, right, op = self.value(n, q), LinExpr(), "!="
        if left is None or right is None:
            return [q], [q.copy()]  # opaque: both outcomes, nothing learned
        lt, gt, eq = compare(left, "<", right), compare(left, ">", right), compare(left, "==", right)
        if op == "==":
            t_dnf, f_dnf = [[eq]], [[lt], [gt]]
        elif op == "!=":
            t_dnf, f_dnf = [[lt], [gt]], [[eq]]
        else:
            t_dnf, f_dnf = [[compare(left, op, right)]], [[compare(left, _NEGATE[op], right)]]
        return self._extend(q, t_dnf), self._extend(q, f_dnf)

    @staticmethod
    def _extend(base: _Path, dnf: list[list]) -> list[_Path]:
        out = []
        for conj in dnf:
            if False in conj:
                continue
            q = base.copy()
            q.atoms.update(a for a in conj if isinstance(a, Atom))
            if len(q.atoms) != len(base.atoms) and not satisfiable(q.atoms):
                continue
            out.append(q)
        return out

    def assume(self, cond: Optional[AstNode], p: _Path, truth: bool) -> list[_Path]:
        if cond is None:
            return [p.copy()] if truth else []
        t, f = self.branch(cond, p)
        return t if truth else f

    # -- statements ---------------------------------------------------------------

    def check(self, paths: list[_Path]) -> list[_Path]:
        paths = _dedup(paths)
        if len(paths) > self.max_paths:
            raise PathLimitExceeded(f"more than {self.max_paths} paths through {self.ptr}")
        return paths

    def run(self, stmts: Iterable[AstNode], paths: list[_Path]) -> list[_Path]:
        for s in stmts:
            paths = self.stmt(s, paths)
        return paths

    def stmt(self, s: AstNode, paths: list[_Path]) -> list[_Path]:
        k = s.kind
        if k == NodeKind.Compound:
            return self.run(s.children, paths)
        if k == NodeKind.If:
            cond = s.child("cond")
            then_paths: list[_Path] = []
            else_paths: list[_Path] = []
            for p in paths:
                then_paths += self.assume(cond, p, True)
                else_paths += self.assume(cond, p, False)
            then_b, else_b = s.child("then"), s.child("else")
            if then_b is not None:
                then_paths = self.stmt(then_b, self.check(then_paths))
            if else_b is not None:
                else_paths = self.stmt(else_b, self.check(else_paths))
            return self.check(then_paths + else_paths)
        if k in (NodeKind.For, NodeKind.While):
            return self.loop(s, paths)
        if k == NodeKind.Decl:
            out = []
            for p in paths:
                q = p.copy()
                init = s.child("init")
                if s.text == self.ptr:
                    q.offset = self.pointer_offset(init, q) if init is not None else LinExpr()
                elif init is None:
                    q.env.pop(s.text, None)
                else:
                    val = self.value(init, q)
                    if val is None:
                        q.env.pop(s.text, None)
                    else:
                        q.env[s.text] = val
                out.append(q)
            return self.check(out)
        if k == NodeKind.Return:
            for p in paths:
                q = p.copy()
                for c in s.children:
                    self.value(c, q)
                self.finished.append(q)
            return []
        out = []
        for p in paths:
            q = p.copy()
            self.value(s, q)
            out.append(q)
        return self.check(out)

    def loop(self, s: AstNode, paths: list[_Path]) -> list[_Path]:
        cond = s.child("cond")
        body = s.child("body")
        nexts = s.children_with("next")
        paths = self.run(s.children_with("init"), paths)
        changing = [c for c in [*nexts, body] if c is not None]
        assigned, affine = _loop_assignments(changing, self.ptr)
        exits: list[_Path] = []
        for p in paths:
            exits += self.assume(cond, p, False)
        current = paths
        for _ in range(self.unroll):
            produced: list[_Path] = []
            for p in current:
                q = p.copy()
                for v in affine:
                    self.havoc(q, v)
                for r in self.assume(cond, q, True):
                    rs = [r]
                    if body is not None:
                        rs = self.stmt(body, rs)
                    rs = self.run(nexts, rs)
                    produced += rs
            current = self.check(produced)
            self.observed.extend(frozenset(p.atoms) for p in current if p.touched)
            if not current:
                break
        for p in paths:
            q = p.copy()
            for v in assigned:
                self.havoc(q, v)
            exits += self.assume(cond, q, False)
        return self.check(exits)


def _loop_assignments(nodes: list[AstNode], pointer: str) -> tuple[list[str], list[str]]:
    """(all variables a loop assigns, those that only move by constant steps)."""
    assigned: dict[str, bool] = {}

    def note(name: Optional[str], step: bool) -> None:
        if name is not None:
            assigned[name] = assigned.get(name, True) and step

    for root in nodes:
        for n in root.walk():
            if n.kind == NodeKind.Assignment:
                target = chain_name(n.children[0])
                note(target, target is not None and _is_step(n.children[1], target))
            elif n.kind == NodeKind.UnaryOp and n.text in ("++", "--", "p++", "p--"):
                note(chain_name(n.children[0]), True)
            elif n.kind == NodeKind.Decl:
                note(n.text, False)
            elif n.kind == NodeKind.Call:
                for a in n.children_with("arg"):
                    if a.kind == NodeKind.UnaryOp and a.text == "&":
                        note(chain_name(a.children[0]), False)
    names = sorted(assigned)
    return names, [v for v in names if assigned[v]]


def _is_step(rhs: AstNode, target: str) -> bool:
    if rhs.kind != NodeKind.BinaryOp or rhs.text not in ("+", "-"):
        return False
    left, right = rhs.children
    if chain_name(left) == target:
        return right.kind == NodeKind.Constant and int_literal(right.text) is not None
    if rhs.text == "+" and chain_name(right) == target:
        return left.kind == NodeKind.Constant and int_literal(left.text) is not None
    return False


def symbolic_execute(slc: PointerSlice, unroll_bound: int = 2, max_paths: int = MAX_PATHS) -> ConstraintSet:
    if unroll_bound < 1:
        raise ValueError("unroll_bound must be at least 1")
    ptr = slc.pointer.name
    ex = _Executor(ptr, unroll_bound, max_paths)
    final = ex.run(function_body(slc.slice_tree.root), [_Path()])
    paths = list(ex.observed)
    paths += [frozenset(p.atoms) for p in final + ex.finished if p.touched]
    roles = slc.related.roles
    symbolic = [(v, roles.get(v, "base-offset")) for v in slc.related.variables]
    cs = ConstraintSet.make(symbolic, paths, ptr)
    log.debug("%s: %d paths", slc.slice_id, len(cs.paths))
    return cs
