"""Per-function dependency graph and pointer tainting.

Edges point from the identifier that *affects* to the identifier that is
affected:

* ``array-index``   index variable -> subscripted pointer
* ``assignment``    value sources on the right-hand side -> assigned variable
* ``call-argument`` argument -> call slot ``f()``, and ``f()`` -> arguments
                    passed by reference
* ``control``       condition variable -> identifiers defined or dereferenced
                    under that condition

Writes through a pointer (``p[i] = x``) change memory, not the pointer, so they
produce no assignment edge.  Tainting a pointer is backward reachability over
these edges, which collects indices, loop bounds and their definitions while
leaving pure consumers (``c = p[j]``) out.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import PointerNotInFunction
from .frontend import CONTROL_KINDS, AstNode, AstTree, NodeKind, PointerDecl, chain_name, function_body

EDGE_LABELS = ("array-index", "assignment", "call-argument", "control")
RELATIONAL_OPS = frozenset({"<", ">", "<=", ">=", "==", "!="})


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    label: str


@dataclass(frozen=True)
class DependencyGraph:
    function: str
    nodes: tuple[str, ...]  # first-occurrence order
    edges: tuple[Edge, ...]
    comparisons: frozenset[frozenset[str]] = frozenset()
    pointers: frozenset[str] = frozenset()

    def edge_set(self) -> set[tuple[str, str, str]]:
        return {(e.src, e.dst, e.label) for e in self.edges}

    def predecessors(self, node: str) -> list[str]:
        return [e.src for e in self.edges if e.dst == node]

    def to_dot(self) -> str:
        lines = [f'digraph "{self.function}" {{']
        for n in self.nodes:
            lines.append(f'  "{n}";')
        for e in self.edges:
            lines.append(f'  "{e.src}" -> "{e.dst}" [label="{e.label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RelatedVariableSet:
    pointer: PointerDecl
    variables: tuple[str, ...]
    roles: dict[str, str] = field(default_factory=dict, compare=False, hash=False)

    def __contains__(self, name: str) -> bool:
        return name in self.variables


def is_slot(name: str) -> bool:
    return name.endswith("()")


# -- expression helpers -------------------------------------------------------


def deref_base(node: AstNode) -> Optional[str]:
    """Name of the pointer a dereferencing expression reads through."""
    k = node.kind
    if k == NodeKind.ArrayRef:
        inner = node.children[0]
        name = chain_name(inner)
        return name if name is not None else deref_base(inner)
    if k == NodeKind.Deref:
        return pointer_operand(node.children[0])
    if k == NodeKind.StructRef and node.text == "->":
        inner = node.children[0]
        name = chain_name(inner)
        return name if name is not None else deref_base(inner)
    return None


def pointer_operand(expr: AstNode) -> Optional[str]:
    """Pointer named by ``p``, ``p + e`` or ``e + p`` inside ``*(...)``."""
    name = chain_name(expr)
    if name is not None:
        return name
    if expr.kind == NodeKind.BinaryOp and expr.text in ("+", "-"):
        left = pointer_operand(expr.children[0])
        if left is not None:
            return left
        if expr.text == "+":
            return pointer_operand(expr.children[1])
    return deref_base(expr)


def deref_offsets(node: AstNode) -> list[AstNode]:
    """Offset expressions of a dereference, outermost pointer level first."""
    if node.kind == NodeKind.ArrayRef:
        inner = node.children[0]
        if chain_name(inner) is not None:
            return [node.children[1]]
        return deref_offsets(inner) + [node.children[1]]
    if node.kind == NodeKind.Deref:
        expr = node.children[0]
        if expr.kind == NodeKind.BinaryOp and expr.text in ("+", "-"):
            if pointer_operand(expr.children[0]) is not None and chain_name(expr.children[0]) is not None:
                return [expr.children[1]]
            if chain_name(expr.children[1]) is not None:
                return [expr.children[0]]
        return []
    return []


def all_vars(node: AstNode) -> list[str]:
    """Every variable identifier in an expression (member chains collapsed)."""
    out: list[str] = []

    def visit(n: AstNode) -> None:
        name = chain_name(n)
        if name is not None:
            out.append(name)
            return
        if n.kind == NodeKind.Call:
            for a in n.children_with("arg"):
                visit(a)
            return
        if n.kind == NodeKind.StructRef:
            visit(n.children[0])
            return
        for c in n.children:
            visit(c)

    visit(node)
    return out


def value_vars(node: AstNode) -> list[str]:
    """Identifiers whose value flows into ``node``'s value.

    Subscripts are excluded (they reach the pointer through array-index
    edges); a call contributes its slot.
    """
    out: list[str] = []

    def visit(n: AstNode) -> None:
        name = chain_name(n)
        if name is not None:
            out.append(name)
            return
        k = n.kind
        if k in (NodeKind.ArrayRef, NodeKind.Deref) or (k == NodeKind.StructRef and n.text == "->"):
            base = deref_base(n)
            if base is not None:
                out.append(base)
            return
        if k == NodeKind.StructRef:
            visit(n.children[0])
            return
        if k == NodeKind.Call:
            out.append(f"{n.text}()")
            return
        if k == NodeKind.UnaryOp and n.text == "sizeof":
            return
        for c in n.children:
            visit(c)

    visit(node)
    return out


def scalar_vars(node: AstNode) -> list[str]:
    """Identifiers used as scalars: everything except dereferenced bases and callees."""
    out: list[str] = []

    def visit(n: AstNode) -> None:
        name = chain_name(n)
        if name is not None:
            out.append(name)
            return
        k = n.kind
        if k == NodeKind.ArrayRef:
            inner = n.children[0]
            if chain_name(inner) is None:
                visit(inner)
            visit(n.children[1])
            return
        if k == NodeKind.Deref:
            expr = n.children[0]
            for off in deref_offsets(n):
                visit(off)
            if chain_name(expr) is None and not (expr.kind == NodeKind.BinaryOp and deref_offsets(n)):
                visit(expr)
            return
        if k == NodeKind.StructRef:
            inner = n.children[0]
            if chain_name(inner) is None:
                visit(inner)
            return
        if k == NodeKind.Call:
            for a in n.children_with("arg"):
                visit(a)
            return
        for c in n.children:
            visit(c)

    visit(node)
    return out


def assigned_var(lhs: AstNode) -> Optional[str]:
    """Variable whose value an assignment changes; None for writes through a pointer."""
    return chain_name(lhs)


def dereferences(node: AstNode) -> Iterable[tuple[AstNode, str]]:
    """(dereference node, pointer name) pairs, outermost first, nested levels skipped."""
    for n in node.walk():
        if n.kind in (NodeKind.ArrayRef, NodeKind.Deref) or (n.kind == NodeKind.StructRef and n.text == "->"):
            base = deref_base(n)
            if base is not None:
                yield n, base


def definitions(stmt: AstNode, pointers: frozenset[str] = frozenset()) -> list[str]:
    """Variables a statement (or header expression) may define, in source order."""
    out: list[str] = []
    for n in stmt.walk():
        k = n.kind
        if k == NodeKind.Assignment:
            v = assigned_var(n.children[0])
            if v is not None:
                out.append(v)
        elif k == NodeKind.UnaryOp and n.text in ("++", "--", "p++", "p--"):
            v = chain_name(n.children[0])
            if v is not None:
                out.append(v)
        elif k == NodeKind.Decl:
            out.append(n.text)
        elif k == NodeKind.Call:
            out.extend(by_reference_args(n, pointers))
    return out


def by_reference_args(call: AstNode, pointers: frozenset[str]) -> list[str]:
    out: list[str] = []
    for a in call.children_with("arg"):
        if a.kind == NodeKind.UnaryOp and a.text == "&":
            inner = a.children[0]
            name = chain_name(inner) or deref_base(inner)
            if name is not None:
                out.append(name)
        else:
            name = pointer_operand(a) if a.kind in (NodeKind.ID, NodeKind.StructRef, NodeKind.BinaryOp) else None
            if name is not None and name in pointers:
                out.append(name)
    return out


# -- graph construction -------------------------------------------------------


class _GraphBuilder:
    def __init__(self, ast: AstTree):
        self.ast = ast
        self.order: dict[str, int] = {}
        self.edges: dict[tuple[str, str], str] = {}
        self.comparisons: set[frozenset[str]] = set()
        self.pointers = frozenset(
            n.text
            for n in ast.root.walk()
            if n.kind in (NodeKind.Param, NodeKind.Decl) and n.info is not None and n.info.is_pointer
        )

    def touch(self, name: str) -> None:
        if name not in self.order:
            self.order[name] = len(self.order)

    def add(self, src: str, dst: str, label: str, pending: list[tuple[str, str, str]]) -> None:
        if src != dst:
            pending.append((src, dst, label))

    def build(self) -> DependencyGraph:
        root = self.ast.root
        self.visit_occurrences(root)
        pending: list[tuple[str, str, str]] = []
        for n in root.walk():
            self.index_edges(n, pending)
        for n in root.walk():
            self.assignment_edges(n, pending)
        for n in root.walk():
            self.call_edges(n, pending)
        for n in root.walk():
            self.control_edges(n, pending)
        for src, dst, label in pending:
            self.touch(src)
            self.touch(dst)
            # one label per directed pair; earlier passes take precedence
            self.edges.setdefault((src, dst), label)
        nodes = tuple(sorted(self.order, key=self.order.__getitem__))
        edges = tuple(Edge(s, d, l) for (s, d), l in self.edges.items())
        return DependencyGraph(
            self.ast.function_name, nodes, edges, frozenset(self.comparisons), self.pointers
        )

    def visit_occurrences(self, n: AstNode) -> None:
        if n.kind in (NodeKind.Param, NodeKind.Decl):
            self.touch(n.text)
        name = chain_name(n)
        if name is not None:
            self.touch(name)
            return
        if n.kind == NodeKind.Call:
            self.touch(f"{n.text}()")
            for a in n.children_with("arg"):
                self.visit_occurrences(a)
            return
        if n.kind == NodeKind.StructRef:
            self.visit_occurrences(n.children[0])
            return
        for c in n.children:
            self.visit_occurrences(c)

    def index_edges(self, n: AstNode, pending) -> None:
        if n.kind in (NodeKind.ArrayRef, NodeKind.Deref):
            base = deref_base(n)
            if base is None:
                return
            offsets = [n.children[1]] if n.kind == NodeKind.ArrayRef else deref_offsets(n)
            for off in offsets:
                for v in all_vars(off):
                    self.add(v, base, "array-index", pending)

    def assignment_edges(self, n: AstNode, pending) -> None:
        if n.kind == NodeKind.Assignment:
            target = assigned_var(n.children[0])
            if target is not None:
                for v in value_vars(n.children[1]):
                    self.add(v, target, "assignment", pending)
        elif n.kind == NodeKind.Decl:
            init = n.child("init")
            if init is not None:
                for v in value_vars(init):
                    self.add(v, n.text, "assignment", pending)

    def call_edges(self, n: AstNode, pending) -> None:
        if n.kind != NodeKind.Call:
            return
        slot = f"{n.text}()"
        for a in n.children_with("arg"):
            for v in value_vars(a):
                self.add(v, slot, "call-argument", pending)
        for v in by_reference_args(n, self.pointers):
            self.add(slot, v, "call-argument", pending)

    def control_edges(self, n: AstNode, pending) -> None:
        if n.kind not in CONTROL_KINDS:
            return
        cond = n.child("cond")
        if cond is None:
            return
        self.record_comparisons(cond)
        sources = scalar_vars(cond)
        governed: list[AstNode] = []
        if n.kind == NodeKind.If:
            governed = [c for r, c in zip(n.roles, n.children) if r in ("then", "else")]
        else:
            governed = [c for r, c in zip(n.roles, n.children) if r in ("cond", "next", "body")]
        targets: list[str] = []
        for g in governed:
            targets.extend(definitions(g, self.pointers))
            targets.extend(base for _, base in dereferences(g))
        for src in sources:
            for dst in targets:
                self.add(src, dst, "control", pending)

    def record_comparisons(self, cond: AstNode) -> None:
        for n in cond.walk():
            if n.kind == NodeKind.BinaryOp and n.text in RELATIONAL_OPS:
                left = set(scalar_vars(n.children[0]))
                right = set(scalar_vars(n.children[1]))
                for a in left:
                    for b in right:
                        if a != b:
                            self.comparisons.add(frozenset((a, b)))


def build_dependency_graph(ast: AstTree) -> DependencyGraph:
    return _GraphBuilder(ast).build()


# -- tainting -----------------------------------------------------------------


def taint_pointer(graph: DependencyGraph, pointer: PointerDecl) -> RelatedVariableSet:
    """Pointer-related variables: everything that can reach the pointer in the graph."""
    if pointer.declared_in != graph.function or pointer.name not in graph.nodes:
        raise PointerNotInFunction(f"{pointer.name} is not declared in {graph.function}")
    preds: dict[str, list[str]] = {}
    for e in graph.edges:
        preds.setdefault(e.dst, []).append(e.src)
    seen = {pointer.name}
    queue = deque([pointer.name])
    while queue:
        cur = queue.popleft()
        for p in preds.get(cur, ()):
            if p not in seen:
                seen.add(p)
                queue.append(p)
    rank = {n: i for i, n in enumerate(graph.nodes)}
    variables = tuple(
        sorted((v for v in seen if v != pointer.name and not is_slot(v)), key=rank.__getitem__)
    )
    return RelatedVariableSet(pointer, variables, assign_roles(graph, pointer.name, variables))


def assign_roles(graph: DependencyGraph, pointer: str, variables: Iterable[str]) -> dict[str, str]:
    variables = list(variables)
    index = {e.src for e in graph.edges if e.dst == pointer and e.label == "array-index"}
    roles: dict[str, str] = {}
    for v in variables:
        if v in index:
            roles[v] = "index"
    for v in variables:
        if v in roles:
            continue
        if any(frozenset((v, i)) in graph.comparisons for i in index):
            roles[v] = "bound"
        else:
            roles[v] = "base-offset"
    return roles


def related_sets(ast: AstTree, pointers: Optional[list[PointerDecl]] = None) -> list[RelatedVariableSet]:
    from .frontend import enumerate_pointers

    graph = build_dependency_graph(ast)
    out = []
    for p in pointers if pointers is not None else enumerate_pointers(ast):
        if p.name in graph.nodes:
            out.append(taint_pointer(graph, p))
    return out
