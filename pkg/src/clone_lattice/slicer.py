"""Pointer-isolated slices.

Statements are addressed by their path (tuple of child indices from the
function root), so two textually identical statements stay distinct.  A
control statement in a kept set means "keep the header"; its body keeps only
the kept statements nested below it.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import EmptySlice
from .frontend import CONTROL_KINDS, AstNode, AstTree, NodeKind, PointerDecl, SourceSpan
from .taint import RelatedVariableSet, by_reference_args, definitions, deref_base, dereferences

Path = tuple[int, ...]

_BODY_ROLES = ("body", "then", "else", "stmt")


@dataclass(frozen=True)
class PointerSlice:
    pointer: PointerDecl
    related: RelatedVariableSet
    statements: tuple[tuple[AstNode, SourceSpan], ...]
    origin: str
    slice_tree: AstTree

    @property
    def slice_id(self) -> str:
        return f"{self.slice_tree.file}:{self.origin}:{self.pointer.name}"

    @property
    def line_range(self) -> tuple[int, int]:
        lines = [sp.line_start for _, sp in self.statements] + [sp.line_end for _, sp in self.statements]
        return min(lines), max(lines)


def iter_statements(root: AstNode) -> Iterator[tuple[Path, AstNode]]:
    """All statement nodes of a function in source order, with their paths."""

    def visit(node: AstNode, path: Path) -> Iterator[tuple[Path, AstNode]]:
        for i, (role, child) in enumerate(zip(node.roles, node.children)):
            if role not in _BODY_ROLES:
                continue
            cpath = path + (i,)
            if child.kind != NodeKind.Compound:
                yield cpath, child
            if child.kind == NodeKind.Compound or child.kind in CONTROL_KINDS:
                yield from visit(child, cpath)

    yield from visit(root, ())


def _node_at(root: AstNode, path: Path) -> AstNode:
    node = root
    for i in path:
        node = node.children[i]
    return node


def header_parts(stmt: AstNode) -> list[AstNode]:
    """The part of a statement that belongs to it when nested statements are set aside."""
    if stmt.kind in CONTROL_KINDS:
        return [c for r, c in zip(stmt.roles, stmt.children) if r in ("init", "cond", "next")]
    return [stmt]


def _defines(stmt: AstNode, names: set[str], pointers: frozenset[str]) -> bool:
    for part in header_parts(stmt):
        for v in definitions(part, pointers):
            if v in names:
                return True
    return False


def _stores_through(stmt: AstNode, pointers: set[str]) -> bool:
    # writes like p[m] = v change what a related pointer p hands out
    for part in header_parts(stmt):
        for n in part.walk():
            if n.kind == NodeKind.Assignment and deref_base(n.children[0]) in pointers:
                return True
    return False


def _dereferences(stmt: AstNode, pointer: str) -> bool:
    return any(base == pointer for part in header_parts(stmt) for _, base in dereferences(part))


def backward_slice(ast: AstTree, related: RelatedVariableSet) -> frozenset[Path]:
    """Statements that may change a related variable or the pointer value."""
    names = set(related.variables)
    ptr = related.pointer.name
    pointers = frozenset({ptr}) | frozenset(_declared_pointers(ast))
    kept: set[Path] = set()
    for path, stmt in iter_statements(ast.root):
        if stmt.kind == NodeKind.Decl:
            if stmt.text in names or (stmt.text == ptr and stmt.child("init") is not None):
                kept.add(path)
            continue
        if _defines(stmt, names | {ptr}, pointers) or _stores_through(stmt, names & pointers):
            kept.add(path)
    return frozenset(kept)


def _declared_pointers(ast: AstTree) -> list[str]:
    return [
        n.text
        for n in ast.root.walk()
        if n.kind in (NodeKind.Param, NodeKind.Decl) and n.info is not None and n.info.is_pointer
    ]


def control_closure(ast: AstTree, kept: frozenset[Path]) -> frozenset[Path]:
    """Add every enclosing loop/branch header of a kept statement."""
    controls = {p for p, s in iter_statements(ast.root) if s.kind in CONTROL_KINDS}
    out = set(kept)
    for path in kept:
        for cut in range(1, len(path)):
            prefix = path[:cut]
            if prefix in controls:
                out.add(prefix)
    return frozenset(out)


def dereferencing_statements(ast: AstTree, pointer: str) -> frozenset[Path]:
    return frozenset(p for p, s in iter_statements(ast.root) if s.kind != NodeKind.Decl and _dereferences(s, pointer)
                     or s.kind == NodeKind.Decl and s.child("init") is not None and _dereferences(s.child("init"), pointer))


def isolate(ast: AstTree, pointer: PointerDecl, related: RelatedVariableSet) -> PointerSlice:
    base = backward_slice(ast, related) | dereferencing_statements(ast, pointer.name)
    if not (base - _own_declaration(ast, pointer.name)):
        raise EmptySlice(f"{pointer.name} in {ast.function_name} is never used")
    kept = control_closure(ast, base)
    root = ast.root
    statements = tuple((s, s.span) for p, s in iter_statements(root) if p in kept)
    body = _flatten_body(root, kept)
    keep_params = set(related.variables) | {pointer.name}
    params = [p for p in root.children_with("param") if p.text in keep_params]
    children = params + body
    roles = ["param"] * len(params) + ["stmt"] * len(body)
    new_root = dataclasses.replace(root, children=tuple(children), roles=tuple(roles))
    tree = AstTree(ast.function_name, new_root, slice_token_count(new_root), ast.file)
    return PointerSlice(pointer, related, statements, ast.function_name, tree)


def _flatten_body(root: AstNode, kept: frozenset[Path]) -> list[AstNode]:
    # the function body's own braces are dropped; kept statements hang off the root
    for i, (role, child) in enumerate(zip(root.roles, root.children)):
        if role == "body" and child.kind == NodeKind.Compound:
            return [c for _, c in _rebuild_children(child, (i,), kept)]
    return [c for _, c in _rebuild_children(root, (), kept)]


def _own_declaration(ast: AstTree, name: str) -> frozenset[Path]:
    return frozenset(
        p for p, s in iter_statements(ast.root) if s.kind == NodeKind.Decl and s.text == name and s.child("init") is None
    )


def _rebuild_children(node: AstNode, path: Path, kept: frozenset[Path]) -> list[tuple[str, AstNode]]:
    """Kept statements under ``node`` (statement-bearing roles only), rebuilt."""
    out: list[tuple[str, AstNode]] = []
    for i, (role, child) in enumerate(zip(node.roles, node.children)):
        if role not in _BODY_ROLES:
            continue
        cpath = path + (i,)
        if child.kind == NodeKind.Compound:
            inner = _rebuild_children(child, cpath, kept)
            if inner or _has_kept_under(cpath, kept):
                out.append(("stmt", _with_children(child, inner)))
            continue
        if cpath not in kept:
            continue
        if child.kind in CONTROL_KINDS:
            out.append(("stmt", _rebuild_control(child, cpath, kept)))
        else:
            out.append(("stmt", child))
    return out


def _has_kept_under(path: Path, kept: frozenset[Path]) -> bool:
    return any(len(p) > len(path) and p[: len(path)] == path for p in kept)


def _with_children(node: AstNode, items: list[tuple[str, AstNode]]) -> AstNode:
    return dataclasses.replace(node, children=tuple(c for _, c in items), roles=tuple("stmt" for _ in items))


def _rebuild_control(node: AstNode, path: Path, kept: frozenset[Path]) -> AstNode:
    children: list[AstNode] = []
    roles: list[str] = []
    for i, (role, child) in enumerate(zip(node.roles, node.children)):
        cpath = path + (i,)
        if role in ("init", "cond", "next"):
            children.append(child)
            roles.append(role)
            continue
        if child.kind == NodeKind.Compound:
            children.append(_with_children(child, _rebuild_children(child, cpath, kept)))
            roles.append(role)
        elif cpath in kept:
            rebuilt = _rebuild_control(child, cpath, kept) if child.kind in CONTROL_KINDS else child
            children.append(rebuilt)
            roles.append(role)
        elif role == "then" and node.kind == NodeKind.If and _has_kept_under(path, kept):
            # keep the branch shape when only the else side survives
            children.append(_empty_compound(child))
            roles.append(role)
    return dataclasses.replace(node, children=tuple(children), roles=tuple(roles))


def _empty_compound(like: AstNode) -> AstNode:
    return AstNode(NodeKind.Compound, like.span, tok=(like.tok[0], like.tok[0]))


# -- token accounting ---------------------------------------------------------


def _owned_tokens(stmt: AstNode) -> set[int]:
    if stmt.kind == NodeKind.Compound:
        own = {stmt.tok[0], stmt.tok[1]}
        for c in stmt.children:
            own |= _owned_tokens(c)
        return own
    if stmt.kind in CONTROL_KINDS:
        own = set(range(stmt.tok[0], stmt.head + 1))
        for r, c in zip(stmt.roles, stmt.children):
            if r in ("body", "then", "else"):
                own |= _owned_tokens(c)
        return own
    return set(range(stmt.tok[0], stmt.tok[1] + 1))


def slice_token_count(root: AstNode) -> int:
    owned: set[int] = set()
    for r, c in zip(root.roles, root.children):
        if r != "param":
            owned |= _owned_tokens(c)
    return len(owned)


def slice_function(ast: AstTree, pointer: PointerDecl, related: RelatedVariableSet) -> Optional[PointerSlice]:
    try:
        return isolate(ast, pointer, related)
    except EmptySlice:
        return None


def annotate(slc: PointerSlice, source_lines: list[str]) -> str:
    """Slice rendered as original source lines prefixed with their line numbers."""
    lines: set[int] = set()
    for stmt, span in slc.statements:
        if stmt.kind in CONTROL_KINDS:
            lines.add(span.line_start)
            for r, c in zip(stmt.roles, stmt.children):
                if r in ("init", "cond", "next"):
                    lines.update(range(c.span.line_start, c.span.line_end + 1))
        else:
            lines.update(range(span.line_start, span.line_end + 1))
    out = [f"// slice {slc.origin} :: {slc.pointer.name}  related={list(slc.related.variables)}"]
    for ln in sorted(lines):
        text = source_lines[ln - 1] if 0 < ln <= len(source_lines) else ""
        out.append(f"{ln:5d}  {text}")
    return "\n".join(out) + "\n"
