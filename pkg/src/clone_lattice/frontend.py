"""Lexer, recursive-descent parser and AST model for the supported C subset.

The subset covers what pointer-heavy numeric C code usually needs: function
definitions, scalar/pointer/array/struct declarations, assignments (compound
forms are desugared), ``for``/``while``/``if``-``else``, opaque calls, array
subscripts, member chains, dereference/address-of and ``return``.  Files are
assumed to be preprocessed already; any ``#`` directive is a syntax error.

Every node records its source span and the inclusive range of lexical tokens
it covers so slices can be mapped back to the original file.
"""

from __future__ import annotations

import bisect
import dataclasses
import enum
import re
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import CSyntaxError


class NodeKind(enum.IntEnum):
    # The first nine entries are the dimension order used in feature vectors.
    ID = 0
    Constant = 1
    ArrayRef = 2
    Assignment = 3
    StructRef = 4
    BinaryOp = 5
    UnaryOp = 6
    Compound = 7
    For = 8
    While = 9
    If = 10
    Call = 11
    Return = 12
    Decl = 13
    Deref = 14
    FunctionDef = 15
    Param = 16


NUM_KINDS = len(NodeKind)
CONTROL_KINDS = frozenset({NodeKind.For, NodeKind.While, NodeKind.If})


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line_start: int
    col_start: int
    line_end: int
    col_end: int

    def contains(self, other: SourceSpan) -> bool:
        return (self.line_start, self.col_start) <= (other.line_start, other.col_start) and (
            other.line_end,
            other.col_end,
        ) <= (self.line_end, self.col_end)


@dataclass(frozen=True)
class DeclInfo:
    base_type: str
    pointer_depth: int = 0
    array_dims: tuple[str, ...] = ()

    @property
    def is_pointer(self) -> bool:
        return self.pointer_depth > 0 or bool(self.array_dims)

    def render(self, name: str) -> str:
        dims = "".join(f"[{d}]" for d in self.array_dims)
        return f"{self.base_type} {'*' * self.pointer_depth}{name}{dims}"


@dataclass(frozen=True)
class AstNode:
    kind: NodeKind
    span: SourceSpan
    children: tuple[AstNode, ...] = ()
    roles: tuple[str, ...] = ()
    text: Optional[str] = None
    info: Optional[DeclInfo] = None
    tok: tuple[int, int] = (0, 0)
    head: int = -1  # last token of a control header

    def child(self, role: str) -> Optional[AstNode]:
        for r, c in zip(self.roles, self.children):
            if r == role:
                return c
        return None

    def children_with(self, role: str) -> list[AstNode]:
        return [c for r, c in zip(self.roles, self.children) if r == role]

    def walk(self) -> Iterator[AstNode]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def postorder(self) -> Iterator[AstNode]:
        for c in self.children:
            yield from c.postorder()
        yield self


@dataclass(frozen=True)
class AstTree:
    function_name: str
    root: AstNode
    token_count: int
    file: str = "<string>"


@dataclass(frozen=True)
class PointerDecl:
    name: str
    declared_in: str
    base_type: str
    is_parameter: bool
    span: SourceSpan


# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n\f\v]+)
   |(?P<lcomment>//[^\n]*)
   |(?P<bcomment>/\*.*?\*/)
   |(?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?[fFlL]?|\d+[eE][+-]?\d+[fFlL]?)
   |(?P<int>0[xX][0-9a-fA-F]+[uUlL]*|\d+[uUlL]*)
   |(?P<str>"(?:\\.|[^"\\\n])*")
   |(?P<char>'(?:\\.|[^'\\\n])+')
   |(?P<id>[A-Za-z_]\w*)
   |(?P<op>->|\+\+|--|<<=|>>=|<=|>=|==|!=|&&|\|\||\+=|-=|\*=|/=|%=|&=|\|=|\^=|<<|>>
          |[-+*/%<>=!&|^~?:;,.()\[\]{}])
    """,
    re.S | re.X,
)

KEYWORDS = frozenset(
    """int char float double void long short unsigned signed _Bool const static
    extern register volatile inline struct union enum typedef if else for while
    return sizeof goto switch case default do break continue""".split()
)
_TYPE_WORDS = frozenset("int char float double void long short unsigned signed _Bool".split())
_QUALIFIERS = frozenset("const static extern register volatile inline".split())
_UNSUPPORTED = frozenset("goto switch case default do break continue".split())
_ASSIGN_OPS = frozenset("= += -= *= /= %= &= |= ^= <<= >>=".split())
_BINARY_LEVELS: list[frozenset[str]] = [
    frozenset({"||"}),
    frozenset({"&&"}),
    frozenset({"|"}),
    frozenset({"^"}),
    frozenset({"&"}),
    frozenset({"==", "!="}),
    frozenset({"<", ">", "<=", ">="}),
    frozenset({"<<", ">>"}),
    frozenset({"+", "-"}),
    frozenset({"*", "/", "%"}),
]


@dataclass(frozen=True)
class Token:
    kind: str  # id | kw | int | float | str | char | op | eof
    text: str
    line: int
    col: int
    end_line: int
    end_col: int


def tokenize(source: str, file: str = "<string>") -> list[Token]:
    line_starts = [0] + [m.end() for m in re.finditer("\n", source)]

    def where(pos: int) -> tuple[int, int]:
        ln = bisect.bisect_right(line_starts, pos) - 1
        return ln + 1, pos - line_starts[ln] + 1

    tokens: list[Token] = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            line, col = where(pos)
            ch = source[pos]
            if source.startswith("/*", pos):
                raise CSyntaxError("unterminated comment", file, line, col)
            if ch == "#":
                raise CSyntaxError("preprocessor directives are not supported", file, line, col)
            raise CSyntaxError(f"unexpected character {ch!r}", file, line, col)
        kind = m.lastgroup
        if kind not in ("ws", "lcomment", "bcomment"):
            text = m.group()
            line, col = where(m.start())
            end_line, end_col = where(m.end() - 1)
            if kind == "id" and text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, text, line, col, end_line, end_col))
        pos = m.end()
    end_line, end_col = where(max(n - 1, 0)) if n else (1, 1)
    tokens.append(Token("eof", "", end_line, end_col, end_line, end_col))
    return tokens


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


class _Parser:
    def __init__(self, source: str, file: str):
        self.file = file
        self.toks = tokenize(source, file)
        self.pos = 0
        self.typedefs: set[str] = set()

    # -- token helpers -----------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("op", "kw") and t.text == text

    def error(self, message: str, tok: Optional[Token] = None) -> CSyntaxError:
        tok = tok or self.peek()
        return CSyntaxError(message, self.file, tok.line, tok.col)

    def expect(self, text: str) -> int:
        if not self.at(text):
            got = self.peek().text or "end of input"
            raise self.error(f"expected {text!r}, got {got!r}")
        self.pos += 1
        return self.pos - 1

    def expect_id(self) -> int:
        if self.peek().kind != "id":
            raise self.error(f"expected identifier, got {self.peek().text or 'end of input'!r}")
        self.pos += 1
        return self.pos - 1

    def span(self, first: int, last: int) -> SourceSpan:
        a, b = self.toks[first], self.toks[last]
        return SourceSpan(self.file, a.line, a.col, b.end_line, b.end_col)

    def node(self, kind, first, last, children=(), roles=(), text=None, info=None, head=-1) -> AstNode:
        return AstNode(
            kind=kind,
            span=self.span(first, last),
            children=tuple(children),
            roles=tuple(roles),
            text=text,
            info=info,
            tok=(first, last),
            head=head,
        )

    # -- types -------------------------------------------------------------

    def at_type_start(self, k: int = 0) -> bool:
        t = self.peek(k)
        if t.kind == "kw":
            return t.text in _TYPE_WORDS or t.text in _QUALIFIERS or t.text in ("struct", "union", "enum")
        if t.kind != "id":
            return False
        if t.text in self.typedefs:
            return True
        nxt = self.peek(k + 1)
        if nxt.kind == "id":
            return True
        if nxt.kind == "op" and nxt.text == "*":
            j = k + 1
            while self.at("*", j):
                j += 1
            if self.peek(j).kind == "id":
                after = self.peek(j + 1)
                return after.kind == "op" and after.text in (";", "=", ",", "[", ")")
        return False

    def parse_type(self) -> str:
        words: list[str] = []
        while self.peek().kind == "kw" and self.peek().text in _QUALIFIERS:
            self.pos += 1
        t = self.peek()
        if t.kind == "kw" and t.text in ("struct", "union", "enum"):
            self.pos += 1
            name = None
            if self.peek().kind == "id":
                name = self.toks[self.expect_id()].text
            if self.at("{"):
                self.skip_braces()
            if name is None:
                name = "<anon>"
            words = [t.text, name]
        elif t.kind == "kw" and t.text in _TYPE_WORDS:
            while self.peek().kind == "kw" and (self.peek().text in _TYPE_WORDS or self.peek().text in _QUALIFIERS):
                if self.peek().text in _TYPE_WORDS:
                    words.append(self.peek().text)
                self.pos += 1
        elif t.kind == "id":
            words = [t.text]
            self.pos += 1
        else:
            raise self.error(f"expected a type, got {t.text!r}")
        while self.peek().kind == "kw" and self.peek().text in _QUALIFIERS:
            self.pos += 1
        return " ".join(words)

    def skip_braces(self) -> None:
        depth = 0
        while True:
            t = self.peek()
            if t.kind == "eof":
                raise self.error("unbalanced braces")
            if self.at("{"):
                depth += 1
            elif self.at("}"):
                depth -= 1
                if depth == 0:
                    self.pos += 1
                    return
            self.pos += 1

    def parse_declarator(self) -> tuple[int, int, tuple[str, ...]]:
        """Returns (pointer depth, name token index, array dims)."""
        depth = 0
        while self.at("*"):
            depth += 1
            self.pos += 1
            while self.peek().kind == "kw" and self.peek().text in _QUALIFIERS:
                self.pos += 1
        name = self.expect_id()
        dims: list[str] = []
        while self.at("["):
            self.pos += 1
            start = self.pos
            while not self.at("]"):
                if self.peek().kind == "eof":
                    raise self.error("unterminated array dimension")
                self.pos += 1
            dims.append(" ".join(t.text for t in self.toks[start : self.pos]))
            self.pos += 1
        return depth, name, tuple(dims)

    # -- top level ---------------------------------------------------------

    def parse_unit(self) -> list[AstTree]:
        trees: list[AstTree] = []
        while self.peek().kind != "eof":
            if self.at(";"):
                self.pos += 1
                continue
            if self.at("typedef"):
                self.pos += 1
                self.parse_type()
                _, name, _ = self.parse_declarator()
                self.typedefs.add(self.toks[name].text)
                self.expect(";")
                continue
            if not self.at_type_start():
                raise self.error(f"unexpected {self.peek().text!r} at top level")
            first = self.pos
            base = self.parse_type()
            if self.at(";"):  # bare struct declaration
                self.pos += 1
                continue
            depth, name, dims = self.parse_declarator()
            if self.at("("):
                params = self.parse_params()
                if self.at(";"):
                    self.pos += 1
                    continue
                trees.append(self.parse_function(first, base, depth, name, params))
                continue
            # global declaration list, parsed for validity and discarded
            while True:
                if self.at("="):
                    self.pos += 1
                    self.parse_assignment()
                if not self.at(","):
                    break
                self.pos += 1
                self.parse_declarator()
            self.expect(";")
        return trees

    def parse_params(self) -> list[AstNode]:
        self.expect("(")
        params: list[AstNode] = []
        if self.at("void") and self.at(")", 1):
            self.pos += 2
            return params
        if self.at(")"):
            self.pos += 1
            return params
        while True:
            first = self.pos
            base = self.parse_type()
            depth, name, dims = self.parse_declarator()
            info = DeclInfo(base, depth, dims)
            params.append(self.node(NodeKind.Param, first, self.pos - 1, text=self.toks[name].text, info=info))
            if self.at(","):
                self.pos += 1
                continue
            self.expect(")")
            return params

    def parse_function(self, first, base, depth, name, params) -> AstTree:
        if not self.at("{"):
            raise self.error("expected function body")
        body = self.parse_compound()
        root = self.node(
            NodeKind.FunctionDef,
            first,
            body.tok[1],
            children=[*params, body],
            roles=["param"] * len(params) + ["body"],
            text=self.toks[name].text,
            info=DeclInfo(base, depth),
        )
        return AstTree(self.toks[name].text, root, body.tok[1] - body.tok[0] + 1, self.file)

    # -- statements --------------------------------------------------------

    def parse_compound(self) -> AstNode:
        first = self.expect("{")
        stmts: list[AstNode] = []
        while not self.at("}"):
            if self.peek().kind == "eof":
                raise self.error("expected '}'")
            stmts.extend(self.parse_statement())
        last = self.expect("}")
        return self.node(NodeKind.Compound, first, last, stmts, ["stmt"] * len(stmts))

    def parse_body(self) -> Optional[AstNode]:
        stmts = self.parse_statement()
        if not stmts:
            return None
        if len(stmts) > 1:
            raise self.error("declaration is not allowed as a loop or branch body")
        return stmts[0]

    def parse_statement(self) -> list[AstNode]:
        t = self.peek()
        if t.kind == "kw" and t.text in _UNSUPPORTED:
            raise self.error(f"'{t.text}' is outside the supported subset")
        if self.at("{"):
            return [self.parse_compound()]
        if self.at(";"):
            self.pos += 1
            return []
        if self.at("if"):
            return [self.parse_if()]
        if self.at("while"):
            return [self.parse_while()]
        if self.at("for"):
            return [self.parse_for()]
        if self.at("return"):
            first = self.pos
            self.pos += 1
            children = []
            if not self.at(";"):
                children.append(self.parse_expression())
            last = self.expect(";")
            return [self.node(NodeKind.Return, first, last, children, ["value"] * len(children))]
        if self.at_type_start():
            return self.parse_declaration()
        first = self.pos
        expr = self.parse_expression()
        last = self.expect(";")
        return [self.as_statement(expr, first, last)]

    def as_statement(self, expr: AstNode, first: int, last: int) -> AstNode:
        return dataclasses.replace(expr, span=self.span(first, last), tok=(first, last))

    def parse_declaration(self) -> list[AstNode]:
        first = self.pos
        base = self.parse_type()
        pending: list[tuple[str, DeclInfo, Optional[AstNode]]] = []
        while True:
            depth, name, dims = self.parse_declarator()
            init = None
            if self.at("="):
                self.pos += 1
                if self.at("{"):
                    raise self.error("aggregate initializers are outside the supported subset")
                init = self.parse_assignment()
            pending.append((self.toks[name].text, DeclInfo(base, depth, dims), init))
            if not self.at(","):
                break
            self.pos += 1
        last = self.expect(";")
        return [
            self.node(
                NodeKind.Decl,
                first,
                last,
                [init] if init is not None else [],
                ["init"] if init is not None else [],
                text=name,
                info=info,
            )
            for name, info, init in pending
        ]

    def parse_if(self) -> AstNode:
        first = self.expect("if")
        self.expect("(")
        cond = self.parse_expression()
        head = self.expect(")")
        children, roles = [cond], ["cond"]
        then = self.parse_body()
        if then is None:
            then = self.node(NodeKind.Compound, head, head)
        children.append(then)
        roles.append("then")
        last = then.tok[1]
        if self.at("else"):
            self.pos += 1
            other = self.parse_body()
            if other is not None:
                children.append(other)
                roles.append("else")
                last = other.tok[1]
            else:
                last = self.pos - 1
        return self.node(NodeKind.If, first, last, children, roles, head=head)

    def parse_while(self) -> AstNode:
        first = self.expect("while")
        self.expect("(")
        cond = self.parse_expression()
        head = self.expect(")")
        children, roles = [cond], ["cond"]
        body = self.parse_body()
        if body is None:
            last = self.pos - 1
        else:
            children.append(body)
            roles.append("body")
            last = body.tok[1]
        return self.node(NodeKind.While, first, last, children, roles, head=head)

    def parse_for(self) -> AstNode:
        first = self.expect("for")
        self.expect("(")
        children: list[AstNode] = []
        roles: list[str] = []
        if self.at_type_start():
            decls = self.parse_declaration()
            children.extend(decls)
            roles.extend(["init"] * len(decls))
        else:
            while not self.at(";"):
                children.append(self.parse_expression())
                roles.append("init")
                if not self.at(","):
                    break
                self.pos += 1
            self.expect(";")
        if not self.at(";"):
            children.append(self.parse_expression())
            roles.append("cond")
        self.expect(";")
        while not self.at(")"):
            children.append(self.parse_expression())
            roles.append("next")
            if not self.at(","):
                break
            self.pos += 1
        head = self.expect(")")
        body = self.parse_body()
        if body is None:
            last = self.pos - 1
        else:
            children.append(body)
            roles.append("body")
            last = body.tok[1]
        return self.node(NodeKind.For, first, last, children, roles, head=head)

    # -- expressions -------------------------------------------------------

    def parse_expression(self) -> AstNode:
        return self.parse_assignment()

    def parse_assignment(self) -> AstNode:
        first = self.pos
        lhs = self.parse_binary(0)
        if self.at("?"):
            raise self.error("conditional expressions are outside the supported subset")
        t = self.peek()
        if t.kind == "op" and t.text in _ASSIGN_OPS:
            if lhs.kind not in (NodeKind.ID, NodeKind.StructRef, NodeKind.ArrayRef, NodeKind.Deref):
                raise self.error("left operand of assignment is not assignable", t)
            self.pos += 1
            rhs = self.parse_assignment()
            last = self.pos - 1
            if t.text != "=":
                rhs = self.node(
                    NodeKind.BinaryOp, first, last, [lhs, rhs], ["left", "right"], text=t.text[:-1]
                )
            return self.node(NodeKind.Assignment, first, last, [lhs, rhs], ["lhs", "rhs"], text="=")
        return lhs

    def parse_binary(self, level: int) -> AstNode:
        if level == len(_BINARY_LEVELS):
            return self.parse_unary()
        first = self.pos
        left = self.parse_binary(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.peek().kind == "op" and self.peek().text in ops:
            op = self.peek().text
            self.pos += 1
            right = self.parse_binary(level + 1)
            left = self.node(NodeKind.BinaryOp, first, self.pos - 1, [left, right], ["left", "right"], text=op)
        return left

    def at_cast(self) -> bool:
        if not self.at("("):
            return False
        t = self.peek(1)
        if t.kind == "kw":
            return t.text in _TYPE_WORDS or t.text in _QUALIFIERS or t.text in ("struct", "union", "enum")
        if t.kind == "id":
            if t.text in self.typedefs:
                return True
            j = 2
            if not self.at("*", j):
                return False
            while self.at("*", j):
                j += 1
            return self.at(")", j)
        return False

    def skip_type_name(self) -> int:
        """Consumes ``( type-name )``; returns index of the closing paren."""
        self.expect("(")
        self.parse_type()
        while self.at("*"):
            self.pos += 1
        return self.expect(")")

    def parse_unary(self) -> AstNode:
        first = self.pos
        t = self.peek()
        if t.kind == "op" and t.text in ("++", "--"):
            self.pos += 1
            operand = self.parse_unary()
            return self.node(NodeKind.UnaryOp, first, self.pos - 1, [operand], ["operand"], text=t.text)
        if t.kind == "op" and t.text in ("-", "+", "!", "~", "&"):
            self.pos += 1
            operand = self.parse_unary()
            return self.node(NodeKind.UnaryOp, first, self.pos - 1, [operand], ["operand"], text=t.text)
        if t.kind == "op" and t.text == "*":
            self.pos += 1
            operand = self.parse_unary()
            return self.node(NodeKind.Deref, first, self.pos - 1, [operand], ["operand"], text="*")
        if t.kind == "kw" and t.text == "sizeof":
            self.pos += 1
            if self.at_cast():
                start = self.pos
                last = self.skip_type_name()
                text = "sizeof(" + " ".join(x.text for x in self.toks[start + 1 : last]) + ")"
                return self.node(NodeKind.Constant, first, last, text=text)
            operand = self.parse_unary()
            return self.node(NodeKind.UnaryOp, first, self.pos - 1, [operand], ["operand"], text="sizeof")
        if self.at_cast():
            self.skip_type_name()
            return self.parse_unary()
        return self.parse_postfix()

    def parse_postfix(self) -> AstNode:
        first = self.pos
        expr = self.parse_primary()
        while True:
            if self.at("["):
                self.pos += 1
                idx = self.parse_expression()
                last = self.expect("]")
                expr = self.node(NodeKind.ArrayRef, first, last, [expr, idx], ["base", "index"])
            elif self.at("("):
                if expr.kind != NodeKind.ID:
                    raise self.error("calls through expressions are outside the supported subset")
                self.pos += 1
                args: list[AstNode] = []
                while not self.at(")"):
                    args.append(self.parse_assignment())
                    if not self.at(","):
                        break
                    self.pos += 1
                last = self.expect(")")
                expr = self.node(
                    NodeKind.Call, first, last, [expr, *args], ["callee"] + ["arg"] * len(args), text=expr.text
                )
            elif self.at(".") or self.at("->"):
                op = self.peek().text
                self.pos += 1
                name = self.expect_id()
                fld = self.node(NodeKind.ID, name, name, text=self.toks[name].text)
                expr = self.node(NodeKind.StructRef, first, name, [expr, fld], ["base", "field"], text=op)
            elif self.at("++") or self.at("--"):
                op = self.peek().text
                last = self.pos
                self.pos += 1
                expr = self.node(NodeKind.UnaryOp, first, last, [expr], ["operand"], text="p" + op)
            else:
                return expr

    def parse_primary(self) -> AstNode:
        t = self.peek()
        i = self.pos
        if t.kind == "id":
            self.pos += 1
            if t.text == "NULL":
                return self.node(NodeKind.Constant, i, i, text="NULL")
            return self.node(NodeKind.ID, i, i, text=t.text)
        if t.kind in ("int", "float", "char"):
            self.pos += 1
            return self.node(NodeKind.Constant, i, i, text=t.text)
        if t.kind == "str":
            self.pos += 1
            while self.peek().kind == "str":
                self.pos += 1
            text = " ".join(x.text for x in self.toks[i : self.pos])
            return self.node(NodeKind.Constant, i, self.pos - 1, text=text)
        if self.at("("):
            self.pos += 1
            expr = self.parse_expression()
            self.expect(")")
            return expr
        raise self.error(f"unexpected {t.text or 'end of input'!r} in expression")


def parse_translation_unit(source_text: str, file: str = "<string>") -> list[AstTree]:
    """Parse ``source_text`` into one :class:`AstTree` per function definition."""
    return _Parser(source_text, file).parse_unit()


def count_tokens(source_text: str) -> int:
    return len(tokenize(source_text)) - 1


# --------------------------------------------------------------------------
# Identifier helpers shared by the analyses
# --------------------------------------------------------------------------


def chain_name(node: AstNode) -> Optional[str]:
    """``a->b.c`` style member chains (and plain identifiers) as one name."""
    if node.kind == NodeKind.ID:
        return node.text
    if node.kind == NodeKind.StructRef:
        base = chain_name(node.children[0])
        if base is None:
            return None
        return f"{base}{node.text}{node.children[1].text}"
    return None


def function_body(root: AstNode) -> list[AstNode]:
    """Statements of a function (original or sliced)."""
    body = root.child("body")
    if body is not None:
        return list(body.children)
    return [c for r, c in zip(root.roles, root.children) if r != "param"]


def enumerate_pointers(ast: AstTree) -> list[PointerDecl]:
    """Every pointer/array parameter and local, plus member chains used as pointers."""
    fn = ast.function_name
    found: list[PointerDecl] = []
    seen: set[str] = set()
    declared: dict[str, AstNode] = {}
    for node in ast.root.walk():
        if node.kind in (NodeKind.Param, NodeKind.Decl):
            declared.setdefault(node.text, node)
            if node.info is not None and node.info.is_pointer and node.text not in seen:
                seen.add(node.text)
                found.append(PointerDecl(node.text, fn, node.info.base_type, node.kind == NodeKind.Param, node.span))
    chains: list[tuple[str, AstNode]] = []
    for node in ast.root.walk():
        target = None
        if node.kind == NodeKind.ArrayRef or node.kind == NodeKind.Deref:
            target = node.children[0]
        elif node.kind == NodeKind.StructRef and node.text == "->":
            target = node.children[0]
        if target is not None and target.kind == NodeKind.StructRef:
            name = chain_name(target)
            if name is not None:
                chains.append((name, target))
    for name, target in chains:
        if name in seen:
            continue
        root_name = name.split("->")[0].split(".")[0]
        root_decl = declared.get(root_name)
        if root_decl is None:
            continue
        seen.add(name)
        found.append(PointerDecl(name, fn, "unknown", root_decl.kind == NodeKind.Param, target.span))
    return found


# --------------------------------------------------------------------------
# Pretty printer
# --------------------------------------------------------------------------


def unparse(node: AstNode, indent: int = 0) -> str:
    """Render a tree back to C text that reparses to the same node kinds."""
    pad = "    " * indent
    k = node.kind
    if k == NodeKind.FunctionDef:
        params = ", ".join(p.info.render(p.text) for p in node.children_with("param")) or "void"
        ret = node.info.render(node.text) if node.info else f"void {node.text}"
        stmts = function_body(node)
        inner = "".join(unparse(s, indent + 1) for s in stmts)
        return f"{pad}{ret}({params})\n{pad}{{\n{inner}{pad}}}\n"
    if k == NodeKind.Compound:
        inner = "".join(unparse(s, indent + 1) for s in node.children)
        return f"{pad}{{\n{inner}{pad}}}\n"
    if k == NodeKind.Decl:
        init = node.child("init")
        tail = f" = {expr_text(init)}" if init is not None else ""
        return f"{pad}{node.info.render(node.text)}{tail};\n"
    if k == NodeKind.Return:
        value = node.child("value")
        return f"{pad}return{' ' + expr_text(value) if value is not None else ''};\n"
    if k == NodeKind.If:
        out = f"{pad}if ({expr_text(node.child('cond'))})\n{_body(node.child('then'), indent)}"
        other = node.child("else")
        if other is not None:
            out += f"{pad}else\n{_body(other, indent)}"
        return out
    if k == NodeKind.While:
        return f"{pad}while ({expr_text(node.child('cond'))})\n{_body(node.child('body'), indent)}"
    if k == NodeKind.For:
        inits = node.children_with("init")
        if inits and inits[0].kind == NodeKind.Decl:
            init_txt = unparse(inits[0]).strip().rstrip(";")
            for d in inits[1:]:
                init_txt += ", " + d.info.render(d.text)[len(d.info.base_type) + 1 :]
                if d.child("init") is not None:
                    init_txt += " = " + expr_text(d.child("init"))
        else:
            init_txt = ", ".join(expr_text(e) for e in inits)
        cond = node.child("cond")
        nxt = ", ".join(expr_text(e) for e in node.children_with("next"))
        header = f"for ({init_txt}; {expr_text(cond) if cond is not None else ''}; {nxt})"
        return f"{pad}{header}\n{_body(node.child('body'), indent)}"
    return f"{pad}{expr_text(node)};\n"


def _body(node: Optional[AstNode], indent: int) -> str:
    if node is None:
        return "    " * (indent + 1) + ";\n"
    if node.kind == NodeKind.Compound:
        return unparse(node, indent)
    return unparse(node, indent + 1)


def expr_text(node: AstNode) -> str:
    k = node.kind
    if k in (NodeKind.ID, NodeKind.Constant):
        return node.text
    if k == NodeKind.ArrayRef:
        return f"{_postfix_operand(node.children[0])}[{expr_text(node.children[1])}]"
    if k == NodeKind.StructRef:
        return f"{_postfix_operand(node.children[0])}{node.text}{node.children[1].text}"
    if k == NodeKind.Call:
        args = ", ".join(expr_text(a) for a in node.children_with("arg"))
        return f"{node.text}({args})"
    if k == NodeKind.Deref:
        return f"*({expr_text(node.children[0])})"
    if k == NodeKind.UnaryOp:
        op = node.text
        inner = expr_text(node.children[0])
        if op.startswith("p"):
            return f"({inner}){op[1:]}"
        if op == "sizeof":
            return f"sizeof ({inner})"
        return f"{op}({inner})"
    if k == NodeKind.BinaryOp:
        return f"({expr_text(node.children[0])} {node.text} {expr_text(node.children[1])})"
    if k == NodeKind.Assignment:
        return f"{expr_text(node.children[0])} = {expr_text(node.children[1])}"
    raise ValueError(f"not an expression: {k.name}")


def _postfix_operand(node: AstNode) -> str:
    text = expr_text(node)
    if node.kind in (NodeKind.ID, NodeKind.StructRef, NodeKind.ArrayRef, NodeKind.Call):
        return text
    return f"({text})"
