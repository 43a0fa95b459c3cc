"""Lexer, parser, labeler and printer for the source language.

A program is a sequence of declaration statements (variable, array and
function declarations) followed by executable statements.  Statements are
assignments, if/else conditionals, while loops, break, return (inside
functions), and @pre/@post specification blocks.  Expressions cover signed
integer arithmetic, comparisons, Boolean connectives, ternary conditionals,
bounded quantifiers and function calls.

Every statement carries a unique integer label used as the program-counter
value for that statement.  Labels follow source line numbers (bumped
minimally when two statements share a line), so the label table of a program
printed one statement per line reads like its line numbers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import CheckError, LexError, ParseError, RestrictionError

# ---------------------------------------------------------------------------
# tokens

KEYWORDS = {
    "int", "bool", "if", "else", "while", "return", "break",
    "true", "false", "forall", "exists",
}

# variables reserved for the one-loop encoding
RESERVED = {"pc", "notdone", "done"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<atpre>@pre\b)
  | (?P<atpost>@post\b)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(::[A-Za-z_][A-Za-z0-9_]*)*)
  | (?P<op>\.\.\.|\.\.|->|<=|>=|==|!=|&&|\|\||[-+*/%<>=!?:;,(){}\[\]])
""", re.VERBOSE | re.DOTALL)


@dataclass(frozen=True)
class Token:
    kind: str      # 'kw', 'ident', 'num', 'op', 'atpre', 'atpost', 'eof'
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    """Split source text into tokens, dropping comments and whitespace."""
    tokens = []
    pos = 0
    line, col = 1, 1
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if not m:
            raise LexError(f"illegal character {source[pos]!r}", line, col)
        text = m.group(0)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# AST

@dataclass
class Const:
    value: int
    is_bool: bool = False


@dataclass
class Var:
    name: str


@dataclass
class ArrayRef:
    name: str
    index: "Expr"
    index2: Optional["Expr"] = None   # second subscript of a 2D access


@dataclass
class Unary:
    op: str            # '-' or '!'
    operand: "Expr"


@dataclass
class Binary:
    op: str            # + - * / % < <= > >= == != && || ->
    left: "Expr"
    right: "Expr"


@dataclass
class Cond:
    cond: "Expr"
    then: "Expr"
    other: "Expr"


@dataclass
class Quant:
    kind: str          # 'forall' | 'exists'
    var: str
    lo: "Expr"
    hi: "Expr"
    body: "Expr"


@dataclass
class Call:
    name: str
    args: list


Expr = Union[Const, Var, ArrayRef, Unary, Binary, Cond, Quant, Call]


@dataclass
class Declaration:
    name: str
    base: str                     # 'int' | 'bool'
    dims: tuple = ()              # () scalar, (n,) 1D, (rows, cols) 2D
    init_const: Optional[int] = None   # constant initializer, folded at parse
    primary: bool = False         # declares a primary-input (nondet) source

    @property
    def is_array(self) -> bool:
        return len(self.dims) > 0

    def size(self) -> int:
        if not self.dims:
            return 1
        s = 1
        for d in self.dims:
            s *= d
        return s


@dataclass
class Assign:
    target: Union[Var, ArrayRef]
    expr: Expr
    label: int = 0


@dataclass
class If:
    cond: Expr
    then: list
    els: list
    label: int = 0


@dataclass
class While:
    cond: Expr
    body: list
    label: int = 0


@dataclass
class Break:
    label: int = 0


@dataclass
class Return:
    expr: Expr
    label: int = 0


@dataclass
class Pre:
    name: str
    expr: Expr
    label: int = 0


@dataclass
class Post:
    name: str
    expr: Expr
    label: int = 0


Statement = Union[Assign, If, While, Break, Return, Pre, Post]


@dataclass
class FunctionDecl:
    name: str
    ret_type: str
    params: list        # of Declaration; unsized array params have dims (0,)
    decls: list         # local Declarations
    body: list          # statements, ending with the single Return
    line: int = 0
    recursive: bool = False


@dataclass
class StackPointer:
    """Frame index variable introduced when a recursive function is resolved."""
    name: str
    max_depth: int


@dataclass
class Program:
    decls: list = field(default_factory=list)
    funcs: list = field(default_factory=list)
    stmts: list = field(default_factory=list)
    func_blocks: list = field(default_factory=list)  # resolved bodies, pc-entry only
    pre_exprs: dict = field(default_factory=dict)    # pre-var name -> expr
    post_exprs: dict = field(default_factory=dict)   # post-var name -> expr
    spec_names: list = field(default_factory=list)   # specnames in source order
    nondet_vars: set = field(default_factory=set)    # use-before-assign variables
    stack_pointers: list = field(default_factory=list)  # of StackPointer
    entry_name: Optional[str] = None
    max_label: int = 0

    def decl(self, name: str) -> Optional[Declaration]:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    def fresh_label(self) -> int:
        self.max_label += 1
        return self.max_label

    def all_statement_lists(self):
        """Top-level statement lists holding labeled code: resolved function
        blocks first, then the main statements."""
        return self.func_blocks + [self.stmts]


# ---------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # -- token helpers

    def peek(self, k=0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, kind, text=None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind, text=None) -> Token:
        t = self.peek()
        if not self.at(kind, text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {t.text!r}", t.line, t.col)
        return self.next()

    def at_type(self) -> bool:
        return self.at("kw", "int") or self.at("kw", "bool")

    # -- program

    def parse_program(self) -> Program:
        # declarations (variables, arrays, functions) precede statements;
        # @pre/@post blocks may appear anywhere among them
        prog = Program()
        started = False
        while not self.at("eof"):
            if self.at_type():
                if self._is_function_decl():
                    if started:
                        t = self.peek()
                        raise RestrictionError(
                            f"function declared after statements "
                            f"(line {t.line})")
                    prog.funcs.append(self.parse_function())
                    continue
                if started:
                    t = self.peek()
                    raise ParseError("declarations must precede statements",
                                     t.line, t.col)
                decls, init_stmt = self.parse_declaration()
                prog.decls.extend(decls)
                if init_stmt is not None:
                    prog.stmts.append(init_stmt)
                    started = True
                continue
            s = self.parse_statement()
            prog.stmts.append(s)
            if not isinstance(s, (Pre, Post)):
                started = True
        return prog

    def _is_function_decl(self) -> bool:
        # type ident '(' ...  -- with possible array brackets after the type
        j = self.i + 1
        while self.toks[j].kind == "op" and self.toks[j].text == "[":
            depth = 1
            j += 1
            while depth and self.toks[j].kind != "eof":
                if self.toks[j].text == "[":
                    depth += 1
                elif self.toks[j].text == "]":
                    depth -= 1
                j += 1
        if self.toks[j].kind != "ident":
            return False
        return self.toks[j + 1].kind == "op" and self.toks[j + 1].text == "("

    # -- declarations

    def parse_declaration(self, allow_unsized=False):
        """Parse one declaration statement.  Returns ([Declaration...], init
        assignment or None).  Accepts both `int a[4];` and `int [4] a;`."""
        base = self.next().text
        dims = self._parse_bracket_dims(allow_unsized)
        name_tok = self.expect("ident")
        name = name_tok.text
        if name in RESERVED:
            raise RestrictionError(f"{name!r} is reserved")
        if not dims:
            dims = self._parse_bracket_dims(allow_unsized)
        init_stmt = None
        decl = Declaration(name, base, tuple(dims))
        if self.at("op", "="):
            self.next()
            expr = self.parse_expr()
            if decl.is_array:
                raise ParseError("array declarations cannot be initialized",
                                 name_tok.line, name_tok.col)
            cv = _const_value(expr)
            if cv is not None:
                decl.init_const = cv
            else:
                init_stmt = Assign(Var(name), expr)
                init_stmt.label = name_tok.line
        self.expect("op", ";")
        return [decl], init_stmt

    def _parse_bracket_dims(self, allow_unsized):
        dims = []
        while self.at("op", "[") and len(dims) < 2:
            self.next()
            if self.at("op", "]"):
                if not allow_unsized:
                    t = self.peek()
                    raise ParseError("array size required", t.line, t.col)
                dims.append(0)
            else:
                t = self.expect("num")
                size = int(t.text)
                if size <= 0:
                    raise ParseError("array size must be positive", t.line, t.col)
                dims.append(size)
            self.expect("op", "]")
        return dims

    def parse_function(self) -> FunctionDecl:
        line = self.peek().line
        ret_type = self.next().text
        name = self.expect("ident").text
        self.expect("op", "(")
        params = []
        if not self.at("op", ")"):
            while True:
                if not self.at_type():
                    t = self.peek()
                    raise ParseError("expected parameter declaration", t.line, t.col)
                base = self.next().text
                dims = self._parse_bracket_dims(allow_unsized=True)
                pname = self.expect("ident").text
                if not dims:
                    dims = self._parse_bracket_dims(allow_unsized=True)
                params.append(Declaration(pname, base, tuple(dims)))
                if self.at("op", ","):
                    self.next()
                    continue
                break
        self.expect("op", ")")
        self.expect("op", "{")
        decls, body = [], []
        returned = False
        started = False
        while not self.at("op", "}"):
            if self.at_type() and not self._is_function_decl():
                if started:
                    t = self.peek()
                    raise ParseError("declarations must precede statements",
                                     t.line, t.col)
                ds, init_stmt = self.parse_declaration()
                decls.extend(ds)
                if init_stmt is not None:
                    body.append(init_stmt)
                    started = True
                continue
            s = self.parse_statement(in_function=True)
            if not isinstance(s, (Pre, Post)):
                started = True
            if returned and not isinstance(s, (Pre, Post)):
                raise RestrictionError(
                    f"statements after return in function {name!r}")
            if isinstance(s, Return):
                returned = True
            body.append(s)
        self.expect("op", "}")
        if not returned:
            raise RestrictionError(f"function {name!r} has no return statement")
        return FunctionDecl(name, ret_type, params, decls, body, line)

    # -- statements

    def parse_statement(self, in_function=False) -> Statement:
        t = self.peek()
        if self.at_type():
            raise ParseError("declarations must precede statements", t.line, t.col)
        if t.kind == "atpre" or t.kind == "atpost":
            self.next()
            name = self.expect("ident").text
            self.expect("op", "{")
            expr = self.parse_expr()
            if self.at("op", ";"):
                self.next()
            self.expect("op", "}")
            _forbid_calls(expr, "specification")
            cls = Pre if t.kind == "atpre" else Post
            return cls(name, expr, label=t.line)
        if self.at("kw", "if"):
            self.next()
            self.expect("op", "(")
            cond = self.parse_expr()
            self.expect("op", ")")
            _forbid_calls(cond, "condition")
            then = self.parse_block(in_function)
            els = []
            if self.at("kw", "else"):
                self.next()
                els = self.parse_block(in_function)
            return If(cond, then, els, label=t.line)
        if self.at("kw", "while"):
            self.next()
            self.expect("op", "(")
            cond = self.parse_expr()
            self.expect("op", ")")
            _forbid_calls(cond, "condition")
            body = self.parse_block(in_function)
            return While(cond, body, label=t.line)
        if self.at("kw", "break"):
            self.next()
            self.expect("op", ";")
            return Break(label=t.line)
        if self.at("kw", "return"):
            if not in_function:
                raise RestrictionError("return outside of a function")
            self.next()
            expr = self.parse_expr()
            self.expect("op", ";")
            _forbid_calls(expr, "return expression")
            return Return(expr, label=t.line)
        # assignment
        if t.kind != "ident":
            raise ParseError(f"expected statement, found {t.text!r}", t.line, t.col)
        target = self.parse_postfix()
        if isinstance(target, Call):
            raise RestrictionError(
                "a call is not a statement; assign its result to a variable")
        if not isinstance(target, (Var, ArrayRef)):
            raise ParseError("invalid assignment target", t.line, t.col)
        if isinstance(target, ArrayRef):
            _forbid_calls(target.index, "subscript")
            if target.index2 is not None:
                _forbid_calls(target.index2, "subscript")
        self.expect("op", "=")
        expr = self.parse_expr()
        self.expect("op", ";")
        _check_call_position(expr)
        return Assign(target, expr, label=t.line)

    def parse_block(self, in_function=False) -> list:
        self.expect("op", "{")
        stmts = []
        while not self.at("op", "}"):
            stmts.append(self.parse_statement(in_function))
        self.expect("op", "}")
        return stmts

    # -- expressions (precedence: ?: < -> < || < && < ==/!= < rel < +- < */% < unary)

    def parse_expr(self) -> Expr:
        return self.parse_ternary()

    def parse_ternary(self) -> Expr:
        c = self.parse_implies()
        if self.at("op", "?"):
            self.next()
            t = self.parse_expr()
            self.expect("op", ":")
            e = self.parse_expr()
            return Cond(c, t, e)
        return c

    def parse_implies(self) -> Expr:
        l = self.parse_or()
        if self.at("op", "->"):
            self.next()
            r = self.parse_implies()
            return Binary("->", l, r)
        return l

    def parse_or(self) -> Expr:
        l = self.parse_and()
        while self.at("op", "||"):
            self.next()
            l = Binary("||", l, self.parse_and())
        return l

    def parse_and(self) -> Expr:
        l = self.parse_equality()
        while self.at("op", "&&"):
            self.next()
            l = Binary("&&", l, self.parse_equality())
        return l

    def parse_equality(self) -> Expr:
        l = self.parse_relational()
        while self.at("op", "==") or self.at("op", "!="):
            op = self.next().text
            l = Binary(op, l, self.parse_relational())
        return l

    def parse_relational(self) -> Expr:
        l = self.parse_additive()
        while self.peek().kind == "op" and self.peek().text in ("<", "<=", ">", ">="):
            op = self.next().text
            l = Binary(op, l, self.parse_additive())
        return l

    def parse_additive(self) -> Expr:
        l = self.parse_multiplicative()
        while self.peek().kind == "op" and self.peek().text in ("+", "-"):
            op = self.next().text
            l = Binary(op, l, self.parse_multiplicative())
        return l

    def parse_multiplicative(self) -> Expr:
        l = self.parse_unary()
        while self.peek().kind == "op" and self.peek().text in ("*", "/", "%"):
            op = self.next().text
            l = Binary(op, l, self.parse_unary())
        return l

    def parse_unary(self) -> Expr:
        if self.at("op", "-"):
            self.next()
            e = self.parse_unary()
            if isinstance(e, Const) and not e.is_bool:
                return Const(-e.value)
            return Unary("-", e)
        if self.at("op", "!"):
            self.next()
            return Unary("!", self.parse_unary())
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        e = self.parse_primary()
        if isinstance(e, Var):
            if self.at("op", "("):
                self.next()
                args = []
                if not self.at("op", ")"):
                    while True:
                        args.append(self.parse_expr())
                        if self.at("op", ","):
                            self.next()
                            continue
                        break
                self.expect("op", ")")
                return Call(e.name, args)
            if self.at("op", "["):
                self.next()
                i1 = self.parse_expr()
                self.expect("op", "]")
                i2 = None
                if self.at("op", "["):
                    self.next()
                    i2 = self.parse_expr()
                    self.expect("op", "]")
                return ArrayRef(e.name, i1, i2)
        return e

    def parse_primary(self) -> Expr:
        t = self.peek()
        if t.kind == "num":
            self.next()
            return Const(int(t.text))
        if self.at("kw", "true"):
            self.next()
            return Const(1, is_bool=True)
        if self.at("kw", "false"):
            self.next()
            return Const(0, is_bool=True)
        if self.at("kw", "forall") or self.at("kw", "exists"):
            kind = self.next().text
            self.expect("op", "(")
            if self.at_type():
                self.next()          # quantifier variable type is optional
            vname = self.expect("ident").text
            self.expect("op", ")")
            self.expect("op", "[")
            lo = self.parse_expr()
            if self.at("op", "..") or self.at("op", "..."):
                self.next()
            else:
                tk = self.peek()
                raise ParseError("expected '..' in quantifier range", tk.line, tk.col)
            hi = self.parse_expr()
            self.expect("op", "]")
            self.expect("op", "{")
            body = self.parse_expr()
            if self.at("op", ";"):
                self.next()
            self.expect("op", "}")
            return Quant(kind, vname, lo, hi, body)
        if t.kind == "ident":
            self.next()
            return Var(t.text)
        if self.at("op", "("):
            self.next()
            e = self.parse_expr()
            self.expect("op", ")")
            return e
        raise ParseError(f"expected expression, found {t.text!r}", t.line, t.col)


def _const_value(e: Expr) -> Optional[int]:
    if isinstance(e, Const):
        return e.value
    return None


def _check_call_position(expr: Expr):
    """Calls may only be the entire right-hand side of an assignment (or an
    entire argument of such a call)."""
    if isinstance(expr, Call):
        for a in expr.args:
            _check_call_position(a)
        return
    for child in expr_children(expr):
        if isinstance(child, Call):
            raise RestrictionError(
                "function calls may not appear inside an expression")
        _check_call_position(child)


def _forbid_calls(expr: Expr, where: str):
    if isinstance(expr, Call):
        raise RestrictionError(f"function calls are not allowed in a {where}")
    for child in expr_children(expr):
        _forbid_calls(child, where)


def expr_children(e: Expr) -> list:
    if isinstance(e, (Const, Var)):
        return []
    if isinstance(e, ArrayRef):
        return [e.index] + ([e.index2] if e.index2 is not None else [])
    if isinstance(e, Unary):
        return [e.operand]
    if isinstance(e, Binary):
        return [e.left, e.right]
    if isinstance(e, Cond):
        return [e.cond, e.then, e.other]
    if isinstance(e, Quant):
        return [e.lo, e.hi, e.body]
    if isinstance(e, Call):
        return list(e.args)
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# parse + entry-point hoisting

def parse(tokens: list[Token]) -> Program:
    return _Parser(tokens).parse_program()


def parse_program(source: str, array_bound: Optional[int] = None) -> Program:
    """Parse source text and normalize it: a program consisting solely of
    function declarations runs its last function as the entry point.  The
    entry function's parameters become program variables (left unassigned so
    they turn into nondeterministic inputs), `rv` holds its result, and its
    return statement becomes an assignment to `rv`."""
    prog = parse(tokenize(source))
    if not prog.stmts and prog.funcs:
        entry = prog.funcs.pop()
        prog.entry_name = entry.name
        for p in entry.params:
            dims = p.dims
            if dims and 0 in dims:
                if array_bound is None:
                    raise CheckError(
                        f"parameter {p.name!r} of entry function needs an "
                        f"array size bound")
                dims = tuple(array_bound if d == 0 else d for d in dims)
            prog.decls.append(Declaration(p.name, p.base, dims))
        prog.decls.extend(entry.decls)
        prog.decls.append(Declaration("rv", entry.ret_type))
        body = list(entry.body)
        # specs may trail the return statement; the return becomes rv = expr
        for i, s in enumerate(body):
            if isinstance(s, Return):
                body[i] = Assign(Var("rv"), s.expr, label=s.label)
        prog.stmts = body
    elif not prog.stmts:
        raise ParseError("program has no statements")
    return prog


# ---------------------------------------------------------------------------
# labeling

def label(prog: Program) -> Program:
    """Assign unique labels in source order.  Labels track source line
    numbers; when two statements start on one line the second is bumped up,
    keeping labels strictly increasing in source order."""
    last = [0]

    def visit(stmts):
        for s in stmts:
            lbl = max(s.label if s.label else last[0] + 1, last[0] + 1)
            s.label = lbl
            last[0] = lbl
            if isinstance(s, If):
                visit(s.then)
                visit(s.els)
            elif isinstance(s, While):
                visit(s.body)

    for f in prog.funcs:
        visit(f.body)
    for block in prog.func_blocks:
        visit(block)
    visit(prog.stmts)
    prog.max_label = last[0]
    check_program(prog)
    return prog


# ---------------------------------------------------------------------------
# control successors

DONE = "done"


@dataclass
class Control:
    """Successor structure of a labeled program.

    next[l] is the label executed after statement l completes (for
    conditionals/loops: after the condition evaluates false paths etc. are
    encoded separately via then_/else_/body).  The distinguished `done`
    label is max_label + 1.
    """
    by_label: dict
    next: dict
    then_: dict
    else_: dict
    body: dict
    done: int
    first: int


def build_control(prog: Program) -> Control:
    by_label, nxt, then_, else_, body_ = {}, {}, {}, {}, {}

    def index(stmts):
        for s in stmts:
            by_label[s.label] = s
            if isinstance(s, If):
                index(s.then)
                index(s.els)
            elif isinstance(s, While):
                index(s.body)

    for lst in prog.all_statement_lists():
        index(lst)
    done = max(by_label, default=0) + 1

    def link(stmts, follow, loop_exit):
        """follow = label after the last statement of this list."""
        for i, s in enumerate(stmts):
            after = stmts[i + 1].label if i + 1 < len(stmts) else follow
            if isinstance(s, If):
                nxt[s.label] = after
                then_[s.label] = s.then[0].label if s.then else after
                else_[s.label] = s.els[0].label if s.els else after
                link(s.then, after, loop_exit)
                link(s.els, after, loop_exit)
            elif isinstance(s, While):
                nxt[s.label] = after
                body_[s.label] = s.body[0].label if s.body else s.label
                link(s.body, s.label, after)
            elif isinstance(s, Break):
                if loop_exit is None:
                    raise CheckError(f"break outside of a loop (label {s.label})")
                nxt[s.label] = loop_exit
            else:
                nxt[s.label] = after

    for block in prog.func_blocks:
        link(block, done, None)
    link(prog.stmts, done, None)
    first = prog.stmts[0].label if prog.stmts else done
    return Control(by_label, nxt, then_, else_, body_, done, first)


def index2d(e1: Expr, e2: Expr, cols: int) -> Expr:
    """Row-major flattening of a 2D subscript: e1*cols + e2."""
    c1 = _const_value(e1)
    c2 = _const_value(e2)
    if c1 is not None and c2 is not None:
        return Const(c1 * cols + c2)
    return Binary("+", Binary("*", e1, Const(cols)), e2)


# ---------------------------------------------------------------------------
# static checks

_BOOL_OPS = {"&&", "||", "->"}
_REL_OPS = {"<", "<=", ">", ">="}
_ARITH_OPS = {"+", "-", "*", "/", "%"}


def expr_sort(e: Expr, prog: Program, funcs=None, extra=None) -> str:
    """Return 'int' or 'bool'; raises CheckError on ill-sorted expressions.
    `extra` maps additional in-scope names (e.g. quantifier variables)."""
    funcs = funcs if funcs is not None else {f.name: f for f in prog.funcs}
    extra = extra or {}

    def sort(e) -> str:
        if isinstance(e, Const):
            return "bool" if e.is_bool else "int"
        if isinstance(e, Var):
            if e.name in extra:
                return extra[e.name]
            d = prog.decl(e.name)
            if d is None:
                raise CheckError(f"undeclared variable {e.name!r}")
            if d.is_array:
                raise CheckError(f"array {e.name!r} used without subscript")
            return d.base
        if isinstance(e, ArrayRef):
            d = prog.decl(e.name)
            if d is None:
                raise CheckError(f"undeclared array {e.name!r}")
            if not d.is_array:
                raise CheckError(f"{e.name!r} is not an array")
            want = 2 if e.index2 is not None else 1
            if len(d.dims) != want:
                raise CheckError(f"{e.name!r} subscript dimension mismatch")
            for ix in ([e.index, e.index2] if want == 2 else [e.index]):
                if sort(ix) != "int":
                    raise CheckError(f"subscript of {e.name!r} must be int")
            return d.base
        if isinstance(e, Unary):
            s = sort(e.operand)
            if e.op == "-" and s != "int":
                raise CheckError("unary '-' needs an int operand")
            if e.op == "!" and s != "bool":
                raise CheckError("'!' needs a bool operand")
            return s
        if isinstance(e, Binary):
            ls, rs = sort(e.left), sort(e.right)
            if e.op in _ARITH_OPS:
                if ls != "int" or rs != "int":
                    raise CheckError(f"{e.op!r} needs int operands")
                return "int"
            if e.op in _REL_OPS:
                if ls != "int" or rs != "int":
                    raise CheckError(f"{e.op!r} needs int operands")
                return "bool"
            if e.op in ("==", "!="):
                if ls != rs:
                    # integer constants compare against bools as 0/1
                    if not (_is_const(e.left) or _is_const(e.right)):
                        raise CheckError(f"{e.op!r} operands disagree in sort")
                return "bool"
            if e.op in _BOOL_OPS:
                if ls != "bool" or rs != "bool":
                    raise CheckError(f"{e.op!r} needs bool operands")
                return "bool"
            raise CheckError(f"unknown operator {e.op!r}")
        if isinstance(e, Cond):
            if sort(e.cond) != "bool":
                raise CheckError("ternary condition must be bool")
            ts, os_ = sort(e.then), sort(e.other)
            if ts != os_ and not (_is_const(e.then) or _is_const(e.other)):
                raise CheckError("ternary arms disagree in sort")
            return ts if not _is_const(e.then) else os_
        if isinstance(e, Quant):
            inner = dict(extra)
            inner[e.var] = "int"
            if expr_sort(e.lo, prog, funcs, extra) != "int" or \
               expr_sort(e.hi, prog, funcs, extra) != "int":
                raise CheckError("quantifier range must be int")
            if expr_sort(e.body, prog, funcs, inner) != "bool":
                raise CheckError("quantifier body must be bool")
            return "bool"
        if isinstance(e, Call):
            f = funcs.get(e.name)
            if f is None:
                raise CheckError(f"call to undeclared function {e.name!r}")
            if len(e.args) != len(f.params):
                raise CheckError(f"wrong number of arguments to {e.name!r}")
            return f.ret_type
        raise TypeError(f"not an expression: {e!r}")

    return sort(e)


def _is_const(e: Expr) -> bool:
    return isinstance(e, Const)


def check_program(prog: Program):
    """Uniqueness of declarations/labels and basic sort checking."""
    seen = set()
    for d in prog.decls:
        if d.name in seen:
            raise CheckError(f"duplicate declaration of {d.name!r}")
        if d.name in RESERVED:
            raise CheckError(f"{d.name!r} is reserved")
        seen.add(d.name)
        for dim in d.dims:
            if dim <= 0:
                raise CheckError(f"array {d.name!r} has a non-positive size")
    labels = set()

    def walk(stmts):
        for s in stmts:
            if s.label in labels:
                raise CheckError(f"duplicate label {s.label}")
            labels.add(s.label)
            if isinstance(s, If):
                walk(s.then)
                walk(s.els)
            elif isinstance(s, While):
                walk(s.body)

    for lst in prog.all_statement_lists():
        walk(lst)


# ---------------------------------------------------------------------------
# printer

def print_expr(e: Expr) -> str:
    if isinstance(e, Const):
        if e.is_bool:
            return "true" if e.value else "false"
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, ArrayRef):
        s = f"{e.name}[{print_expr(e.index)}]"
        if e.index2 is not None:
            s += f"[{print_expr(e.index2)}]"
        return s
    if isinstance(e, Unary):
        return f"{e.op}({print_expr(e.operand)})"
    if isinstance(e, Binary):
        return f"({print_expr(e.left)} {e.op} {print_expr(e.right)})"
    if isinstance(e, Cond):
        return f"({print_expr(e.cond)} ? {print_expr(e.then)} : {print_expr(e.other)})"
    if isinstance(e, Quant):
        return (f"{e.kind}({e.var})[{print_expr(e.lo)} .. {print_expr(e.hi)}]"
                f"{{ {print_expr(e.body)} }}")
    if isinstance(e, Call):
        return f"{e.name}({', '.join(print_expr(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


def print_decl(d: Declaration) -> str:
    dims = "".join(f"[{n}]" for n in d.dims)
    init = f" = {d.init_const}" if d.init_const is not None else ""
    prefix = "primary " if d.primary else ""
    return f"{prefix}{d.base} {d.name}{dims}{init};"


def print_stmt(s: Statement, indent=0, labels=False) -> str:
    pad = " " * indent
    mark = f"  // L{s.label}" if labels else ""

    def block(stmts):
        return "".join(print_stmt(x, indent + 2, labels) for x in stmts)

    if isinstance(s, Assign):
        return f"{pad}{print_expr(s.target)} = {print_expr(s.expr)};{mark}\n"
    if isinstance(s, If):
        out = f"{pad}if ({print_expr(s.cond)}) {{{mark}\n" + block(s.then) + pad + "}"
        if s.els:
            out += " else {\n" + block(s.els) + pad + "}"
        return out + "\n"
    if isinstance(s, While):
        return (f"{pad}while ({print_expr(s.cond)}) {{{mark}\n"
                + block(s.body) + pad + "}\n")
    if isinstance(s, Break):
        return f"{pad}break;{mark}\n"
    if isinstance(s, Return):
        return f"{pad}return {print_expr(s.expr)};{mark}\n"
    if isinstance(s, Pre):
        return f"{pad}@pre {s.name} {{ {print_expr(s.expr)} }}{mark}\n"
    if isinstance(s, Post):
        return f"{pad}@post {s.name} {{ {print_expr(s.expr)} }}{mark}\n"
    raise TypeError(f"not a statement: {s!r}")


def print_program(prog: Program, labels=False) -> str:
    out = []
    for d in prog.decls:
        if not d.primary:
            out.append(print_decl(d) + "\n")
    for f in prog.funcs:
        params = ", ".join(f"{p.base} {p.name}" + "".join(
            "[]" if n == 0 else f"[{n}]" for n in p.dims) for p in f.params)
        out.append(f"{f.ret_type} {f.name}({params}) {{\n")
        for d in f.decls:
            out.append("  " + print_decl(d) + "\n")
        for s in f.body:
            out.append(print_stmt(s, 2, labels))
        out.append("}\n")
    for block in prog.func_blocks:
        for s in block:
            out.append(print_stmt(s, 0, labels))
    for s in prog.stmts:
        out.append(print_stmt(s, 0, labels))
    return "".join(out)


# structural equality that ignores label values
def ast_equal(a, b) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(ast_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, (int, str, bool, type(None))):
        return a == b
    if isinstance(a, set):
        return a == b
    fields = [f for f in a.__dataclass_fields__ if f != "label"]
    return all(ast_equal(getattr(a, f), getattr(b, f)) for f in fields)
