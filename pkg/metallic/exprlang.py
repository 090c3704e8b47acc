"""
Scalar expression language.

Expressions are parsed from infix text against the coordinate names of a
chart and evaluated to second-order jets. The grammar is

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom (('^' | '**') unary)?
    atom  := NUMBER | NAME '(' expr ')' | NAME | '(' expr ')'

There is no implicit multiplication. Trees are immutable; the module-level
constructors (``add``, ``mul``, ...) fold constants and are used wherever
expressions are built programmatically, while the parser keeps the tree
exactly as written so that printing and reparsing is the identity.
"""

import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Set

from .domain import ExpressionSyntaxError, UnknownVariable
from .jets import FUNCTIONS, Jet2, seed_jets


class Expr:
    """Base class of expression nodes."""

    __slots__ = ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str
    index: int


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr


BINARY_OPS = ("+", "-", "*", "/", "^")

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()])"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ExpressionSyntaxError(
                f"Unexpected character {text[pos]!r}", _byte_offset(text, pos)
            )
        kind = match.lastgroup or ""
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), _byte_offset(text, pos)))
        pos = match.end()
    tokens.append(_Token("eof", "", _byte_offset(text, len(text))))
    return tokens


class _Parser:
    """Recursive descent over the token list."""

    def __init__(self, text: str, coords: Sequence[str]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.coords = {name: i for i, name in enumerate(coords)}

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _accept(self, *ops: str) -> Optional[_Token]:
        token = self.current
        if token.kind == "op" and token.text in ops:
            return self._advance()
        return None

    def _fail(self, message: str) -> ExpressionSyntaxError:
        token = self.current
        found = "end of input" if token.kind == "eof" else repr(token.text)
        return ExpressionSyntaxError(f"{message}, found {found}", token.offset)

    def parse(self) -> Expr:
        tree = self.expr()
        if self.current.kind != "eof":
            raise self._fail("Expected operator or end of input")
        return tree

    def expr(self) -> Expr:
        tree = self.term()
        while True:
            token = self._accept("+", "-")
            if token is None:
                return tree
            tree = BinOp(token.text, tree, self.term())

    def term(self) -> Expr:
        tree = self.unary()
        while True:
            token = self._accept("*", "/")
            if token is None:
                return tree
            tree = BinOp(token.text, tree, self.unary())

    def unary(self) -> Expr:
        if self._accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self._accept("^", "**"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self._advance()
            return Const(float(token.text))
        if token.kind == "name":
            self._advance()
            if self._accept("("):
                if token.text not in FUNCTIONS:
                    raise ExpressionSyntaxError(
                        f"Unknown function '{token.text}'", token.offset
                    )
                arg = self.expr()
                if not self._accept(")"):
                    raise self._fail("Expected ')'")
                return Call(token.text, arg)
            if token.text in FUNCTIONS:
                raise self._fail(f"Expected '(' after '{token.text}'")
            if token.text not in self.coords:
                raise UnknownVariable(token.text)
            return Var(token.text, self.coords[token.text])
        if self._accept("("):
            inner = self.expr()
            if not self._accept(")"):
                raise self._fail("Expected ')'")
            return inner
        raise self._fail("Expected a number, name or '('")


def parse(text: str, coords: Sequence[str]) -> Expr:
    """Parse infix text into an expression over the given coordinates."""
    if not text or not text.strip():
        raise ExpressionSyntaxError("Empty expression", 0)
    return _Parser(text, coords).parse()


def _precedence(node: Expr) -> int:
    if isinstance(node, BinOp):
        return {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}[node.op]
    if isinstance(node, Neg):
        return 3
    return 5


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        text = str(int(value))
    else:
        text = repr(value)
    return f"({text})" if value < 0 or text.startswith("-") else text


def to_text(node: Expr) -> str:
    """Print with the minimal parentheses that reparse to the same tree."""
    if isinstance(node, Const):
        return _format_number(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        if _precedence(node.operand) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        left, right = to_text(node.left), to_text(node.right)
        lp, rp = _precedence(node.left), _precedence(node.right)
        if node.op == "^":
            if lp <= 4:
                left = f"({left})"
            if rp < 3:
                right = f"({right})"
            return f"{left}^{right}"
        own = _precedence(node)
        if lp < own:
            left = f"({left})"
        if rp <= own:
            right = f"({right})"
        return f"{left} {node.op} {right}"
    raise TypeError(f"Not an expression node: {node!r}")


# Folding constructors


def const(value: float) -> Const:
    return Const(float(value))


def _is_const(node: Expr, value: Optional[float] = None) -> bool:
    return isinstance(node, Const) and (value is None or node.value == value)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a, -1.0):
        return neg(b)
    if _is_const(b, -1.0):
        return neg(a)
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return Const(0.0)
    if _is_const(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return Const(a.value / b.value)
    return BinOp("/", a, b)


def power(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0.0):
        return Const(1.0)
    if _is_const(b, 1.0):
        return a
    return BinOp("^", a, b)


def call(func: str, a: Expr) -> Expr:
    if func not in FUNCTIONS:
        raise ValueError(f"Unknown function '{func}'")
    return Call(func, a)


# Calculus


def differentiate(node: Expr, index: int) -> Expr:
    """Symbolic partial derivative with respect to coordinate ``index``."""
    if isinstance(node, Const):
        return Const(0.0)
    if isinstance(node, Var):
        return Const(1.0 if node.index == index else 0.0)
    if isinstance(node, Neg):
        return neg(differentiate(node.operand, index))
    if isinstance(node, Call):
        inner = differentiate(node.arg, index)
        if _is_const(inner, 0.0):
            return Const(0.0)
        u = node.arg
        outer = {
            "sqrt": lambda: div(Const(0.5), node),
            "exp": lambda: node,
            "log": lambda: div(Const(1.0), u),
            "sin": lambda: Call("cos", u),
            "cos": lambda: neg(Call("sin", u)),
            "sinh": lambda: Call("cosh", u),
            "cosh": lambda: Call("sinh", u),
            "tanh": lambda: sub(Const(1.0), power(node, Const(2.0))),
        }[node.func]()
        return mul(outer, inner)
    if isinstance(node, BinOp):
        a, b = node.left, node.right
        da, db = differentiate(a, index), differentiate(b, index)
        if node.op == "+":
            return add(da, db)
        if node.op == "-":
            return sub(da, db)
        if node.op == "*":
            return add(mul(da, b), mul(a, db))
        if node.op == "/":
            return div(sub(mul(da, b), mul(a, db)), power(b, Const(2.0)))
        if isinstance(b, Const):
            return mul(mul(b, power(a, Const(b.value - 1.0))), da)
        if _is_const(db, 0.0):
            return mul(mul(b, power(a, sub(b, Const(1.0)))), da)
        return mul(
            node,
            add(mul(db, Call("log", a)), div(mul(b, da), a)),
        )
    raise TypeError(f"Not an expression node: {node!r}")


def substitute(node: Expr, replacements: Sequence[Expr]) -> Expr:
    """Replace variable ``i`` by ``replacements[i]`` throughout."""
    if isinstance(node, Const):
        return node
    if isinstance(node, Var):
        return replacements[node.index]
    if isinstance(node, Neg):
        return neg(substitute(node.operand, replacements))
    if isinstance(node, Call):
        return Call(node.func, substitute(node.arg, replacements))
    if isinstance(node, BinOp):
        a = substitute(node.left, replacements)
        b = substitute(node.right, replacements)
        return {"+": add, "-": sub, "*": mul, "/": div, "^": power}[node.op](a, b)
    raise TypeError(f"Not an expression node: {node!r}")


def shift_variables(node: Expr, coords: Sequence[str], offset: int) -> Expr:
    """Re-index variables into a larger chart whose names are ``coords``."""
    count = max(variable_indices(node), default=-1) + 1
    return substitute(
        node, [Var(coords[i + offset], i + offset) for i in range(count)]
    )


def walk(node: Expr) -> Iterator[Expr]:
    yield node
    if isinstance(node, Neg):
        yield from walk(node.operand)
    elif isinstance(node, Call):
        yield from walk(node.arg)
    elif isinstance(node, BinOp):
        yield from walk(node.left)
        yield from walk(node.right)


def variable_indices(node: Expr) -> Set[int]:
    return {n.index for n in walk(node) if isinstance(n, Var)}


# Evaluation


def evaluate(node: Expr, env: Sequence[Jet2]) -> Jet2:
    """
    Evaluate with variable ``i`` bound to ``env[i]``.

    Binding variables to arbitrary jets composes the expression with them,
    so the result is differentiated with respect to whatever ``env`` is
    differentiated with respect to.
    """
    if isinstance(node, Const):
        return Jet2.constant(node.value, env[0].dim if env else 0)
    if isinstance(node, Var):
        return env[node.index]
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](evaluate(node.arg, env))
    if isinstance(node, BinOp):
        a = evaluate(node.left, env)
        if node.op == "^" and isinstance(node.right, Const):
            return a.power(node.right.value)
        b = evaluate(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return a**b
    raise TypeError(f"Not an expression node: {node!r}")


def eval_jet2(node: Expr, point: Sequence[float]) -> Jet2:
    """Value, gradient and Hessian of ``node`` at ``point``."""
    needed = max(variable_indices(node), default=-1) + 1
    if needed > len(point):
        raise ValueError(
            f"Expression uses {needed} coordinates, point has {len(point)}"
        )
    return evaluate(node, seed_jets(point))
