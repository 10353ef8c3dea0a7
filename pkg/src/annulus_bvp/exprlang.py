"""Small expression language for user-supplied nonlinearities and weights.

Grammar (EBNF, whitespace ignored, identifiers case-sensitive)::

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = "-" , unary | power ;
    power   = atom , [ "^" , unary ] ;          (* right-associative *)
    atom    = number | name | func , "(" , expr , ")" | "(" , expr , ")" ;
    func    = "sqrt" | "log" | "exp" | "abs" | "sin" | "cos" ;
    number  = digits [ "." digits ] [ exponent ] | "." digits [ exponent ] ;

``^`` binds tighter than unary minus, so ``-u^2`` is ``-(u^2)``. There is no
implicit multiplication: ``2u`` is a syntax error.

Integer exponents are evaluated by repeated squaring so that small powers of
exactly representable inputs stay exact; other exponents go through
``exp(b*log(a))`` and require ``a > 0`` (or ``a = 0`` with ``b > 0``, giving 0).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

import numpy as np

__all__ = [
    "Num", "Var", "Neg", "BinOp", "Call", "Expr",
    "ExprError", "ExprSyntaxError", "UnknownIdentifierError",
    "VariableNotAllowedError", "ExprDomainError",
    "parse", "evaluate", "to_source", "FUNCTIONS", "KNOWN_VARIABLES",
]

FUNCTIONS = ("sqrt", "log", "exp", "abs", "sin", "cos")
KNOWN_VARIABLES = frozenset({"t", "u", "r"})

# exponents at or below this magnitude go through repeated squaring
_MAX_INT_EXPONENT = 1 << 20


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, source: str, offset: int):
        self.source = source
        self.offset = offset
        self.byte_offset = len(source[:offset].encode("utf-8"))
        super().__init__(f"{message} at byte {self.byte_offset}")


class UnknownIdentifierError(ExprSyntaxError):
    pass


class VariableNotAllowedError(ExprSyntaxError):
    pass


class ExprDomainError(ExprError, ArithmeticError):
    def __init__(self, message: str, subexpr: str):
        self.subexpr = subexpr
        super().__init__(f"{message} in '{subexpr}'")


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]


def to_source(node: Node) -> str:
    """Print a node fully parenthesised; the output reparses to an equal tree."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def _free_variables(node: Node) -> frozenset:
    if isinstance(node, Var):
        return frozenset({node.name})
    if isinstance(node, Num):
        return frozenset()
    if isinstance(node, (Neg, Call)):
        return _free_variables(node.operand if isinstance(node, Neg) else node.arg)
    return _free_variables(node.left) | _free_variables(node.right)


# --- tokenizer / parser ----------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", source, pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, allowed_vars: frozenset):
        self.source = source
        self.allowed = allowed_vars
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        what = repr(tok[1]) if tok[0] != "end" else "end of input"
        return ExprSyntaxError(f"{message}, found {what}", self.source, tok[2])

    def expect(self, text):
        tok = self.peek()
        if tok[1] != text or tok[0] != "op":
            raise self.error(f"expected {text!r}")
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            raise self.error("unexpected token")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, text, pos = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "name":
            self.advance()
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in self.allowed:
                return Var(text)
            if text in KNOWN_VARIABLES:
                raise VariableNotAllowedError(
                    f"variable {text!r} not allowed here (allowed: "
                    f"{', '.join(sorted(self.allowed)) or 'none'})", self.source, pos)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", self.source, pos)
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise self.error("expected a number, variable, function or '('")


# --- evaluation ------------------------------------------------------------

def _int_exponent(b: float):
    if math.isfinite(b) and b == math.floor(b) and abs(b) <= _MAX_INT_EXPONENT:
        return int(b)
    return None


def _ipow(a, n: int):
    """a**n for n >= 0 by repeated squaring; works on floats and arrays."""
    result = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    if result is None:
        return np.ones_like(a) if isinstance(a, np.ndarray) else 1.0
    return result


def _scalar_compile(node: Node) -> Callable[[dict], float]:
    if isinstance(node, Num):
        v = float(node.value)
        return lambda env: v
    if isinstance(node, Var):
        name = node.name
        return lambda env: env[name]
    text = to_source(node)
    if isinstance(node, Neg):
        g = _scalar_compile(node.operand)
        return lambda env: -g(env)
    if isinstance(node, Call):
        g = _scalar_compile(node.arg)
        fn = node.func
        if fn == "sqrt":
            def ev(env):
                x = g(env)
                if x < 0:
                    raise ExprDomainError("sqrt of negative number", text)
                return math.sqrt(x)
        elif fn == "log":
            def ev(env):
                x = g(env)
                if not x > 0:
                    raise ExprDomainError("log of non-positive number", text)
                return math.log(x)
        elif fn == "exp":
            def ev(env):
                try:
                    return math.exp(g(env))
                except OverflowError:
                    raise ExprDomainError("overflow", text) from None
        elif fn == "abs":
            ev = lambda env: abs(g(env))
        elif fn == "sin":
            ev = lambda env: math.sin(g(env))
        else:
            ev = lambda env: math.cos(g(env))
        return ev
    lf = _scalar_compile(node.left)
    rf = _scalar_compile(node.right)
    op = node.op
    if op == "+":
        return lambda env: lf(env) + rf(env)
    if op == "-":
        return lambda env: lf(env) - rf(env)
    if op == "*":
        return lambda env: lf(env) * rf(env)
    if op == "/":
        def div(env):
            a = lf(env)
            b = rf(env)
            if b == 0:
                raise ExprDomainError("division by zero", text)
            return a / b
        return div

    def power(env):
        a = lf(env)
        b = rf(env)
        n = _int_exponent(b)
        if n is not None:
            if n >= 0:
                return float(_ipow(a, n))
            if a == 0:
                raise ExprDomainError("zero raised to a negative power", text)
            return 1.0 / _ipow(a, -n)
        if a < 0:
            raise ExprDomainError("negative base with non-integer exponent", text)
        if a == 0:
            if b > 0:
                return 0.0
            raise ExprDomainError("zero raised to a negative power", text)
        try:
            return math.exp(b * math.log(a))
        except OverflowError:
            raise ExprDomainError("overflow", text) from None
    return power


def _array_compile(node: Node) -> Callable[[dict], np.ndarray]:
    if isinstance(node, Num):
        v = float(node.value)
        return lambda env: v
    if isinstance(node, Var):
        name = node.name
        return lambda env: env[name]
    text = to_source(node)
    if isinstance(node, Neg):
        g = _array_compile(node.operand)
        return lambda env: -g(env)
    if isinstance(node, Call):
        g = _array_compile(node.arg)
        fn = node.func
        if fn == "sqrt":
            def ev(env):
                x = g(env)
                if np.any(np.less(x, 0)):
                    raise ExprDomainError("sqrt of negative number", text)
                return np.sqrt(x)
        elif fn == "log":
            def ev(env):
                x = g(env)
                if not np.all(np.greater(x, 0)):
                    raise ExprDomainError("log of non-positive number", text)
                return np.log(x)
        elif fn == "exp":
            ev = lambda env: np.exp(g(env))
        else:
            ufunc = {"abs": np.abs, "sin": np.sin, "cos": np.cos}[fn]
            ev = lambda env: ufunc(g(env))
        return ev
    lf = _array_compile(node.left)
    rf = _array_compile(node.right)
    op = node.op
    if op == "+":
        return lambda env: lf(env) + rf(env)
    if op == "-":
        return lambda env: lf(env) - rf(env)
    if op == "*":
        return lambda env: lf(env) * rf(env)
    if op == "/":
        def div(env):
            a = lf(env)
            b = rf(env)
            if np.any(np.equal(b, 0)):
                raise ExprDomainError("division by zero", text)
            return np.divide(a, b)
        return div

    def power(env):
        a = np.asarray(lf(env), dtype=float)
        b = np.asarray(rf(env), dtype=float)
        if b.ndim == 0:
            n = _int_exponent(float(b))
            if n is not None:
                if n >= 0:
                    return _ipow(a, n)
                if np.any(a == 0):
                    raise ExprDomainError("zero raised to a negative power", text)
                return 1.0 / _ipow(a, -n)
        a, b = np.broadcast_arrays(a, b)
        out = np.empty(a.shape)
        is_int = (b == np.floor(b)) & (np.abs(b) <= _MAX_INT_EXPONENT)
        if np.any(is_int):
            # elementwise fallback keeps the repeated-squaring semantics
            for idx in zip(*np.nonzero(is_int)):
                n = int(b[idx])
                if n < 0 and a[idx] == 0:
                    raise ExprDomainError("zero raised to a negative power", text)
                out[idx] = _ipow(float(a[idx]), n) if n >= 0 else 1.0 / _ipow(float(a[idx]), -n)
        frac = ~is_int
        if np.any(frac):
            af, bf = a[frac], b[frac]
            if np.any(af < 0):
                raise ExprDomainError("negative base with non-integer exponent", text)
            if np.any((af == 0) & (bf < 0)):
                raise ExprDomainError("zero raised to a negative power", text)
            with np.errstate(divide="ignore"):
                out[frac] = np.where(af == 0, 0.0, np.exp(bf * np.log(np.where(af == 0, 1.0, af))))
        return out
    return power


@dataclass(frozen=True, eq=False)
class Expr:
    """A parsed expression together with its source and allowed variables.

    Calling the object evaluates it on scalars; :meth:`vectorized` evaluates
    on numpy arrays (broadcast against each other). Both raise
    :class:`ExprDomainError` on sqrt/log of negatives, division by zero and
    zero to a negative power.
    """

    node: Node
    source: str
    allowed_vars: frozenset
    variables: frozenset = field(init=False)
    _scalar: Callable = field(init=False, repr=False)
    _array: Callable = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", _free_variables(self.node))
        object.__setattr__(self, "_scalar", _scalar_compile(self.node))
        object.__setattr__(self, "_array", _array_compile(self.node))

    def __eq__(self, other):
        if isinstance(other, Expr):
            return self.node == other.node
        return NotImplemented

    def __hash__(self):
        return hash(self.node)

    def __str__(self):
        return self.source

    def __call__(self, **bindings: float) -> float:
        missing = self.variables - bindings.keys()
        if missing:
            raise ExprError(f"unbound variables: {', '.join(sorted(missing))}")
        return float(self._scalar(bindings))

    def vectorized(self, **bindings) -> np.ndarray:
        missing = self.variables - bindings.keys()
        if missing:
            raise ExprError(f"unbound variables: {', '.join(sorted(missing))}")
        arrays = {k: np.asarray(v, dtype=float) for k, v in bindings.items()}
        out = np.asarray(self._array(arrays), dtype=float)
        shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()
        if out.shape != shape:
            out = np.broadcast_to(out, shape).copy()
        return out

    def pretty(self) -> str:
        return to_source(self.node)

    @property
    def is_constant(self) -> bool:
        return not self.variables


def parse(source: str, allowed_vars: Iterable[str] = KNOWN_VARIABLES) -> Expr:
    """Parse ``source`` into an :class:`Expr` restricted to ``allowed_vars``."""
    if not isinstance(source, str) or not source.strip():
        raise ExprSyntaxError("empty expression", source if isinstance(source, str) else "", 0)
    allowed = frozenset(allowed_vars)
    for name in allowed:
        if name in FUNCTIONS:
            raise ValueError(f"{name!r} is a function name and cannot be a variable")
    node = _Parser(source, allowed).parse()
    return Expr(node, source, allowed)


def evaluate(e: Expr, bindings: dict) -> float:
    return e(**bindings)
