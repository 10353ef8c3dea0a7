import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from annulus_bvp.exprlang import (BinOp, Call, ExprDomainError, ExprSyntaxError, Neg, Num,
                                  UnknownIdentifierError, Var, VariableNotAllowedError, parse,
                                  evaluate, to_source)

TU = {"t", "u"}

# every expression string shipped with the package plus a few syntactic edge cases
CORPUS = [
    "u^2/(1+u)", "sqrt(u)+u/2", "u/(1+u)", "u^3 + u/2", "u^3", "u^(-1)", "1", "u",
    "4/(2-t)^4", "1/sqrt(R) + 1/2", "r^2 + 1/2", "-u^2", "2^3^2", "-(-u)", "1e-3*u",
    ".5*t", "exp(-t)*sin(u)", "abs(cos(t)-u)", "log(1+u)/u", "((u))", "u - -u",
    "t*u/t/u", "2.5E+2 - u^0.5",
]


def test_example_values():
    assert parse("u", TU)(u=3) == 3
    assert parse("sqrt(u)+u/2", TU)(u=4) == 4
    assert parse("u/(1+u)", TU)(u=1) == 0.5
    assert parse("u^3+u/2", TU)(u=2) == 9


def test_ast_shape():
    e = parse("u^2/(1+u)", TU)
    assert e.node == BinOp("/", BinOp("^", Var("u"), Num(2.0)),
                           BinOp("+", Num(1.0), Var("u")))


def test_reciprocal_domain_error_at_zero():
    e = parse("u^(-1)", TU)
    with pytest.raises(ExprDomainError):
        e(u=0)
    with pytest.raises(ExprDomainError):
        e.vectorized(u=np.array([1.0, 0.0]))
    assert e(u=4) == 0.25


@pytest.mark.parametrize("src", ["sqrt(-1)", "log(0)", "1/(u-u)", "(-2)^0.5", "0^(-2)"])
def test_domain_errors(src):
    with pytest.raises(ExprDomainError):
        parse(src, TU)(u=1.0)


def test_precedence_and_associativity():
    assert parse("a+b*c", {"a", "b", "c"}) == parse("a+(b*c)", {"a", "b", "c"})
    assert parse("2^3^2", set())() == 512.0
    assert parse("-u^2", TU)(u=3) == -9.0
    assert parse("8/4/2", set())() == 1.0
    assert parse("2 ^ -1", set())() == 0.5


def test_integer_powers_exact():
    e = parse("u^3 + u/2", TU)
    for u in (0.1, 1.0 / 3.0, 7.25, 1e-5):
        assert e(u=u) == u * u * u + u / 2
    assert parse("u^0", TU)(u=0.0) == 1.0


@pytest.mark.parametrize("src", ["", "   ", "2u", "u +", "(u", "u)", "sqrt u", "u ** 2", "1..2", "u#"])
def test_syntax_errors(src):
    with pytest.raises(ExprSyntaxError):
        parse(src, TU)


def test_error_offsets():
    with pytest.raises(ExprSyntaxError) as ei:
        parse("u + 2u", TU)
    assert ei.value.byte_offset == 5


def test_variable_roles():
    with pytest.raises(VariableNotAllowedError):
        parse("u + r", TU)
    with pytest.raises(UnknownIdentifierError):
        parse("x + 1", TU)
    with pytest.raises(UnknownIdentifierError):
        parse("U", TU)  # case-sensitive
    assert parse("r*u", {"r", "u"}).variables == {"r", "u"}


def test_whitespace_insensitive():
    assert parse(" u ^ 2 /( 1 + u ) ", TU) == parse("u^2/(1+u)", TU)


def test_vectorized_matches_scalar():
    e = parse("exp(-t)*u^3/(1+u) + sqrt(t)", TU)
    t = np.linspace(0, 1, 7)
    u = np.linspace(0.1, 3, 7)
    vec = e.vectorized(t=t, u=u)
    assert all(vec[i] == e(t=t[i], u=u[i]) for i in range(7))
    assert parse("2", TU).vectorized(t=t).shape == t.shape


@pytest.mark.parametrize("src", CORPUS)
def test_corpus_round_trip(src):
    e = parse(src, {"t", "u", "r", "R"})
    again = parse(e.pretty(), {"t", "u", "r", "R"})
    assert again == e
    assert again.pretty() == e.pretty()


# --- random trees against an independent reference evaluator ----------------

def _ref_pow(a, b):
    if b == math.floor(b) and abs(b) <= 1 << 20:
        n = int(abs(b))
        if a == 0 and b < 0:
            raise ZeroDivisionError
        acc, base = 1.0, a
        first = True
        while n:
            if n & 1:
                acc = base if first else acc * base
                first = False
            n >>= 1
            if n:
                base = base * base
        return 1.0 / acc if b < 0 else acc
    if a == 0 and b > 0:
        return 0.0
    if a <= 0:
        raise ValueError
    return math.exp(b * math.log(a))


def _ref(node, env):
    """Straightforward tree walk, written independently of the package."""
    kind = type(node).__name__
    if kind == "Num":
        return node.value
    if kind == "Var":
        return env[node.name]
    if kind == "Neg":
        return -_ref(node.operand, env)
    if kind == "Call":
        x = _ref(node.arg, env)
        return {"sqrt": math.sqrt, "log": math.log, "exp": math.exp, "abs": abs,
                "sin": math.sin, "cos": math.cos}[node.func](x)
    a, b = _ref(node.left, env), _ref(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    return _ref_pow(a, b)


def _random_tree(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return Var(rng.choice("tu"))
        return Num(rng.choice([0.5, 1.0, 2.0, 3.0, 0.1, 1.5, 4.0]))
    k = rng.random()
    if k < 0.1:
        return Neg(_random_tree(rng, depth - 1))
    if k < 0.25:
        return Call(rng.choice(["sqrt", "log", "exp", "abs", "sin", "cos"]), _random_tree(rng, depth - 1))
    if k < 0.35:
        expo = rng.choice([Num(2.0), Num(3.0), Neg(Num(1.0)), Num(0.5)])
        return BinOp("^", _random_tree(rng, depth - 1), expo)
    return BinOp(rng.choice("+-*/"), _random_tree(rng, depth - 1), _random_tree(rng, depth - 1))


def test_random_trees_zero_ulp():
    rng = random.Random(20240611)
    compared = 0
    trees = 0
    while trees < 1000:
        node = _random_tree(rng, rng.randint(1, 8))
        trees += 1
        e = parse(to_source(node), TU)
        assert e.node == node
        env = {"t": rng.uniform(0.01, 1.0), "u": rng.uniform(0.01, 3.0)}
        try:
            want = _ref(node, env)
        except (ValueError, ZeroDivisionError, OverflowError):
            with pytest.raises(ExprDomainError):
                evaluate(e, env)
            continue
        if not math.isfinite(want):
            continue
        got = evaluate(e, env)
        assert got == want or (math.isnan(got) and math.isnan(want)), to_source(node)
        compared += 1
    assert compared > 500


_leaf = st.one_of(st.sampled_from([Var("t"), Var("u")]),
                  st.floats(0, 1e6, allow_nan=False).map(Num))


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda x: BinOp(*x)),
        st.tuples(st.sampled_from(["sqrt", "log", "exp", "abs", "sin", "cos"]), children)
        .map(lambda x: Call(*x)),
    )


@settings(max_examples=300, deadline=None)
@given(st.recursive(_leaf, _extend, max_leaves=20))
def test_print_reparse_property(node):
    e = parse(to_source(node), TU)
    assert e.node == node


@settings(max_examples=200, deadline=None)
@given(st.recursive(_leaf, _extend, max_leaves=12),
       st.floats(0.01, 1), st.floats(0.01, 5))
def test_evaluation_deterministic(node, t, u):
    e = parse(to_source(node), TU)
    try:
        a = e(t=t, u=u)
    except ExprDomainError:
        with pytest.raises(ExprDomainError):
            e(t=t, u=u)
        return
    b = e(t=t, u=u)
    assert a == b or (math.isnan(a) and math.isnan(b))
