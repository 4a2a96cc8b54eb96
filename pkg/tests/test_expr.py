import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slts.expr import BinOp, Call, EvaluationError, Neg, Num, ParseError, Var, parse_coefficient


def test_constant_is_constant_everywhere():
    e = parse_coefficient("1")
    assert e.is_constant()
    assert np.all(e(np.linspace(-3, 3, 7)) == 1.0)


@pytest.mark.parametrize("text, t, expected", [
    ("t^2 + 1", 2.0, 5.0),
    ("sin(t)/2", 0.0, 0.0),
    ("-t^2", 3.0, -9.0),
    ("2^3^2", 0.0, 512.0),
    ("1 - 2 - 3", 0.0, -4.0),
    ("8 / 4 / 2", 0.0, 1.0),
    ("exp(log(t)) * sqrt(t)", 4.0, 8.0),
    ("abs(-t) + 2*pi", 1.0, 1 + 2 * math.pi),
    ("1.5e1 + .5", 0.0, 15.5),
])
def test_precedence_and_functions(text, t, expected):
    assert parse_coefficient(text)(t) == pytest.approx(expected, rel=1e-15)


def test_scalar_input_keeps_scalar_shape():
    assert np.shape(parse_coefficient("3")(0.5)) == ()


@pytest.mark.parametrize("text, offset", [("t +", 3), ("(t", 2), ("t t", 2), ("", 0), ("2 * * t", 4)])
def test_syntax_error_offset(text, offset):
    with pytest.raises(ParseError) as info:
        parse_coefficient(text)
    assert info.value.offset == offset
    assert f"offset {offset}" in str(info.value)
    assert info.value.expected


def test_unknown_identifier():
    with pytest.raises(ParseError, match="x"):
        parse_coefficient("x + 1")
    with pytest.raises(ParseError):
        parse_coefficient("tan(t)")


@pytest.mark.parametrize("text, t", [("1/t", 0.0), ("sqrt(t)", -1.0), ("log(t)", 0.0), ("1/(t-1)", [0.0, 1.0])])
def test_undefined_values_are_reported(text, t):
    with pytest.raises(EvaluationError):
        parse_coefficient(text)(t)


def test_evaluation_is_deterministic():
    e = parse_coefficient("sin(3*t) * exp(-t^2) + t/7")
    x = np.linspace(-2, 2, 101)
    assert np.array_equal(e(x), e(x))


# random trees for the print/re-parse round trip
leaves = st.one_of(st.just(Var()), st.floats(-50, 50, allow_nan=False).map(Num))


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from("+-*"), children, children).map(lambda a: BinOp(*a)),
        children.map(Neg),
        st.tuples(st.sampled_from(["sin", "cos", "abs"]), children).map(lambda a: Call(*a)),
        children.map(lambda c: Call("exp", Call("sin", c))),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=150, deadline=None)
@given(trees)
def test_print_reparse_round_trip(tree):
    x = np.random.default_rng(0).uniform(-3, 3, 100)
    again = parse_coefficient(str(tree))
    np.testing.assert_allclose(again(x), tree(x), rtol=1e-12, atol=1e-12)
