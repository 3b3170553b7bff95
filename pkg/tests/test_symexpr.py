from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geofield.symexpr import (
    Const,
    ParseError,
    Var,
    Verdict,
    diff,
    equal,
    evaluate,
    evaluate_exact,
    normalize,
    parse,
    subs,
    to_str,
)

sympy = pytest.importorskip("sympy")

NAMES = ["q1", "p1_1", "t1", "v2_1"]


def to_sympy(e):
    text = to_str(e).replace("^", "**")
    return sympy.sympify(text, locals={n: sympy.Symbol(n) for n in NAMES} | {"ln": sympy.log})


@st.composite
def expressions(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        if draw(st.booleans()):
            return Var(draw(st.sampled_from(NAMES)))
        return Const(Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4))))
    op = draw(st.sampled_from(["+", "*", "-", "^", "sin", "exp", "cos"]))
    a = draw(expressions(depth=depth - 1))
    if op == "^":
        return a ** draw(st.integers(0, 3))
    if op in ("sin", "exp", "cos"):
        return parse(f"{op}({to_str(a)})")
    b = draw(expressions(depth=depth - 1))
    return {"+": a + b, "*": a * b, "-": a - b}[op]


def test_parse_basic_precedence():
    assert to_str(parse("1 + 2*3")) == "7"
    assert normalize(parse("-q1^2")) == normalize(-(Var("q1") ** 2))
    assert to_str(normalize(parse("(q1^2 + p1_1^2)/2"))) == "p1_1^2/2 + q1^2/2"


def test_parse_rationals_exact():
    assert parse("0.25") == Const(Fraction(1, 4))
    assert to_str(parse("1/3 + 1/6")) == "1/2"


@pytest.mark.parametrize(
    "text,offset",
    [("q1 +", 4), ("sin q1", 4), ("q1 $ 2", 3), ("q1^1.5", 3), ("foo(q1)", 0), ("(q1", 3), ("1/0", 2)],
)
def test_parse_errors_report_offset(text, offset):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.offset == offset


def test_diff_known_cases():
    assert to_str(normalize(diff(parse("sin(q1)*q1^2"), "q1"))) == to_str(normalize(parse("cos(q1)*q1^2 + 2*q1*sin(q1)")))
    assert normalize(diff(parse("ln(q1)"), "q1")) == normalize(parse("q1^-1"))
    assert normalize(diff(parse("exp(2*t1)"), "q1")) == Const(0)


@settings(max_examples=150, deadline=None)
@given(expressions())
def test_print_parse_roundtrip(e):
    assert normalize(parse(to_str(e))) == normalize(e)


@settings(max_examples=150, deadline=None)
@given(expressions(), st.sampled_from(NAMES))
def test_diff_matches_sympy(e, name):
    ours = to_sympy(normalize(diff(e, name)))
    ref = sympy.diff(to_sympy(e), sympy.Symbol(name))
    assert sympy.simplify(ours - ref) == 0


@settings(max_examples=100, deadline=None)
@given(expressions())
def test_normalize_preserves_value(e):
    pt = {"q1": 0.3, "p1_1": -0.7, "t1": 1.1, "v2_1": 0.45}
    try:
        a = evaluate(e, pt)
    except (ArithmeticError, ValueError):
        return
    assert evaluate(normalize(e), pt) == pytest.approx(a, rel=1e-9, abs=1e-9)


def test_equal_verdicts():
    assert equal(parse("(q1 + 1)^2"), parse("q1^2 + 2*q1 + 1")) is Verdict.EQUAL
    assert equal(parse("sin(q1)^2 + cos(q1)^2"), parse("1")) is Verdict.PROBABLY_EQUAL
    assert equal(parse("q1"), parse("q1 + 10^-3")) is Verdict.NOT_EQUAL


def test_subs_and_exact_evaluation():
    e = subs(parse("q1^2 + p1_1"), {"q1": parse("t1 + 1")})
    assert evaluate_exact(e, {"t1": Fraction(1, 2), "p1_1": Fraction(-1)}) == Fraction(5, 4)


def test_seed_env(monkeypatch):
    from geofield.symexpr import default_seed

    monkeypatch.setenv("GEOFIELD_SEED", "7")
    assert default_seed() == 7
    monkeypatch.delenv("GEOFIELD_SEED")
    assert default_seed() == 20240917
