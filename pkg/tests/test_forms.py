import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geofield.forms import (
    DifferentialForm,
    FrameError,
    SmoothMap,
    base_codim1,
    base_volume,
    contract_k,
    coordinate_field,
    d,
    evaluate,
    interior,
    jet_frame,
    kcosym_frame,
    ksym_frame,
    lie_bracket,
    pullback,
    wedge,
)
from geofield.symexpr import Const, normalize, parse

from strategies import forms, vector_fields

FRAME = kcosym_frame(2, 1)  # q1 p1_1 p2_1 t1 t2
SMALL = ksym_frame(1, 1)


def dx(name, frame=FRAME):
    return frame.dx(name)


def test_coordinate_order():
    assert jet_frame(2, 2).coords == ("q1", "q2", "v1_1", "v1_2", "v2_1", "v2_2", "t1", "t2")
    assert kcosym_frame(1, 2).coords == ("q1", "q2", "p1_1", "p1_2", "t1")


def test_wedge_sign_and_render():
    w = wedge(dx("t1"), dx("q1"))
    assert w.render() == "-dq1∧dt1"
    assert wedge(dx("q1"), dx("q1")).is_zero()


def test_contraction_fills_first_slot_first():
    vol = base_volume(FRAME)
    T1, T2 = coordinate_field(FRAME, "t1"), coordinate_field(FRAME, "t2")
    assert contract_k([T1, T2], vol).scalar_value() == Const(1)
    assert contract_k([T2, T1], vol).scalar_value() == Const(-1)
    assert base_codim1(FRAME, 1) == dx("t2")
    assert base_codim1(FRAME, 2) == -dx("t1")


def test_evaluate_slot_order():
    vol = base_volume(FRAME)
    T2 = coordinate_field(FRAME, "t2")
    # (Y) -> vol(Y, d/dt2) = dt1
    assert evaluate(vol, [None, T2]) == dx("t1")


def test_frame_violation_names_variable():
    with pytest.raises(FrameError, match="v1_1"):
        FRAME.check_expr(parse("q1 + v1_1"))


@settings(max_examples=200, deadline=None)
@given(forms(FRAME))
def test_dd_zero(a):
    if a.degree < FRAME.dim - 1:
        assert d(d(a)).is_zero()


@settings(max_examples=100, deadline=None)
@given(forms(FRAME, max_terms=2), forms(FRAME, max_terms=2))
def test_graded_commutativity(a, b):
    sign = -1 if (a.degree * b.degree) % 2 else 1
    ab, ba = wedge(a, b), wedge(b, a)
    assert ab == (ba if sign > 0 else -ba)


@settings(max_examples=100, deadline=None)
@given(forms(FRAME, max_terms=2), forms(FRAME, max_terms=2))
def test_leibniz(a, b):
    if a.degree + b.degree + 1 > FRAME.dim:
        return
    lhs = d(wedge(a, b))
    rhs = wedge(d(a), b) + (wedge(a, d(b)) if a.degree % 2 == 0 else -wedge(a, d(b)))
    assert lhs == rhs


@settings(max_examples=100, deadline=None)
@given(vector_fields(FRAME), forms(FRAME, degree=1, max_terms=2), forms(FRAME, max_terms=2))
def test_interior_antiderivation(X, a, b):
    if a.degree + b.degree > FRAME.dim:
        return
    lhs = interior(X, wedge(a, b))
    rhs = wedge(interior(X, a), b)
    if b.degree > 0:
        rhs = rhs - wedge(a, interior(X, b))
    assert lhs == rhs


@settings(max_examples=50, deadline=None)
@given(vector_fields(SMALL), vector_fields(SMALL), forms(SMALL, degree=1, max_terms=2))
def test_exterior_derivative_on_fields(X, Y, a):
    # da(X, Y) = X(a(Y)) - Y(a(X)) - a([X, Y])
    lhs = contract_k([X, Y], d(a)).scalar_value()
    aX = interior(X, a).scalar_value()
    aY = interior(Y, a).scalar_value()
    rhs = X(aY) - Y(aX) - interior(lie_bracket(X, Y), a).scalar_value()
    assert normalize(lhs - rhs) == Const(0)


@settings(max_examples=60, deadline=None)
@given(forms(SMALL, max_terms=2), st.sampled_from(["sin(q1)*p1_1", "q1 + p1_1^2", "exp(q1)"]))
def test_pullback_commutes_with_d(a, expr):
    phi = SmoothMap(SMALL, SMALL, {"q1": parse("q1*p1_1"), "p1_1": parse(expr)})
    assert pullback(phi, d(a)) == d(pullback(phi, a))


def test_pullback_of_wedge():
    phi = SmoothMap(SMALL, SMALL, {"q1": parse("q1^2"), "p1_1": parse("p1_1 + q1")})
    a, b = SMALL.dx("q1"), parse("p1_1") * SMALL.dx("p1_1")
    assert pullback(phi, wedge(a, b)) == wedge(pullback(phi, a), pullback(phi, b))
    assert pullback(phi, wedge(a, SMALL.dx("p1_1"))).render() == "2*q1 dq1∧dp1_1"
