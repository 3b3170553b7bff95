"""Hypothesis strategies for forms and vector fields."""

import itertools

from hypothesis import strategies as st

from geofield.forms import DifferentialForm, VectorField
from geofield.symexpr import Const, Var, parse, to_str

UNARY = ("sin", "cos", "exp")


@st.composite
def coefficients(draw, frame, depth=2):
    names = list(frame.coords)
    if depth == 0 or draw(st.integers(0, 2)) == 0:
        if draw(st.booleans()):
            return Var(draw(st.sampled_from(names)))
        return Const(draw(st.integers(-3, 3)))
    kind = draw(st.sampled_from(["+", "*", "^", "f"]))
    a = draw(coefficients(frame, depth - 1))
    if kind == "^":
        return a ** draw(st.integers(2, 3))
    if kind == "f":
        return parse(f"{draw(st.sampled_from(UNARY))}({to_str(a)})")
    b = draw(coefficients(frame, depth - 1))
    return a + b if kind == "+" else a * b


@st.composite
def forms(draw, frame, degree=None, max_terms=3):
    if degree is None:
        degree = draw(st.integers(0, min(3, frame.dim)))
    idxs = list(itertools.combinations(range(frame.dim), degree))
    chosen = draw(st.lists(st.sampled_from(idxs), min_size=1, max_size=max_terms, unique=True))
    return DifferentialForm(frame, degree, {I: draw(coefficients(frame)) for I in chosen})


@st.composite
def vector_fields(draw, frame):
    return VectorField(frame, [draw(coefficients(frame, 1)) for _ in frame.coords])
