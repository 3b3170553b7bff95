"""Symbolic and numerical toolkit for k-symplectic, k-cosymplectic and multisymplectic field theories."""

__version__ = "0.1.0"

from .symexpr import Expr, parse, to_str, normalize, diff, equal, Verdict  # noqa: E402
from .forms import (  # noqa: E402
    CoordinateFrame,
    DifferentialForm,
    KVectorField,
    SmoothMap,
    VectorField,
)
from .hamiltonian import EquationSet, FieldTheory, SymbolicSection, Variant  # noqa: E402

__all__ = [
    "__version__",
    "Expr",
    "parse",
    "to_str",
    "normalize",
    "diff",
    "equal",
    "Verdict",
    "CoordinateFrame",
    "DifferentialForm",
    "KVectorField",
    "SmoothMap",
    "VectorField",
    "EquationSet",
    "FieldTheory",
    "SymbolicSection",
    "Variant",
]
