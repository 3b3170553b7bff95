"""Hamilton–De Donder–Weyl equations and Hamiltonian k-vector fields.

Two unknown alphabets are used for residual systems:

* jet symbols ``d{coord}_dt{B}`` for the first partial derivative of a
  section component along ``tB`` (e.g. ``dp2_1_dt2``);
* component symbols ``X{A}_{coord}`` for the ``coord`` component of the
  ``A``-th field of a k-vector field (e.g. ``X1_p1_1``).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

from .forms import (
    CoordinateFrame,
    DifferentialForm,
    KVectorField,
    VectorField,
    d,
    interior,
    jet_frame,
    kcosym_frame,
    ksym_frame,
    lie_bracket,
    tangent_frame,
)
from .canonical import canonical_kcosymplectic, canonical_ksymplectic
from .symexpr import (
    ONE,
    ZERO,
    Const,
    Expr,
    Var,
    Verdict,
    add,
    as_expr,
    diff,
    equal,
    natural_key,
    normalize,
    subs,
    to_str,
)

__all__ = [
    "Variant",
    "FieldTheory",
    "EquationSet",
    "SymbolicSection",
    "SectionReport",
    "GeometricResidual",
    "frame_for",
    "jet_symbol",
    "component_symbol",
    "hdw_equations",
    "geometric_residual",
    "kvector_equations",
    "solve_kvector",
    "verify_section",
    "substitute_kvector",
    "free_count",
    "ADMISSIBILITY_NOTE",
    "commutators",
    "delta_rows",
]

ADMISSIBILITY_NOTE = (
    "admissibility (image of the section is a closed embedded submanifold) is assumed, not checked"
)


class Variant(str, enum.Enum):
    KSymHam = "KSymHam"
    KCosymHam = "KCosymHam"
    KSymLag = "KSymLag"
    KCosymLag = "KCosymLag"
    MsHamSection = "MsHamSection"
    MsLag = "MsLag"

    @property
    def hamiltonian(self) -> bool:
        return self in (Variant.KSymHam, Variant.KCosymHam, Variant.MsHamSection)

    @property
    def time_dependent(self) -> bool:
        return self not in (Variant.KSymHam, Variant.KSymLag)


def frame_for(variant: Variant, k: int, n: int) -> CoordinateFrame:
    return {
        Variant.KSymHam: ksym_frame,
        Variant.KCosymHam: kcosym_frame,
        Variant.MsHamSection: kcosym_frame,
        Variant.KSymLag: tangent_frame,
        Variant.KCosymLag: jet_frame,
        Variant.MsLag: jet_frame,
    }[Variant(variant)](k, n)


@dataclass(frozen=True)
class FieldTheory:
    """A generating function (H, 𝓗, L or 𝓛) on the frame of its variant."""

    variant: Variant
    k: int
    n: int
    generator: Expr

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "generator", normalize(as_expr(self.generator)))
        self.frame.check_expr(self.generator, "generating function")

    @property
    def frame(self) -> CoordinateFrame:
        return frame_for(self.variant, self.k, self.n)

    def with_variant(self, variant: Variant) -> "FieldTheory":
        return FieldTheory(variant, self.k, self.n, self.generator)


def jet_symbol(coord: str, B: int) -> str:
    return f"d{coord}_dt{B}"


def component_symbol(A: int, coord: str) -> str:
    return f"X{A}_{coord}"


@dataclass
class EquationSet:
    """Residual system ``r = 0`` over a jet or component alphabet."""

    kind: str
    frame: CoordinateFrame
    unknowns: List[str]
    residuals: List[Expr]
    labels: List[str]
    name: str = ""
    solved: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("jet", "component"):
            raise ValueError(f"unknown alphabet {self.kind!r}")
        self.residuals = [normalize(r) for r in self.residuals]

    def __len__(self):
        return len(self.residuals)

    def render(self) -> str:
        lines = [f"# {self.name}" if self.name else "#"]
        width = max((len(lb) for lb in self.labels), default=0)
        for lb, r in zip(self.labels, self.residuals):
            lines.append(f"{lb.ljust(width)} : {to_str(r)} = 0")
        if self.solved:
            lines.append("# solved form")
            lines.extend(self.solved)
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "alphabet": self.kind,
            "bundle": self.frame.bundle,
            "unknowns": list(self.unknowns),
            "equations": [{"label": lb, "residual": to_str(r)} for lb, r in zip(self.labels, self.residuals)],
        }

    def substitute(self, mapping: Mapping[str, Expr]) -> List[Expr]:
        return [normalize(subs(r, mapping)) for r in self.residuals]


@dataclass(frozen=True)
class SymbolicSection:
    """Section of a bundle over ℝᵏ: one expression in ``t1..tk`` per fibre coordinate."""

    k: int
    components: Dict[str, Expr]

    def __post_init__(self):
        comps = {c: normalize(as_expr(e)) for c, e in self.components.items()}
        base = {f"t{A}" for A in range(1, self.k + 1)}
        for c, e in comps.items():
            extra = sorted(e.free - base, key=natural_key)
            if extra:
                raise ValueError(f"section component {c} depends on {extra[0]}, not a base variable")
        object.__setattr__(self, "components", comps)

    def check_frame(self, frame: CoordinateFrame):
        expected = [c for c in frame.coords if not (frame.has_t and c in {f"t{A}" for A in range(1, frame.k + 1)})]
        if sorted(self.components, key=natural_key) != sorted(expected, key=natural_key):
            missing = [c for c in expected if c not in self.components]
            extra = [c for c in self.components if c not in expected]
            raise ValueError(f"section variable mismatch: missing {missing}, unexpected {extra}")
        if frame.k != self.k:
            raise ValueError("section base dimension differs from frame k")

    def substitution(self, frame: CoordinateFrame) -> Dict[str, Expr]:
        """Coordinates and first jets of every coordinate, as functions of t."""
        self.check_frame(frame)
        out: Dict[str, Expr] = dict(self.components)
        for c, e in self.components.items():
            for B in range(1, self.k + 1):
                out[jet_symbol(c, B)] = normalize(diff(e, f"t{B}"))
        if frame.has_t:
            for A in range(1, self.k + 1):
                for B in range(1, self.k + 1):
                    out[jet_symbol(f"t{A}", B)] = Const(1 if A == B else 0)
        return out

    def derivative(self, coord: str, B: int) -> Expr:
        return normalize(diff(self.components[coord], f"t{B}"))


@dataclass
class SectionReport:
    equation: str
    labels: List[str]
    residuals: List[Expr]
    verdict: str
    note: str = ADMISSIBILITY_NOTE

    @property
    def passed(self) -> bool:
        return self.verdict == "Pass"

    def to_json(self) -> dict:
        return {
            "equation": self.equation,
            "verdict": self.verdict,
            "note": self.note,
            "residuals": [{"label": lb, "residual": to_str(r)} for lb, r in zip(self.labels, self.residuals)],
        }


def _report(name: str, labels, residuals) -> SectionReport:
    ok = all(equal(r, ZERO) is not Verdict.NOT_EQUAL for r in residuals)
    return SectionReport(name, list(labels), [normalize(r) for r in residuals], "Pass" if ok else "Fail")


# ---------------------------------------------------------------------------
# Section equations


def _require_hamiltonian(sys: FieldTheory):
    if not sys.variant.hamiltonian:
        raise ValueError(f"{sys.variant.value} is not a Hamiltonian variant")


def hdw_equations(sys: FieldTheory) -> EquationSet:
    """``∂H/∂qⁱ + Σ_A ∂ψᴬᵢ/∂tᴬ = 0`` and ``∂H/∂pᴬᵢ − ∂ψⁱ/∂tᴬ = 0``."""
    _require_hamiltonian(sys)
    H, k, n = sys.generator, sys.k, sys.n
    res, labels, solved, unknowns = [], [], [], []
    for i in range(1, n + 1):
        div = add(*(Var(jet_symbol(f"p{A}_{i}", A)) for A in range(1, k + 1)))
        res.append(diff(H, f"q{i}") + div)
        labels.append(f"q{i}")
        lhs = " + ".join(jet_symbol(f"p{A}_{i}", A) for A in range(1, k + 1))
        solved.append(f"{lhs} = {to_str(normalize(-diff(H, f'q{i}')))}")
    for A in range(1, k + 1):
        for i in range(1, n + 1):
            res.append(diff(H, f"p{A}_{i}") - Var(jet_symbol(f"q{i}", A)))
            labels.append(f"p{A}_{i}")
            solved.append(f"{jet_symbol(f'q{i}', A)} = {to_str(normalize(diff(H, f'p{A}_{i}')))}")
    frame = sys.frame
    for c in frame.coords:
        if c.startswith("t"):
            continue
        unknowns += [jet_symbol(c, B) for B in range(1, k + 1)]
    return EquationSet("jet", frame, unknowns, res, labels, f"HDW equations ({sys.variant.value})", solved)


def verify_section(sys: FieldTheory, s: SymbolicSection) -> SectionReport:
    """Substitute a section and its first derivatives into the HDW system."""
    eqs = hdw_equations(sys)
    residuals = eqs.substitute(s.substitution(sys.frame))
    return _report(eqs.name, eqs.labels, residuals)


# ---------------------------------------------------------------------------
# Geometric equations


@dataclass
class GeometricResidual:
    form: DifferentialForm
    delta: List[Expr]

    def is_zero(self) -> bool:
        return self.form.is_zero() and all(r == ZERO for r in self.delta)

    def verdict(self) -> Verdict:
        worst = Verdict.EQUAL
        for c in list(self.form.terms.values()) + list(self.delta):
            v = equal(c, ZERO)
            if v is Verdict.NOT_EQUAL:
                return v
            if v is Verdict.PROBABLY_EQUAL:
                worst = v
        return worst


def _check_k(sys: FieldTheory, X: KVectorField):
    if X.frame != sys.frame:
        raise ValueError(f"k-vector field lives on {X.frame.bundle}, system on {sys.frame.bundle}")
    if len(X) != sys.k:
        raise ValueError(f"expected {sys.k} fields, got {len(X)}")


def geometric_residual(sys: FieldTheory, X: KVectorField) -> GeometricResidual:
    """``Σ i(X_A)ωᴬ − dH`` or ``Σ i(X̄_A)Ωᴬ − d𝓗 + Σ ∂𝓗/∂tᴬ dtᴬ`` plus δ-residuals."""
    _require_hamiltonian(sys)
    _check_k(sys, X)
    frame, H = sys.frame, sys.generator
    if frame.has_t:
        omegas = canonical_kcosymplectic(sys.k, sys.n, frame).omega
    else:
        omegas = canonical_ksymplectic(sys.k, sys.n).omega
    total = DifferentialForm.zero(frame, 1)
    for XA, w in zip(X, omegas):
        total = total + interior(XA, w)
    total = total - d(DifferentialForm.scalar(frame, H))
    delta = []
    if frame.has_t:
        for A in range(1, sys.k + 1):
            total = total + diff(H, f"t{A}") * frame.dx(f"t{A}")
        for A in range(1, sys.k + 1):
            for B in range(1, sys.k + 1):
                delta.append(normalize(X[B - 1][f"t{A}"] - (1 if A == B else 0)))
    return GeometricResidual(total, delta)


def _component_unknowns(frame: CoordinateFrame) -> List[str]:
    return [component_symbol(A, c) for A in range(1, frame.k + 1) for c in frame.coords]


def delta_rows(frame: CoordinateFrame):
    """``X{A}_t{B} − δ`` rows for frames with base coordinates."""
    res, labels = [], []
    for A in range(1, frame.k + 1):
        for B in range(1, frame.k + 1):
            res.append(Var(component_symbol(A, f"t{B}")) - (1 if A == B else 0))
            labels.append(f"X{A}(t{B})")
    return res, labels


def kvector_equations(sys: FieldTheory) -> EquationSet:
    """Component equations for Hamiltonian k-vector fields."""
    _require_hamiltonian(sys)
    H, k, n, frame = sys.generator, sys.k, sys.n, sys.frame
    res, labels = [], []
    if frame.has_t:
        res, labels = delta_rows(frame)
    for i in range(1, n + 1):
        res.append(diff(H, f"q{i}") + add(*(Var(component_symbol(A, f"p{A}_{i}")) for A in range(1, k + 1))))
        labels.append(f"q{i}")
    for A in range(1, k + 1):
        for i in range(1, n + 1):
            res.append(diff(H, f"p{A}_{i}") - Var(component_symbol(A, f"q{i}")))
            labels.append(f"p{A}_{i}")
    return EquationSet("component", frame, _component_unknowns(frame), res, labels, f"k-vector field equations ({sys.variant.value})")


def free_count(eqs: EquationSet, restrict_to: Optional[Sequence[str]] = None) -> int:
    """Number of unknowns left free by the system (rank at a sample point)."""
    from .linear import affine_rows, numeric_rows, rank, sample_points

    unknowns = list(restrict_to) if restrict_to is not None else eqs.unknowns
    rows = affine_rows(eqs.residuals, eqs.unknowns)
    if not all(r.affine for r in rows):
        raise ValueError("system is not affine in its unknowns")
    pt = sample_points(eqs.frame.coords, 1, 7)[0]
    num, exact = numeric_rows(rows, eqs.unknowns, pt)
    cols = [eqs.unknowns.index(u) for u in unknowns]
    sub = [[r[c] for c in cols] for r in num]
    return len(unknowns) - rank(sub, exact)


def substitute_kvector(eqs: EquationSet, X: KVectorField) -> List[Expr]:
    mapping = {}
    for A, XA in enumerate(X, 1):
        for c, v in XA.as_dict().items():
            mapping[component_symbol(A, c)] = v
    return eqs.substitute(mapping)


def solve_kvector(sys: FieldTheory, gauge: str = "DiagonalSplit", overrides: Optional[Mapping[str, object]] = None) -> KVectorField:
    """Particular solution of the component equations.

    ``DiagonalSplit``: ``(X_A)ⁱ = ∂H/∂pᴬᵢ`` and ``(X_A)ᴮᵢ = −δᴮ_A (1/k) ∂H/∂qⁱ``.
    ``overrides`` may fix free momentum components ``X{A}_p{B}_{i}``; the
    diagonal components that are not overridden share what remains of the
    trace constraint equally.
    """
    _require_hamiltonian(sys)
    if gauge != "DiagonalSplit":
        raise ValueError(f"unknown gauge {gauge!r}")
    H, k, n, frame = sys.generator, sys.k, sys.n, sys.frame
    over = {name: normalize(as_expr(v)) for name, v in (overrides or {}).items()}
    allowed = {component_symbol(A, f"p{B}_{i}") for A in range(1, k + 1) for B in range(1, k + 1) for i in range(1, n + 1)}
    for name, v in over.items():
        if name not in allowed:
            raise ValueError(f"{name} is not a free momentum component")
        frame.check_expr(v, name)
    comps: List[Dict[str, Expr]] = [dict() for _ in range(k)]
    for A in range(1, k + 1):
        for i in range(1, n + 1):
            comps[A - 1][f"q{i}"] = diff(H, f"p{A}_{i}")
        if frame.has_t:
            comps[A - 1][f"t{A}"] = ONE
    for i in range(1, n + 1):
        target = normalize(-diff(H, f"q{i}"))
        fixed = ZERO
        open_diag = []
        for A in range(1, k + 1):
            nm = component_symbol(A, f"p{A}_{i}")
            if nm in over:
                fixed = fixed + over[nm]
                comps[A - 1][f"p{A}_{i}"] = over[nm]
            else:
                open_diag.append(A)
        rest = normalize(target - fixed)
        if open_diag:
            share = normalize(rest * Const(Fraction(1, len(open_diag))))
            for A in open_diag:
                comps[A - 1][f"p{A}_{i}"] = share
        elif equal(rest, ZERO) is Verdict.NOT_EQUAL:
            raise ValueError(f"overrides violate the trace constraint for q{i}: remainder {to_str(rest)}")
        for A in range(1, k + 1):
            for B in range(1, k + 1):
                if A != B:
                    comps[A - 1][f"p{B}_{i}"] = over.get(component_symbol(A, f"p{B}_{i}"), ZERO)
    return KVectorField(VectorField(frame, c) for c in comps)


def commutators(X: KVectorField) -> Dict[str, VectorField]:
    """``[X_A, X_B]`` for ``A < B``."""
    out = {}
    for A in range(len(X)):
        for B in range(A + 1, len(X)):
            out[f"[X{A + 1},X{B + 1}]"] = lie_bracket(X[A], X[B])
    return out
