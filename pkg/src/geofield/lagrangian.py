"""Lagrangian side of the k-symplectic and k-cosymplectic formalisms.

Velocities are named ``v{A}_{i}`` (copy index first, configuration index
second), the same order as the momenta ``p{A}_{i}``.  Second-order jets of a
base map are ``d2q{i}_dt{A}dt{B}`` with ``A ≤ B``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Tuple

from .canonical import k_tangent_structure, liouville_field
from .forms import (
    CoordinateFrame,
    DifferentialForm,
    KVectorField,
    SmoothMap,
    VectorField,
    apply_tensor,
    d,
    kcosym_frame,
    ksym_frame,
)
from .hamiltonian import (
    EquationSet,
    FieldTheory,
    SectionReport,
    SymbolicSection,
    Variant,
    component_symbol,
    delta_rows,
    jet_symbol,
    _report,
)
from .linear import affine_rows, numeric_rows, rank, sample_points
from .symexpr import (
    ONE,
    ZERO,
    Const,
    EvalError,
    Expr,
    Var,
    Verdict,
    add,
    as_expr,
    default_seed,
    diff,
    equal,
    evaluate,
    mul,
    natural_key,
    normalize,
    subs,
    to_str,
)

__all__ = [
    "LagrangianForms",
    "RegularityReport",
    "SopdeAnalysis",
    "lagrangian_forms",
    "energy",
    "legendre",
    "legendre_inverse",
    "regularity",
    "euler_lagrange_equations",
    "verify_euler_lagrange",
    "lagrangian_kvector_equations",
    "sopde_check",
    "sopde_forced",
    "solve_lagrangian_kvector",
    "prolong",
    "lagrangian_section_equations",
    "second_jet_symbol",
    "determinant",
    "inverse_matrix",
]


def _require_lagrangian(sys: FieldTheory):
    if sys.variant.hamiltonian:
        raise ValueError(f"{sys.variant.value} is not a Lagrangian variant")


def _vel(A: int, i: int) -> str:
    return f"v{A}_{i}"


def _velocities(k: int, n: int) -> List[str]:
    return [_vel(A, i) for A in range(1, k + 1) for i in range(1, n + 1)]


@dataclass
class LagrangianForms:
    theta: List[DifferentialForm]
    omega: List[DifferentialForm]


def lagrangian_forms(sys: FieldTheory) -> LagrangianForms:
    """``θ_Lᴬ = dL∘Sᴬ`` and ``ω_Lᴬ = −dθ_Lᴬ`` (also on ℝᵏ×T¹ₖQ)."""
    _require_lagrangian(sys)
    frame = sys.frame
    dL = d(DifferentialForm.scalar(frame, sys.generator))
    thetas = [apply_tensor(S, dL) for S in k_tangent_structure(frame)]
    return LagrangianForms(thetas, [-d(t) for t in thetas])


def energy(sys: FieldTheory) -> Expr:
    """``E_L = Δ(L) − L``."""
    _require_lagrangian(sys)
    return normalize(liouville_field(sys.frame)(sys.generator) - sys.generator)


def legendre(sys: FieldTheory) -> SmoothMap:
    """``pᴬᵢ = ∂L/∂vᴬᵢ``; identity on ``q`` (and ``t``)."""
    _require_lagrangian(sys)
    src = sys.frame
    tgt = kcosym_frame(sys.k, sys.n) if src.has_t else ksym_frame(sys.k, sys.n)
    exprs = {}
    for c in tgt.coords:
        if c.startswith("p"):
            A, i = c[1:].split("_")
            exprs[c] = diff(sys.generator, _vel(int(A), int(i)))
        else:
            exprs[c] = Var(c)
    return SmoothMap(src, tgt, exprs, "FL")


# ---------------------------------------------------------------------------
# Matrices of expressions


def determinant(M: List[List[Expr]]) -> Expr:
    """Laplace expansion with memoised minors (fine up to 6×6)."""
    n = len(M)

    @lru_cache(maxsize=None)
    def minor(row: int, cols: Tuple[int, ...]) -> Expr:
        if row == n:
            return ONE
        acc = ZERO
        for pos, c in enumerate(cols):
            entry = M[row][c]
            if entry == ZERO:
                continue
            sub = minor(row + 1, cols[:pos] + cols[pos + 1 :])
            term = mul(entry, sub)
            acc = add(acc, term if pos % 2 == 0 else mul(Const(-1), term))
        return normalize(acc)

    return minor(0, tuple(range(n)))


def inverse_matrix(M: List[List[Expr]]) -> Optional[List[List[Expr]]]:
    """Gauss–Jordan over expressions; ``None`` when a pivot cannot be found."""
    n = len(M)
    A = [[normalize(x) for x in row] + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if equal(A[r][c], ZERO) is Verdict.NOT_EQUAL), None)
        if piv is None:
            return None
        A[c], A[piv] = A[piv], A[c]
        inv = A[c][c] ** -1
        A[c] = [normalize(x * inv) for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != ZERO:
                f = A[r][c]
                A[r] = [normalize(a - f * b) for a, b in zip(A[r], A[c])]
    return [row[n:] for row in A]


@dataclass
class RegularityReport:
    velocities: List[str]
    hessian: List[List[Expr]]
    determinant: Optional[Expr]
    regular: bool
    method: str

    def to_json(self) -> dict:
        return {
            "velocities": self.velocities,
            "hessian": [[to_str(x) for x in row] for row in self.hessian],
            "determinant": None if self.determinant is None else to_str(self.determinant),
            "regular": self.regular,
            "method": self.method,
        }


def hessian(sys: FieldTheory) -> Tuple[List[str], List[List[Expr]]]:
    vs = _velocities(sys.k, sys.n)
    first = {v: diff(sys.generator, v) for v in vs}
    return vs, [[normalize(diff(first[a], b)) for b in vs] for a in vs]


def regularity(sys: FieldTheory, samples: int = 20) -> RegularityReport:
    """Hessian in the velocities; symbolic determinant when ``kn ≤ 6``."""
    _require_lagrangian(sys)
    vs, W = hessian(sys)
    det = None
    if len(vs) <= 6:
        det = determinant(W)
        if det == ZERO:
            return RegularityReport(vs, W, det, False, "symbolic")
        if not det.free:
            return RegularityReport(vs, W, det, True, "symbolic")
    import numpy as np

    rng = random.Random(default_seed())
    coords = sys.frame.coords
    ok = True
    for _ in range(samples):
        pt = {c: rng.uniform(-2.0, 2.0) for c in coords}
        try:
            num = np.array([[evaluate(x, pt) for x in row] for row in W])
        except EvalError:
            continue
        if abs(np.linalg.det(num)) <= 1e-10:
            ok = False
            break
    return RegularityReport(vs, W, det, ok, "sampled")


# ---------------------------------------------------------------------------
# Euler–Lagrange equations


def second_jet_symbol(i: int, A: int, B: int) -> str:
    A, B = min(A, B), max(A, B)
    return f"d2q{i}_dt{A}dt{B}"


def _total_derivative(f: Expr, A: int, k: int, n: int, has_t: bool) -> Expr:
    """``d/dtᴬ`` of a function of (t, q, v) along a holonomic section."""
    terms = []
    if has_t:
        terms.append(diff(f, f"t{A}"))
    for j in range(1, n + 1):
        terms.append(mul(Var(_vel(A, j)), diff(f, f"q{j}")))
        for B in range(1, k + 1):
            terms.append(mul(Var(second_jet_symbol(j, A, B)), diff(f, _vel(B, j))))
    return add(*terms)


def euler_lagrange_equations(sys: FieldTheory) -> EquationSet:
    """``Σ_A d/dtᴬ(∂L/∂vᴬᵢ) − ∂L/∂qⁱ = 0`` with ``vᴬᵢ = ∂φⁱ/∂tᴬ`` folded in."""
    _require_lagrangian(sys)
    L, k, n = sys.generator, sys.k, sys.n
    frame = sys.frame
    fold = {_vel(A, i): Var(jet_symbol(f"q{i}", A)) for A in range(1, k + 1) for i in range(1, n + 1)}
    res, labels = [], []
    for i in range(1, n + 1):
        r = add(*(_total_derivative(diff(L, _vel(A, i)), A, k, n, frame.has_t) for A in range(1, k + 1)))
        r = r - diff(L, f"q{i}")
        res.append(subs(r, fold))
        labels.append(f"q{i}")
    unknowns = [jet_symbol(f"q{i}", A) for i in range(1, n + 1) for A in range(1, k + 1)]
    unknowns += [second_jet_symbol(i, A, B) for i in range(1, n + 1) for A in range(1, k + 1) for B in range(A, k + 1)]
    return EquationSet("jet", frame, unknowns, res, labels, f"Euler-Lagrange equations ({sys.variant.value})")


def _base_map_substitution(sys: FieldTheory, phi: SymbolicSection) -> Dict[str, Expr]:
    k, n = sys.k, sys.n
    expected = {f"q{i}" for i in range(1, n + 1)}
    if set(phi.components) != expected:
        raise ValueError(f"base map must give exactly {sorted(expected, key=natural_key)}")
    out: Dict[str, Expr] = dict(phi.components)
    for i in range(1, n + 1):
        q = phi.components[f"q{i}"]
        for A in range(1, k + 1):
            out[jet_symbol(f"q{i}", A)] = normalize(diff(q, f"t{A}"))
            for B in range(A, k + 1):
                out[second_jet_symbol(i, A, B)] = normalize(diff(diff(q, f"t{A}"), f"t{B}"))
    return out


def verify_euler_lagrange(sys: FieldTheory, phi: SymbolicSection) -> SectionReport:
    eqs = euler_lagrange_equations(sys)
    residuals = eqs.substitute(_base_map_substitution(sys, phi))
    return _report(eqs.name, eqs.labels, residuals)


# ---------------------------------------------------------------------------
# k-vector field equations


def lagrangian_kvector_equations(sys: FieldTheory) -> EquationSet:
    """Component equations of ``Σ i(Γ_A)ω_Lᴬ = dE_L`` (and the cosymplectic analogue).

    Rows, with ``L_xy`` second partials and ``X{A}_c`` the unknowns:

    * ``v{B}_{j}``: ``Σ L_{v^j_B v^i_A} (X{A}_q{i} − v^i_A)``
    * ``t{B}``: ``Σ L_{t^B v^i_A} (X{A}_q{i} − v^i_A)``
    * ``q{i}``: ``Σ L_{q^i v^j_A}(v^j_A − X{A}_q{j}) + Σ L_{t^A v^i_A}
      + Σ X{A}_q{j} L_{q^j v^i_A} + Σ X{A}_v{B}_{j} L_{v^j_B v^i_A} − L_{q^i}``
    * ``X{A}(t{B})``: ``X{A}_t{B} − δ``
    """
    _require_lagrangian(sys)
    L, k, n, frame = sys.generator, sys.k, sys.n, sys.frame
    has_t = frame.has_t
    Lv = {(A, i): diff(L, _vel(A, i)) for A in range(1, k + 1) for i in range(1, n + 1)}
    Xq = {(A, i): Var(component_symbol(A, f"q{i}")) for A in range(1, k + 1) for i in range(1, n + 1)}
    slip = {(A, i): Xq[A, i] - Var(_vel(A, i)) for A in range(1, k + 1) for i in range(1, n + 1)}
    res, labels = [], []
    if has_t:
        res, labels = delta_rows(frame)
    for B in range(1, k + 1):
        for j in range(1, n + 1):
            res.append(add(*(mul(diff(Lv[A, i], _vel(B, j)), slip[A, i]) for A in range(1, k + 1) for i in range(1, n + 1))))
            labels.append(_vel(B, j))
    if has_t:
        for B in range(1, k + 1):
            res.append(add(*(mul(diff(Lv[A, i], f"t{B}"), slip[A, i]) for A in range(1, k + 1) for i in range(1, n + 1))))
            labels.append(f"t{B}")
    for i in range(1, n + 1):
        terms = []
        for A in range(1, k + 1):
            for j in range(1, n + 1):
                terms.append(mul(diff(Lv[A, j], f"q{i}"), Const(-1), slip[A, j]))
                terms.append(mul(Xq[A, j], diff(Lv[A, i], f"q{j}")))
                for B in range(1, k + 1):
                    terms.append(mul(Var(component_symbol(A, _vel(B, j))), diff(Lv[A, i], _vel(B, j))))
            if has_t:
                terms.append(diff(Lv[A, i], f"t{A}"))
        terms.append(mul(Const(-1), diff(L, f"q{i}")))
        res.append(add(*terms))
        labels.append(f"q{i}")
    unknowns = [component_symbol(A, c) for A in range(1, k + 1) for c in frame.coords]
    return EquationSet("component", frame, unknowns, res, labels, f"Lagrangian k-vector field equations ({sys.variant.value})")


def sopde_check(sys: FieldTheory, G: KVectorField) -> bool:
    """``(Γ_A)ⁱ = vᴬᵢ`` (and ``(Γ̄_A)ᴮ = δᴮ_A`` with base coordinates)."""
    _require_lagrangian(sys)
    if G.frame != sys.frame or len(G) != sys.k:
        return False
    for A, GA in enumerate(G, 1):
        for i in range(1, sys.n + 1):
            if equal(GA[f"q{i}"], Var(_vel(A, i))) is Verdict.NOT_EQUAL:
                return False
        if sys.frame.has_t:
            for B in range(1, sys.k + 1):
                if GA[f"t{B}"] != Const(1 if A == B else 0):
                    return False
    return True


@dataclass
class SopdeAnalysis:
    forced: bool
    unforced: List[str]
    consistent: bool

    def to_json(self) -> dict:
        return {"sopde_forced": self.forced, "not_forced": self.unforced, "consistent": self.consistent}


def sopde_forced(sys: FieldTheory, eqs: Optional[EquationSet] = None, points: int = 3) -> SopdeAnalysis:
    """Whether the component equations imply ``X{A}_q{i} = vᴬᵢ``.

    The row ``X{A}_q{i} − vᴬᵢ`` is implied iff appending it leaves the rank of
    the augmented system unchanged; this is tested exactly at rational
    sample points.
    """
    _require_lagrangian(sys)
    eqs = eqs or lagrangian_kvector_equations(sys)
    rows = affine_rows(eqs.residuals, eqs.unknowns)
    targets = [(component_symbol(A, f"q{i}"), Var(component_symbol(A, f"q{i}")) - Var(_vel(A, i))) for A in range(1, sys.k + 1) for i in range(1, sys.n + 1)]
    target_rows = affine_rows([t for _, t in targets], eqs.unknowns)
    unforced = set()
    consistent = True
    for pt in sample_points(sys.frame.coords, points, default_seed()):
        try:
            base, exact = numeric_rows(rows, eqs.unknowns, pt)
            extra, _ = numeric_rows(target_rows, eqs.unknowns, pt)
        except EvalError:
            continue
        r0 = rank(base, exact)
        coeff_only = [row[:-1] for row in base]
        if rank(coeff_only, exact) != r0:
            consistent = False
        for (name, _), row in zip(targets, extra):
            if rank(base + [row], exact) != r0:
                unforced.add(name)
    lst = sorted(unforced, key=natural_key)
    return SopdeAnalysis(not lst, lst, consistent)


def solve_lagrangian_kvector(sys: FieldTheory) -> KVectorField:
    """SOPDE solution for regular L with the diagonal-split gauge.

    ``(Γ_A)ⁱ = vᴬᵢ`` and, with ``W`` the velocity Hessian and
    ``Rᵢ = L_{qⁱ} − Σ L_{tᴬ vᴬᵢ} − Σ vʲ_A L_{qʲ vᴬᵢ}``, the velocity block of
    ``Γ_A`` is ``W⁻¹ z_A`` where ``z_A`` carries ``Rᵢ/k`` in the ``(A, i)``
    slots and zero elsewhere.
    """
    _require_lagrangian(sys)
    L, k, n, frame = sys.generator, sys.k, sys.n, sys.frame
    vs, W = hessian(sys)
    Winv = inverse_matrix(W)
    if Winv is None:
        raise ValueError("Lagrangian is singular; no SOPDE solution is constructed")
    Lv = {(A, i): diff(L, _vel(A, i)) for A in range(1, k + 1) for i in range(1, n + 1)}
    R = {}
    for i in range(1, n + 1):
        terms = [diff(L, f"q{i}")]
        for A in range(1, k + 1):
            if frame.has_t:
                terms.append(mul(Const(-1), diff(Lv[A, i], f"t{A}")))
            for j in range(1, n + 1):
                terms.append(mul(Const(-1), Var(_vel(A, j)), diff(Lv[A, i], f"q{j}")))
        R[i] = normalize(add(*terms))
    index = {v: m for m, v in enumerate(vs)}
    fields = []
    for A in range(1, k + 1):
        z = [ZERO] * len(vs)
        for i in range(1, n + 1):
            z[index[_vel(A, i)]] = normalize(R[i] * Const(Fraction(1, k)))
        comps: Dict[str, Expr] = {}
        for r, v in enumerate(vs):
            comps[v] = normalize(add(*(mul(Winv[r][c], z[c]) for c in range(len(vs)) if z[c] != ZERO)))
        for i in range(1, n + 1):
            comps[f"q{i}"] = Var(_vel(A, i))
        if frame.has_t:
            comps[f"t{A}"] = ONE
        fields.append(VectorField(frame, comps))
    return KVectorField(fields)


# ---------------------------------------------------------------------------
# Sections


def prolong(phi: SymbolicSection) -> SymbolicSection:
    """Holonomic lift: adds ``vᴬᵢ = ∂φⁱ/∂tᴬ``."""
    comps = dict(phi.components)
    qs = sorted((c for c in comps if c.startswith("q")), key=natural_key)
    for c in qs:
        i = int(c[1:])
        for A in range(1, phi.k + 1):
            comps[_vel(A, i)] = normalize(diff(phi.components[c], f"t{A}"))
    return SymbolicSection(phi.k, comps)


def lagrangian_section_equations(sys: FieldTheory) -> EquationSet:
    """Integral-section form of the Lagrangian k-vector field equations.

    A section is an integral section of Γ when ``X{A}_c = ∂c/∂tᴬ``; the
    component equations then become first-order jet equations in the
    section ``(q, v)``.
    """
    eqs = lagrangian_kvector_equations(sys)
    frame = sys.frame
    mapping = {}
    for A in range(1, sys.k + 1):
        for c in frame.coords:
            if frame.has_t and c.startswith("t"):
                mapping[component_symbol(A, c)] = Const(1 if c == f"t{A}" else 0)
            else:
                mapping[component_symbol(A, c)] = Var(jet_symbol(c, A))
    res = eqs.substitute(mapping)
    keep = [(lb, r) for lb, r in zip(eqs.labels, res) if r != ZERO]
    unknowns = [jet_symbol(c, B) for c in frame.coords if not c.startswith("t") for B in range(1, sys.k + 1)]
    return EquationSet(
        "jet",
        frame,
        unknowns,
        [r for _, r in keep],
        [lb for lb, _ in keep],
        f"Lagrangian integral-section equations ({sys.variant.value})",
    )


def legendre_inverse(sys: FieldTheory) -> Optional[SmoothMap]:
    """``FL⁻¹`` when the momenta are affine in the velocities with constant Hessian."""
    _require_lagrangian(sys)
    FL = legendre(sys)
    vs, W = hessian(sys)
    if any(x.free for row in W for x in row):
        return None
    Winv = inverse_matrix(W)
    if Winv is None:
        return None
    zero_v = {v: ZERO for v in vs}
    # p = W v + p0(q, t)  =>  v = W⁻¹ (p − p0)
    ps = [f"p{v[1:]}" for v in vs]
    p0 = [normalize(subs(FL[p], zero_v)) for p in ps]
    exprs = {}
    for r, v in enumerate(vs):
        exprs[v] = add(*(mul(Winv[r][c], Var(ps[c]) - p0[c]) for c in range(len(vs))))
    for c in FL.source.coords:
        if c not in exprs:
            exprs[c] = Var(c)
    return SmoothMap(FL.target, FL.source, exprs, "FL^-1")
