"""Conversions between the k-symplectic, k-cosymplectic and multisymplectic pictures.

Extraction formulas contract with ``∂/∂t1`` first: ``i(∂/∂tk)…i(∂/∂t1)α``
is ``contract_k([∂t1, …, ∂tk], α)``.  Zero-section embeddings are explicit
:class:`~geofield.forms.SmoothMap` objects and every extracted form is a
genuine pullback.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .canonical import (
    KCosymplecticStructure,
    KSymplecticStructure,
    MultisymplecticStructure,
    canonical_kcosymplectic,
    canonical_ksymplectic,
    canonical_multisymplectic,
)
from .forms import (
    CoordinateFrame,
    DifferentialForm,
    FrameError,
    KVectorField,
    SmoothMap,
    VectorField,
    base_codim1,
    base_volume,
    contract_k,
    coordinate_field,
    d,
    evaluate,
    interior,
    kcosym_frame,
    ksym_frame,
    jet_frame,
    multimomentum_frame,
    pullback,
    split_frame,
    tangent_frame,
    wedge,
)
from .hamiltonian import (
    EquationSet,
    FieldTheory,
    Variant,
    component_symbol,
    geometric_residual,
    hdw_equations,
    kvector_equations,
    solve_kvector,
)
from .lagrangian import (
    energy,
    euler_lagrange_equations,
    lagrangian_forms,
    lagrangian_kvector_equations,
    lagrangian_section_equations,
    legendre,
)
from .linear import affine_rows, numeric_rows, rank, sample_points, solve
from .multisym import (
    CartanForms,
    extended_restricted_legendre,
    hamilton_cartan_forms,
    hamilton_cartan_via_section,
    ms_hamiltonian_kvector_equations,
    ms_lagrangian_kvector_equations,
    ms_lagrangian_section_equations,
    ms_section_equations,
    energy_from_poincare_cartan,
    poincare_cartan_forms,
)
from .symexpr import (
    ONE,
    ZERO,
    Const,
    EvalError,
    Expr,
    NotRational,
    Var,
    default_seed,
    diff,
    evaluate as eval_expr,
    evaluate_exact,
    natural_key,
    normalize,
    to_str,
)

__all__ = [
    "NotAutonomous",
    "NotProjectable",
    "autonomize",
    "deautonomize",
    "suspend",
    "deproject",
    "SplitMaps",
    "split_multimomentum",
    "extract_ksymplectic",
    "extract_ksymplectic_slots",
    "rebuild_ms_from_ksymplectic",
    "KCosymExtraction",
    "extract_kcosymplectic",
    "eta_from_omega",
    "eta_from_theta",
    "rebuild_ms_from_kcosymplectic",
    "kcosym_from_hamilton_cartan",
    "hamilton_cartan_from_kcosym",
    "kcosym_from_poincare_cartan",
    "poincare_cartan_from_kcosym",
    "Certificate",
    "certify_equation_equivalence",
    "theorem_suite",
]


class NotAutonomous(ValueError):
    """The generating function depends explicitly on the base coordinates."""

    def __init__(self, offending: Dict[str, Expr]):
        self.offending = offending
        detail = ", ".join(f"d/d{t} = {to_str(e)}" for t, e in offending.items())
        super().__init__(f"not autonomous: {detail}")


class NotProjectable(ValueError):
    pass


_AUTONOMOUS = {Variant.KSymHam: Variant.KCosymHam, Variant.KSymLag: Variant.KCosymLag}


def autonomize(sys: FieldTheory) -> FieldTheory:
    """``𝓗 = π̄₂*H`` (or ``𝓛 = π̄₂*L``): same expression on the t-extended frame."""
    if sys.variant not in _AUTONOMOUS:
        raise ValueError(f"{sys.variant.value} is already time-dependent")
    return sys.with_variant(_AUTONOMOUS[sys.variant])


def deautonomize(sys: FieldTheory) -> FieldTheory:
    """Inverse of :func:`autonomize`; requires ``∂𝓗/∂tᴬ = 0`` for every ``A``."""
    back = {v: k for k, v in _AUTONOMOUS.items()}
    if sys.variant not in back:
        raise ValueError(f"{sys.variant.value} has no autonomous counterpart")
    offending = {}
    for A in range(1, sys.k + 1):
        dt = normalize(diff(sys.generator, f"t{A}"))
        if dt != ZERO:
            offending[f"t{A}"] = dt
    if offending:
        raise NotAutonomous(offending)
    return sys.with_variant(back[sys.variant])


def _extended(frame: CoordinateFrame) -> CoordinateFrame:
    if frame.has_t:
        raise FrameError(f"{frame.bundle} already carries base coordinates")
    return kcosym_frame(frame.k, frame.n) if frame.fiber == "p" else jet_frame(frame.k, frame.n)


def suspend(X: KVectorField) -> KVectorField:
    """``X̄_A = ∂/∂tᴬ + X_A`` on the t-extended frame."""
    frame = X.frame
    ext = _extended(frame)
    out = []
    for A, XA in enumerate(X, 1):
        comps = XA.as_dict()
        comps[f"t{A}"] = ONE
        out.append(VectorField(ext, comps))
    return KVectorField(out)


def deproject(Xbar: KVectorField) -> KVectorField:
    """Projection of a suspended k-vector field back to the autonomous frame.

    Offered only when every coefficient is independent of ``t`` and the base
    components are ``δᴮ_A``; that is sufficient for projectability, not
    necessary.
    """
    frame = Xbar.frame
    if not frame.has_t or frame.affine:
        raise FrameError(f"{frame.bundle} is not a t-extended phase space")
    ts = [f"t{A}" for A in range(1, frame.k + 1)]
    base = ksym_frame(frame.k, frame.n) if frame.fiber == "p" else tangent_frame(frame.k, frame.n)
    out = []
    for A, XA in enumerate(Xbar, 1):
        comps = XA.as_dict()
        for B, t in enumerate(ts, 1):
            if comps[t] != Const(1 if A == B else 0):
                raise NotProjectable(f"X{A} has {t}-component {to_str(comps[t])}, expected {1 if A == B else 0}")
        for c, e in comps.items():
            dep = sorted(set(ts) & e.free, key=natural_key)
            if dep:
                raise NotProjectable(f"X{A}[{c}] depends on {dep[0]}")
        out.append(VectorField(base, {c: comps[c] for c in base.coords}))
    return KVectorField(out)


# ---------------------------------------------------------------------------
# The splitting diffeomorphism


@dataclass
class SplitMaps:
    forward: SmoothMap  # 𝓜π → ℝᵏ×ℝ×(T¹ₖ)*Q
    inverse: SmoothMap
    mu: SmoothMap  # 𝓜π → J¹π*


def split_multimomentum(k: int, n: int) -> SplitMaps:
    """``Ψ̄`` is the identity in these charts; ``μ`` forgets the affine coordinate."""
    M, S = multimomentum_frame(k, n), split_frame(k, n)
    fwd = SmoothMap(M, S, [Var(c) for c in S.coords], "Psi")
    inv = SmoothMap(S, M, [Var(c) for c in M.coords], "Psi^-1")
    J = kcosym_frame(k, n)
    mu = SmoothMap(M, J, [Var(c) for c in J.coords], "mu")
    return SplitMaps(fwd, inv, mu)


def _embed(src: CoordinateFrame, tgt: CoordinateFrame, fixed: Dict[str, object], name: str) -> SmoothMap:
    exprs = {}
    for c in tgt.coords:
        exprs[c] = Const(fixed[c]) if c in fixed else Var(c)
    return SmoothMap(src, tgt, exprs, name)


def _projection(src: CoordinateFrame, tgt: CoordinateFrame, name: str) -> SmoothMap:
    return SmoothMap(src, tgt, [Var(c) for c in tgt.coords], name)


def _t_fields(frame: CoordinateFrame) -> List[VectorField]:
    return [coordinate_field(frame, f"t{A}") for A in range(1, frame.k + 1)]


def _theta_by_contraction(Theta: DifferentialForm, A: int) -> DifferentialForm:
    """``−i(∂/∂tᵏ)…i(∂/∂t¹)(Θ∧dtᴬ)`` before pullback."""
    frame = Theta.frame
    return -contract_k(_t_fields(frame), wedge(Theta, frame.dx(f"t{A}")))


def _omega_by_contraction(Omega: DifferentialForm, A: int) -> DifferentialForm:
    """``(−1)^{k+1} i(∂/∂tᵏ)…i(∂/∂t¹)(Ω∧dtᴬ)`` before pullback."""
    frame = Omega.frame
    out = contract_k(_t_fields(frame), wedge(Omega, frame.dx(f"t{A}")))
    return out if (frame.k + 1) % 2 == 0 else -out


def _theta_by_slots(Theta: DifferentialForm, A: int) -> DifferentialForm:
    """``X ↦ Θ(∂/∂t¹, …, X, …, ∂/∂tᵏ)`` with ``X`` in slot ``A``."""
    ts = _t_fields(Theta.frame)
    slots: List[Optional[VectorField]] = list(ts)
    slots[A - 1] = None
    return evaluate(Theta, slots)


def _omega_by_slots(Omega: DifferentialForm, A: int) -> DifferentialForm:
    """``(X, Y) ↦ Ω(X, ∂/∂t¹, …, Y, …, ∂/∂tᵏ)`` with ``Y`` in slot ``A + 1``."""
    ts = _t_fields(Omega.frame)
    slots: List[Optional[VectorField]] = [None] + list(ts)
    slots[A] = None
    return evaluate(Omega, slots)


def extract_ksymplectic(Theta: DifferentialForm, Omega: DifferentialForm) -> Tuple[List[DifferentialForm], List[DifferentialForm]]:
    """``θᴬ`` and ``ωᴬ`` on ``(T¹ₖ)*Q`` via the zero-section embedding ``ȷ`` (t = 0, p = 0)."""
    M = Theta.frame
    jmap = _embed(ksym_frame(M.k, M.n), M, {**{f"t{A}": 0 for A in range(1, M.k + 1)}, "p": 0}, "j")
    thetas = [pullback(jmap, _theta_by_contraction(Theta, A)) for A in range(1, M.k + 1)]
    omegas = [pullback(jmap, _omega_by_contraction(Omega, A)) for A in range(1, M.k + 1)]
    return thetas, omegas


def extract_ksymplectic_slots(Theta: DifferentialForm, Omega: DifferentialForm) -> Tuple[List[DifferentialForm], List[DifferentialForm]]:
    """Same forms from the slot-insertion description."""
    M = Theta.frame
    jmap = _embed(ksym_frame(M.k, M.n), M, {**{f"t{A}": 0 for A in range(1, M.k + 1)}, "p": 0}, "j")
    thetas = [pullback(jmap, _theta_by_slots(Theta, A)) for A in range(1, M.k + 1)]
    omegas = [pullback(jmap, _omega_by_slots(Omega, A)) for A in range(1, M.k + 1)]
    return thetas, omegas


def _rebuild(frame: CoordinateFrame, pieces: Sequence[DifferentialForm], vol: DifferentialForm, lead: DifferentialForm) -> CartanForms:
    """``lead + Σ piecesᴬ∧i(∂/∂tᴬ)vol`` and its ``−d``."""
    Theta = lead
    for A, piece in enumerate(pieces, 1):
        Theta = Theta + wedge(piece, interior(coordinate_field(frame, f"t{A}"), vol))
    return CartanForms(Theta, -d(Theta))


def rebuild_ms_from_ksymplectic(thetas: Sequence[DifferentialForm]) -> Tuple[CartanForms, DifferentialForm]:
    """``Θ = p dᵏt + σ₂*θᴬ∧d^{k−1}t_A``, ``Ω = −dΘ``.

    Also returns ``−dp∧dᵏt + σ₂*ωᴬ∧d^{k−1}t_A`` computed term by term, which
    must coincide with ``Ω``.
    """
    base = thetas[0].frame
    M = multimomentum_frame(base.k, base.n)
    sigma2 = _projection(M, base, "sigma2")
    vol = base_volume(M)
    pulled = [pullback(sigma2, th) for th in thetas]
    forms = _rebuild(M, pulled, vol, Var("p") * vol)
    alt = -wedge(M.dx("p"), vol)
    for A, th in enumerate(thetas, 1):
        alt = alt + wedge(pullback(sigma2, -d(th)), base_codim1(M, A))
    return forms, alt


@dataclass
class KCosymExtraction:
    eta: List[DifferentialForm]
    eta_alt: List[DifferentialForm]
    theta: List[DifferentialForm]
    omega: List[DifferentialForm]


def eta_from_omega(Omega: DifferentialForm, A: int, printed_sign: bool = False) -> DifferentialForm:
    """``ηᴬ`` from ``Ω(∂/∂p, ∂/∂t¹, …, X̄, …, ∂/∂tᵏ)`` with ``X̄`` in slot ``A + 1``, pulled back by p = 0.

    With ``Ω ∋ −dp∧dᵏt`` that evaluation is ``−dtᴬ`` for every ``A``, so
    the overall factor is ``−1``.  ``printed_sign=True`` applies the factor
    ``(−1)^{k−A}`` instead, which agrees only when ``k − A`` is odd.
    """
    M = Omega.frame
    slots: List[Optional[VectorField]] = [coordinate_field(M, "p")] + _t_fields(M)
    slots[A] = None
    raw = evaluate(Omega, slots)
    sign = (-1) ** (M.k - A) if printed_sign else -1
    imap = _embed(kcosym_frame(M.k, M.n), M, {"p": 0}, "i")
    out = pullback(imap, raw)
    return out if sign > 0 else -out


def eta_from_theta(Theta: DifferentialForm, A: int) -> DifferentialForm:
    """``ηᴬ = ȷ₀*[Θ(∂/∂t¹, …, X̄, …, ∂/∂tᵏ)]`` with ``ȷ₀``: p = 1, momenta = 0."""
    M = Theta.frame
    fixed: Dict[str, object] = {"p": 1}
    for B in range(1, M.k + 1):
        for i in range(1, M.n + 1):
            fixed[f"p{B}_{i}"] = 0
    j0 = _embed(kcosym_frame(M.k, M.n), M, fixed, "j0")
    return pullback(j0, _theta_by_slots(Theta, A))


def extract_kcosymplectic(Theta: DifferentialForm, Omega: DifferentialForm) -> KCosymExtraction:
    """``ηᴬ`` (both ways), ``Θᴬ`` and ``Ωᴬ`` on ``ℝᵏ×(T¹ₖ)*Q`` via ``𝔦`` (p = 0)."""
    M = Theta.frame
    imap = _embed(kcosym_frame(M.k, M.n), M, {"p": 0}, "i")
    ks = range(1, M.k + 1)
    return KCosymExtraction(
        eta=[eta_from_omega(Omega, A) for A in ks],
        eta_alt=[eta_from_theta(Theta, A) for A in ks],
        theta=[pullback(imap, _theta_by_contraction(Theta, A)) for A in ks],
        omega=[pullback(imap, _omega_by_contraction(Omega, A)) for A in ks],
    )


def rebuild_ms_from_kcosymplectic(etas: Sequence[DifferentialForm], thetas: Sequence[DifferentialForm]) -> Tuple[CartanForms, DifferentialForm]:
    """``Θ = p η¹∧…∧ηᵏ + σ̄₂*Θᴬ∧i(∂/∂tᴬ)(η¹∧…∧ηᵏ)``; second value is the term-by-term ``Ω``."""
    base = thetas[0].frame
    M = multimomentum_frame(base.k, base.n)
    sigma2 = _projection(M, base, "sigma2")
    vol = pullback(sigma2, etas[0])
    for e in etas[1:]:
        vol = wedge(vol, pullback(sigma2, e))
    pulled = [pullback(sigma2, th) for th in thetas]
    forms = _rebuild(M, pulled, vol, Var("p") * vol)
    alt = -wedge(M.dx("p"), vol)
    for A, th in enumerate(thetas, 1):
        alt = alt + wedge(pullback(sigma2, -d(th)), interior(coordinate_field(M, f"t{A}"), vol))
    return forms, alt


def _as_kcosym(sys: FieldTheory) -> FieldTheory:
    if sys.variant in (Variant.KSymHam, Variant.KSymLag):
        return autonomize(sys)
    return sys


def kcosym_from_hamilton_cartan(sys: FieldTheory) -> Tuple[List[DifferentialForm], List[DifferentialForm]]:
    """``Θᴬ`` and ``Ωᴬ`` from ``Θ_h``, ``Ω_h`` by contraction."""
    forms = hamilton_cartan_forms(_as_kcosym(sys))
    ks = range(1, sys.k + 1)
    return [_theta_by_contraction(forms.Theta, A) for A in ks], [_omega_by_contraction(forms.Omega, A) for A in ks]


def hamilton_cartan_from_kcosym(sys: FieldTheory) -> Tuple[CartanForms, DifferentialForm]:
    """``Θ_h = −𝓗 dᵏt + Θᴬ∧d^{k−1}t_A``; second value is ``d𝓗∧dᵏt + Ωᴬ∧d^{k−1}t_A``."""
    sys = _as_kcosym(sys)
    st = canonical_kcosymplectic(sys.k, sys.n)
    frame = st.frame
    vol = base_volume(frame)
    forms = _rebuild(frame, st.theta, vol, -(sys.generator * vol))
    alt = wedge(d(DifferentialForm.scalar(frame, sys.generator)), vol)
    for A, w in enumerate(st.omega, 1):
        alt = alt + wedge(w, base_codim1(frame, A))
    return forms, alt


def kcosym_from_poincare_cartan(sys: FieldTheory) -> Tuple[List[DifferentialForm], List[DifferentialForm]]:
    """``Θᴬ_𝓛`` and ``Ωᴬ_𝓛`` from ``Θ_𝕃``, ``Ω_𝕃`` by contraction.

    The contraction with every ``∂/∂tᴮ`` removes all ``dtᴮ`` components, so
    the second list agrees with ``−dΘᴬ_𝓛`` only when ``∂²𝓛/∂tᴮ∂vᴬᵢ = 0``.
    """
    forms = poincare_cartan_forms(_as_kcosym(sys))
    ks = range(1, sys.k + 1)
    return [_theta_by_contraction(forms.Theta, A) for A in ks], [_omega_by_contraction(forms.Omega, A) for A in ks]


def poincare_cartan_from_kcosym(sys: FieldTheory) -> Tuple[CartanForms, DifferentialForm]:
    """``Θ_𝕃 = −𝓔 dᵏt + Θᴬ_𝓛∧d^{k−1}t_A``; second value is ``d𝓔∧dᵏt + Ωᴬ_𝓛∧d^{k−1}t_A``."""
    sys = _as_kcosym(sys)
    lf = lagrangian_forms(sys)
    frame = sys.frame
    vol = base_volume(frame)
    E = energy(sys)
    forms = _rebuild(frame, lf.theta, vol, -(E * vol))
    alt = wedge(d(DifferentialForm.scalar(frame, E)), vol)
    for A, w in enumerate(lf.omega, 1):
        alt = alt + wedge(w, base_codim1(frame, A))
    return forms, alt


# ---------------------------------------------------------------------------
# Certification of equation-set equivalence


@dataclass
class Certificate:
    """Outcome of :func:`certify_equation_equivalence`."""

    result: str
    left: str
    right: str
    witness: Optional[dict] = None
    ranks: Optional[dict] = None

    @property
    def equivalent(self) -> bool:
        return self.result == "Equivalent"

    def to_json(self) -> dict:
        out = {"left": self.left, "right": self.right, "result": self.result}
        if self.ranks is not None:
            out["ranks"] = self.ranks
        out["witness"] = self.witness
        return out


def _value(e: Expr, point, exact: bool):
    if exact:
        return evaluate_exact(e, point)
    return eval_expr(e, {k: float(v) for k, v in point.items()})


def _residual_value(e: Expr, point) -> Tuple[object, bool]:
    try:
        return evaluate_exact(e, point), True
    except NotRational:
        return eval_expr(e, {k: float(v) for k, v in point.items()}), False


def _vanishes(val, exact: bool, scale: float = 1.0) -> bool:
    if exact:
        return val == 0
    return abs(val) <= 1e-8 * max(1.0, scale)


def certify_equation_equivalence(
    E1: EquationSet,
    E2: EquationSet,
    points: int = 3,
    seed: Optional[int] = None,
) -> Certificate:
    """Certify that two residual systems have the same solution set.

    Rows affine in the unknowns are compared by rank: at each sample point
    the augmented matrices of ``E1``, ``E2`` and their stack must share one
    rank, so each system generates the other.  Rows that are not affine
    must then vanish on the common affine solution set, which is sampled
    as particular solution plus a random null-space combination.  Sample
    points are rational and arithmetic is exact unless a transcendental
    coefficient forces floating point.  A residual that raises the rank, or
    a non-affine residual that does not vanish, is returned as witness.
    """
    seed = default_seed() if seed is None else seed
    unknowns = list(E1.unknowns) + [u for u in E2.unknowns if u not in E1.unknowns]
    unk = set(unknowns)
    coords = set()
    for r in list(E1.residuals) + list(E2.residuals):
        coords |= r.free - unk
    coords = sorted(coords, key=natural_key)
    sides = []
    for tag, E in (("left", E1), ("right", E2)):
        rows = affine_rows(E.residuals, unknowns)
        aff = [(lb, r, row) for lb, r, row in zip(E.labels, E.residuals, rows) if row.affine]
        non = [(lb, r) for lb, r, row in zip(E.labels, E.residuals, rows) if not row.affine]
        sides.append((tag, aff, non))
    rng = random.Random(seed)
    used = 0
    attempts = 0
    ranks = None
    while used < points and attempts < 10 * points + 10:
        attempts += 1
        pt = sample_points(coords, 1, rng.randrange(2**31))[0] if coords else {}
        try:
            mats = []
            exact_all = True
            for tag, aff, non in sides:
                m, exact = numeric_rows([row for _, _, row in aff], unknowns, pt)
                exact_all &= exact
                mats.append(m)
        except (EvalError, ZeroDivisionError):
            continue
        used += 1
        if not exact_all:
            mats = [[[float(x) for x in row] for row in m] for m in mats]
        r1, r2 = rank(mats[0], exact_all), rank(mats[1], exact_all)
        r12 = rank(mats[0] + mats[1], exact_all)
        ranks = {"left": r1, "right": r2, "joint": r12}
        for (tag, aff, _), own, other, r_other in ((sides[0], mats[0], mats[1], r2), (sides[1], mats[1], mats[0], r1)):
            if r12 > r_other:
                for (lb, res, _), row in zip(aff, own):
                    if rank(other + [row], exact_all) > r_other:
                        return Certificate("NotEquivalent", E1.name, E2.name, {"system": tag, "label": lb, "residual": to_str(res)}, ranks)
        sol = solve(mats[0] + mats[1], exact_all)
        if sol is None:
            # both systems are inconsistent here and generate each other
            continue
        part, basis = sol
        for _ in range(2):
            lam = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in basis]
            vals = list(part)
            for l, b in zip(lam, basis):
                vals = [v + (l * x if exact_all else float(l) * x) for v, x in zip(vals, b)]
            full = dict(pt)
            full.update({u: (v if exact_all else Fraction(v).limit_denominator(10**12)) for u, v in zip(unknowns, vals)})
            for tag, _, non in sides:
                for lb, res in non:
                    try:
                        val, exact = _residual_value(res, full if exact_all else {k: float(v) for k, v in full.items()})
                    except (EvalError, ZeroDivisionError):
                        continue
                    scale = max((abs(float(v)) for v in full.values()), default=1.0)
                    if not _vanishes(val, exact and exact_all, scale**3):
                        return Certificate("NotEquivalent", E1.name, E2.name, {"system": tag, "label": lb, "residual": to_str(res)}, ranks)
    if used == 0:
        raise EvalError("no regular sample point found")
    return Certificate("Equivalent", E1.name, E2.name, None, ranks)


def restrict_delta(eqs: EquationSet) -> EquationSet:
    """Substitute ``X{A}_t{B} = δ`` and drop the rows that become ``0``."""
    frame = eqs.frame
    mapping = {component_symbol(A, f"t{B}"): Const(1 if A == B else 0) for A in range(1, frame.k + 1) for B in range(1, frame.k + 1)}
    res = eqs.substitute(mapping)
    keep = [(lb, r) for lb, r in zip(eqs.labels, res) if r != ZERO]
    unknowns = [u for u in eqs.unknowns if u not in mapping]
    return EquationSet(eqs.kind, frame, unknowns, [r for _, r in keep], [lb for lb, _ in keep], eqs.name + " with base components fixed")


# ---------------------------------------------------------------------------
# Theorem suite


def _check(name: str, ok: bool, detail: str = "") -> dict:
    out = {"check": name, "result": "Pass" if ok else "Fail"}
    if detail:
        out["detail"] = detail
    return out


def _cert(theorem: str, E1: EquationSet, E2: EquationSet, expect: str = "Equivalent") -> dict:
    c = certify_equation_equivalence(E1, E2)
    out = {"theorem": theorem, "expected": expect}
    out.update(c.to_json())
    out["status"] = "Pass" if c.result == expect else "Fail"
    return out


def _perturbed(sys: FieldTheory) -> FieldTheory:
    return FieldTheory(sys.variant, sys.k, sys.n, sys.generator + Var("q1"))


def _hamiltonian_suite(sys: FieldTheory) -> Tuple[List[dict], List[dict]]:
    certs, checks = [], []
    Hc = sys if sys.variant is not Variant.KSymHam else autonomize(sys)
    Hc = Hc.with_variant(Variant.KCosymHam)
    certs.append(_cert("k-cosymplectic vs multisymplectic k-vector field equations", kvector_equations(Hc), ms_hamiltonian_kvector_equations(Hc)))
    certs.append(_cert("k-cosymplectic vs multisymplectic section equations", hdw_equations(Hc), ms_section_equations(Hc)))
    autonomous = True
    try:
        Hs = deautonomize(Hc)
    except NotAutonomous:
        autonomous = False
    if autonomous:
        certs.append(_cert("autonomous HDW equations vs their t-extended form", hdw_equations(Hs), hdw_equations(Hc)))
        certs.append(_cert("autonomous k-vector field equations vs suspended form", kvector_equations(Hs), restrict_delta(kvector_equations(Hc))))
        X = solve_kvector(Hs)
        checks.append(_check("suspension preserves solutions", geometric_residual(Hc, suspend(X)).is_zero()))
    certs.append(_cert("perturbed generating function is detected", hdw_equations(Hc), hdw_equations(_perturbed(Hc)), "NotEquivalent"))
    direct, via = hamilton_cartan_forms(Hc), hamilton_cartan_via_section(Hc)
    checks.append(_check("Hamilton-Cartan forms equal their Hamiltonian-section pullback", direct.Theta == via.Theta and direct.Omega == via.Omega))
    checks.append(_check("Hamilton-Cartan (k+1)-form is closed", d(direct.Omega).is_zero()))
    th, om = kcosym_from_hamilton_cartan(Hc)
    st = canonical_kcosymplectic(Hc.k, Hc.n)
    checks.append(_check("k-cosymplectic forms recovered from Hamilton-Cartan forms", th == st.theta and om == st.omega))
    rebuilt, alt = hamilton_cartan_from_kcosym(Hc)
    checks.append(_check("Hamilton-Cartan forms rebuilt from k-cosymplectic forms", rebuilt.Theta == direct.Theta and rebuilt.Omega == direct.Omega and alt == direct.Omega))
    return certs, checks


def _lagrangian_suite(sys: FieldTheory) -> Tuple[List[dict], List[dict]]:
    certs, checks = [], []
    Lc = sys if sys.variant is not Variant.KSymLag else autonomize(sys)
    Lc = Lc.with_variant(Variant.KCosymLag)
    certs.append(_cert("k-cosymplectic vs multisymplectic Lagrangian k-vector field equations", lagrangian_kvector_equations(Lc), ms_lagrangian_kvector_equations(Lc)))
    certs.append(_cert("k-cosymplectic vs multisymplectic Lagrangian section equations", lagrangian_section_equations(Lc), ms_lagrangian_section_equations(Lc)))
    autonomous = True
    try:
        Ls = deautonomize(Lc)
    except NotAutonomous:
        autonomous = False
    if autonomous:
        certs.append(_cert("autonomous Euler-Lagrange equations vs their t-extended form", euler_lagrange_equations(Ls), euler_lagrange_equations(Lc)))
        certs.append(_cert("autonomous Lagrangian k-vector field equations vs suspended form", lagrangian_kvector_equations(Ls), restrict_delta(lagrangian_kvector_equations(Lc))))
        FL = legendre(Ls)
        ks = canonical_ksymplectic(Ls.k, Ls.n)
        lf = lagrangian_forms(Ls)
        checks.append(_check("Legendre map pulls back theta^A to theta_L^A", all(pullback(FL, a) == b for a, b in zip(ks.theta, lf.theta))))
    certs.append(_cert("perturbed generating function is detected", euler_lagrange_equations(Lc), euler_lagrange_equations(_perturbed(Lc)), "NotEquivalent"))
    FLc = legendre(Lc)
    kc = canonical_kcosymplectic(Lc.k, Lc.n)
    lfc = lagrangian_forms(Lc)
    checks.append(_check("Legendre map pulls back Theta^A to Theta_L^A", all(pullback(FLc, a) == b for a, b in zip(kc.theta, lfc.theta))))
    pc = poincare_cartan_forms(Lc)
    ms = canonical_multisymplectic(Lc.k, Lc.n)
    pair = extended_restricted_legendre(Lc)
    checks.append(_check("extended Legendre map pulls back Theta and Omega", pullback(pair.extended, ms.Theta) == pc.Theta and pullback(pair.extended, ms.Omega) == pc.Omega))
    checks.append(_check("energy read off the Poincare-Cartan form", energy_from_poincare_cartan(Lc) == energy(Lc)))
    th, om = kcosym_from_poincare_cartan(Lc)
    t_dependent = any(normalize(diff(diff(Lc.generator, f"v{A}_{i}"), f"t{B}")) != ZERO for A in range(1, Lc.k + 1) for i in range(1, Lc.n + 1) for B in range(1, Lc.k + 1))
    checks.append(_check("Lagrangian 1-forms recovered from the Poincare-Cartan k-form", th == lfc.theta))
    if not t_dependent:
        checks.append(_check("Lagrangian 2-forms recovered from the Poincare-Cartan (k+1)-form", om == lfc.omega))
    rebuilt, alt = poincare_cartan_from_kcosym(Lc)
    checks.append(_check("Poincare-Cartan forms rebuilt from Lagrangian forms", rebuilt.Theta == pc.Theta and rebuilt.Omega == pc.Omega and alt == pc.Omega))
    return certs, checks


def _canonical_checks(k: int, n: int) -> List[dict]:
    ms = canonical_multisymplectic(k, n)
    ks = canonical_ksymplectic(k, n)
    kc = canonical_kcosymplectic(k, n)
    th, om = extract_ksymplectic(ms.Theta, ms.Omega)
    th2, om2 = extract_ksymplectic_slots(ms.Theta, ms.Omega)
    rebuilt, alt = rebuild_ms_from_ksymplectic(ks.theta)
    ext = extract_kcosymplectic(ms.Theta, ms.Omega)
    rebuilt2, alt2 = rebuild_ms_from_kcosymplectic(kc.eta, kc.theta)
    return [
        _check("k-symplectic forms extracted from the multisymplectic forms", th == ks.theta and om == ks.omega and th2 == ks.theta and om2 == ks.omega),
        _check("multisymplectic forms rebuilt from the k-symplectic forms", rebuilt.Theta == ms.Theta and rebuilt.Omega == ms.Omega and alt == ms.Omega),
        _check("k-cosymplectic forms extracted from the multisymplectic forms", ext.theta == kc.theta and ext.omega == kc.omega and ext.eta == kc.eta and ext.eta_alt == kc.eta),
        _check("multisymplectic forms rebuilt from the k-cosymplectic forms", rebuilt2.Theta == ms.Theta and rebuilt2.Omega == ms.Omega and alt2 == ms.Omega),
    ]


def theorem_suite(sys: FieldTheory) -> dict:
    """Every equivalence certificate and identity check applicable to ``sys``."""
    if sys.variant.hamiltonian:
        certs, checks = _hamiltonian_suite(sys)
    else:
        certs, checks = _lagrangian_suite(sys)
    checks = _canonical_checks(sys.k, sys.n) + checks
    ok = all(c["status"] == "Pass" for c in certs) and all(c["result"] == "Pass" for c in checks)
    return {
        "variant": sys.variant.value,
        "k": sys.k,
        "n": sys.n,
        "generator": to_str(sys.generator),
        "seed": default_seed(),
        "certificates": certs,
        "checks": checks,
        "verdict": "Pass" if ok else "Fail",
    }
