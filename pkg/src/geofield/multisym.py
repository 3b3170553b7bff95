"""Multisymplectic Hamiltonian and Lagrangian formalisms.

The Hamiltonian side lives on ``J¹π* ≅ ℝᵏ×(T¹ₖ)*Q`` (the k-cosymplectic
chart) with the Hamiltonian section ``p = −𝓗`` into ``𝓜π``; the Lagrangian
side lives on ``J¹π ≅ ℝᵏ×T¹ₖQ``.  Contractions of k-vector fields fill the
slots in order, ``i(X̄)α = α(X̄1, …, X̄k, ·)``, so ``i(X̄)dᵏt = 1`` when
``(X̄_A)ᴮ = δᴮ_A``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict

from .canonical import canonical_multisymplectic
from .forms import (
    CoordinateFrame,
    DifferentialForm,
    SmoothMap,
    base_codim1,
    base_frame,
    base_volume,
    contract_k,
    coordinate_field,
    d,
    interior,
    jet_frame,
    kcosym_frame,
    multimomentum_frame,
    pullback,
    symbolic_kvector,
    wedge,
)
from .hamiltonian import (
    EquationSet,
    FieldTheory,
    SectionReport,
    SymbolicSection,
    Variant,
    _report,
    component_symbol,
    delta_rows,
    jet_symbol,
)
from .lagrangian import energy, legendre
from .symexpr import ZERO, Const, Expr, Var, diff, normalize, subs

__all__ = [
    "CartanForms",
    "hamilton_cartan_forms",
    "hamiltonian_section",
    "hamilton_cartan_via_section",
    "section_map",
    "LegendrePair",
    "ms_hamiltonian_kvector_equations",
    "ms_section_residual",
    "poincare_cartan_forms",
    "ms_lagrangian_kvector_equations",
    "energy_from_poincare_cartan",
    "extended_restricted_legendre",
    "kvector_contraction_equations",
    "section_contraction_equations",
    "ms_section_equations",
    "ms_lagrangian_section_equations",
]


@dataclass
class CartanForms:
    """A k-form ``Theta`` and the (k+1)-form ``Omega = −dTheta``."""

    Theta: DifferentialForm
    Omega: DifferentialForm

    def check(self) -> dict:
        return {"exact": self.Omega == -d(self.Theta), "closed": d(self.Omega).is_zero()}


def _momentum_part(frame: CoordinateFrame, coef) -> DifferentialForm:
    """``Σ coef(A, i) dqⁱ∧d^{k−1}t_A``."""
    out = DifferentialForm.zero(frame, frame.k)
    for A in range(1, frame.k + 1):
        dk1 = base_codim1(frame, A)
        for i in range(1, frame.n + 1):
            c = coef(A, i)
            if c != ZERO:
                out = out + c * wedge(frame.dx(f"q{i}"), dk1)
    return out


# ---------------------------------------------------------------------------
# Hamiltonian side


def hamilton_cartan_forms(sys: FieldTheory) -> CartanForms:
    """``Θ_h = pᴬᵢ dqⁱ∧d^{k−1}t_A − 𝓗 dᵏt`` and ``Ω_h = −dΘ_h`` on J¹π*."""
    frame = kcosym_frame(sys.k, sys.n)
    frame.check_expr(sys.generator, "Hamiltonian")
    Theta = _momentum_part(frame, lambda A, i: Var(f"p{A}_{i}")) - sys.generator * base_volume(frame)
    return CartanForms(Theta, -d(Theta))


def hamiltonian_section(sys: FieldTheory) -> SmoothMap:
    """``h: J¹π* → 𝓜π``, ``p = −𝓗``."""
    src = kcosym_frame(sys.k, sys.n)
    tgt = multimomentum_frame(sys.k, sys.n)
    exprs = {c: Var(c) for c in src.coords}
    exprs["p"] = normalize(-sys.generator)
    return SmoothMap(src, tgt, exprs, "h")


def hamilton_cartan_via_section(sys: FieldTheory) -> CartanForms:
    """``h*Θ`` and ``h*Ω`` from the canonical multisymplectic forms."""
    ms = canonical_multisymplectic(sys.k, sys.n)
    h = hamiltonian_section(sys)
    return CartanForms(pullback(h, ms.Theta), pullback(h, ms.Omega))


def kvector_contraction_equations(Omega: DifferentialForm, name: str) -> EquationSet:
    """Component rows of ``i(X̄)Ω = 0`` with ``(X̄_A)ᴮ = δᴮ_A`` built in.

    The δ rows come first.  Every coefficient of the resulting 1-form is a
    row labelled by its coordinate; the ``dtᴮ`` rows are products of
    unknowns when ``k ≥ 2``.
    """
    frame = Omega.frame
    X, unknowns = symbolic_kvector(frame, "X")
    delta = {component_symbol(A, f"t{B}"): Const(1 if A == B else 0) for A in range(1, frame.k + 1) for B in range(1, frame.k + 1)}
    Xd = X.subs(delta)
    one_form = contract_k(list(Xd), Omega)
    res, labels = delta_rows(frame)
    for c in frame.coords:
        res.append(one_form.coeff(c))
        labels.append(c)
    return EquationSet("component", frame, unknowns, res, labels, name)


def section_contraction_equations(Omega: DifferentialForm, name: str) -> EquationSet:
    """Jet-alphabet rows of ``ψ̄*i(Y)Ω = 0`` for all ``Y``.

    Along a section ``ψ̄(t) = (t, ψ(t))`` the tangent vectors ``ψ̄_*∂/∂tᴬ``
    have components ``(δ, ∂ψᶜ/∂tᴬ)``, so the rows are those of
    :func:`kvector_contraction_equations` with ``X{A}_c`` replaced by the
    jet symbol ``dc_dt{A}``.
    """
    eqs = kvector_contraction_equations(Omega, name)
    frame = Omega.frame
    fibre = [c for c in frame.coords if not c.startswith("t")]
    mapping = {component_symbol(A, c): Var(jet_symbol(c, A)) for A in range(1, frame.k + 1) for c in fibre}
    nd = frame.k * frame.k
    res = [normalize(subs(r, mapping)) for r in eqs.residuals[nd:]]
    unknowns = [jet_symbol(c, B) for c in fibre for B in range(1, frame.k + 1)]
    return EquationSet("jet", frame, unknowns, res, eqs.labels[nd:], name)


def ms_hamiltonian_kvector_equations(sys: FieldTheory) -> EquationSet:
    """``i(X̄)Ω_h = 0`` and ``i(X̄)dᵏt = 1`` in components."""
    forms = hamilton_cartan_forms(sys)
    return kvector_contraction_equations(forms.Omega, "multisymplectic Hamiltonian k-vector field equations")


def ms_section_equations(sys: FieldTheory) -> EquationSet:
    """Multisymplectic section equations in the jet alphabet."""
    return section_contraction_equations(hamilton_cartan_forms(sys).Omega, "multisymplectic section equations")


def section_map(s: SymbolicSection, frame: CoordinateFrame) -> SmoothMap:
    """``ψ̄: ℝᵏ → frame`` for a section over the base."""
    s.check_frame(frame)
    exprs: Dict[str, Expr] = dict(s.components)
    for A in range(1, frame.k + 1):
        exprs[f"t{A}"] = Var(f"t{A}")
    return SmoothMap(base_frame(frame.k), frame, exprs, "psi")


def ms_section_residual(sys: FieldTheory, s: SymbolicSection) -> SectionReport:
    """``ψ̄*i(∂/∂c)Ω_h`` for every coordinate ``c``; each is a multiple of ``dᵏt``."""
    Omega = hamilton_cartan_forms(sys).Omega
    psi = section_map(s, Omega.frame)
    vol = tuple(range(sys.k))
    labels, res = [], []
    for c in Omega.frame.coords:
        pulled = pullback(psi, interior(coordinate_field(Omega.frame, c), Omega))
        labels.append(c)
        res.append(pulled.terms.get(vol, ZERO))
    return _report("multisymplectic section equations", labels, res)


# ---------------------------------------------------------------------------
# Lagrangian side


def _lagrangian_system(sys: FieldTheory) -> FieldTheory:
    if sys.variant.hamiltonian:
        raise ValueError(f"{sys.variant.value} is not a Lagrangian variant")
    return sys if sys.variant is not Variant.KSymLag else sys.with_variant(Variant.KCosymLag)


def poincare_cartan_forms(sys: FieldTheory) -> CartanForms:
    """``Θ_𝕃 = ∂𝓛/∂vᴬᵢ dqⁱ∧d^{k−1}t_A − 𝓔_𝓛 dᵏt`` and ``Ω_𝕃 = −dΘ_𝕃`` on J¹π."""
    sys = _lagrangian_system(sys)
    frame = jet_frame(sys.k, sys.n)
    L = sys.generator
    Theta = _momentum_part(frame, lambda A, i: diff(L, f"v{A}_{i}")) - energy(sys) * base_volume(frame)
    return CartanForms(Theta, -d(Theta))


def energy_from_poincare_cartan(sys: FieldTheory) -> Expr:
    """Energy read off ``Θ_𝕃`` on the base directions.

    ``Θ_𝕃(∂/∂t1, …, ∂/∂tk)`` equals ``−𝓔_𝓛`` with the orientation
    ``dᵏt(∂/∂t1, …, ∂/∂tk) = 1``; the sign is restored here.
    """
    forms = poincare_cartan_forms(sys)
    frame = forms.Theta.frame
    ts = [coordinate_field(frame, f"t{A}") for A in range(1, sys.k + 1)]
    return normalize(-contract_k(ts, forms.Theta).scalar_value())


def ms_lagrangian_kvector_equations(sys: FieldTheory) -> EquationSet:
    """``i(Γ̄)Ω_𝕃 = 0`` and ``i(Γ̄)dᵏt = 1`` in components."""
    forms = poincare_cartan_forms(sys)
    return kvector_contraction_equations(forms.Omega, "multisymplectic Lagrangian k-vector field equations")


def ms_lagrangian_section_equations(sys: FieldTheory) -> EquationSet:
    """``ψ̄*i(Y)Ω_𝕃 = 0`` for sections of J¹π in the jet alphabet."""
    return section_contraction_equations(poincare_cartan_forms(sys).Omega, "multisymplectic Lagrangian section equations")


@dataclass
class LegendrePair:
    extended: SmoothMap
    restricted: SmoothMap


def extended_restricted_legendre(sys: FieldTheory) -> LegendrePair:
    """``F̃𝓛: (t, q, v) ↦ (t, q, ∂𝓛/∂v, 𝓛 − v·∂𝓛/∂v)`` and ``F𝓛 = μ∘F̃𝓛``."""
    sys = _lagrangian_system(sys)
    restricted = legendre(sys)
    src = restricted.source
    tgt = multimomentum_frame(sys.k, sys.n)
    exprs = restricted.as_dict()
    exprs["p"] = normalize(-energy(sys))
    return LegendrePair(SmoothMap(src, tgt, exprs, "FL~"), restricted)
