"""Canonical k-symplectic, k-cosymplectic and multisymplectic structures.

All structures are built in Darboux coordinates on the frames of
:mod:`geofield.forms`.  Nondegeneracy is checked numerically by rank at
random sample points; with constant canonical coefficients that check is
exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence

import numpy as np

from .forms import (
    CoordinateFrame,
    DifferentialForm,
    OneOneTensor,
    VectorField,
    base_codim1,
    base_volume,
    coordinate_field,
    d,
    evaluate,
    interior,
    kcosym_frame,
    ksym_frame,
    multimomentum_frame,
    wedge,
)
from .symexpr import Const, Var, default_seed, evaluate as eval_expr

__all__ = [
    "KSymplecticStructure",
    "KCosymplecticStructure",
    "MultisymplecticStructure",
    "canonical_ksymplectic",
    "canonical_kcosymplectic",
    "canonical_multisymplectic",
    "k_tangent_structure",
    "liouville_field",
    "volume_form",
    "vanishes_on",
    "stacked_rank",
    "multisymplectic_rank",
]


def vanishes_on(form: DifferentialForm, span: Sequence[VectorField]) -> bool:
    """True when ``form`` is zero on every tuple drawn from ``span``."""
    r = form.degree
    for combo in combinations(span, r):
        val = evaluate(form, list(combo))
        if not val.is_zero():
            return False
    return True


def _sample_point(frame: CoordinateFrame, rng: random.Random):
    return {c: rng.uniform(-2.0, 2.0) for c in frame.coords}


def _numeric_matrix(form: DifferentialForm, point) -> np.ndarray:
    """Antisymmetric coefficient matrix of a 2-form at ``point``."""
    n = form.frame.dim
    M = np.zeros((n, n))
    for (i, j), c in form.terms.items():
        v = eval_expr(c, point)
        M[i, j] = v
        M[j, i] = -v
    return M


def stacked_rank(
    forms: Sequence[DifferentialForm],
    samples: int = 20,
    seed: Optional[int] = None,
    extra: Sequence[DifferentialForm] = (),
) -> int:
    """Minimum over samples of the rank of the stacked matrices of 2-forms.

    ``extra`` 1-forms contribute one row each.  Full rank equal to the frame
    dimension means the common kernel is zero.
    """
    frame = forms[0].frame
    rng = random.Random(default_seed() if seed is None else seed)
    best = frame.dim
    for _ in range(samples):
        pt = _sample_point(frame, rng)
        rows = [_numeric_matrix(w, pt) for w in forms]
        for e in extra:
            row = np.zeros((1, frame.dim))
            for (i,), c in e.terms.items():
                row[0, i] = eval_expr(c, pt)
            rows.append(row)
        stack = np.vstack(rows)
        best = min(best, int(np.linalg.matrix_rank(stack)))
    return best


def multisymplectic_rank(Omega: DifferentialForm, samples: int = 20, seed: Optional[int] = None) -> int:
    """Rank of ``X ↦ i(X)Ω`` as a map into (deg-1)-forms (min over samples)."""
    frame = Omega.frame
    r = Omega.degree
    rows = list(combinations(range(frame.dim), r - 1))
    row_of = {idx: i for i, idx in enumerate(rows)}
    columns = []
    for c in frame.coords:
        columns.append(interior(coordinate_field(frame, c), Omega))
    rng = random.Random(default_seed() if seed is None else seed)
    best = frame.dim
    for _ in range(samples):
        pt = _sample_point(frame, rng)
        M = np.zeros((len(rows), frame.dim))
        for j, col in enumerate(columns):
            for idx, c in col.terms.items():
                M[row_of[idx], j] = eval_expr(c, pt)
        best = min(best, int(np.linalg.matrix_rank(M)))
    return best


# ---------------------------------------------------------------------------


@dataclass
class KSymplecticStructure:
    frame: CoordinateFrame
    theta: List[DifferentialForm]
    omega: List[DifferentialForm]
    vertical: List[VectorField]

    def check(self) -> dict:
        """Structure invariants; every entry should be ``True``."""
        return {
            "exact": all(w == -d(t) for w, t in zip(self.omega, self.theta)),
            "closed": all(d(w).is_zero() for w in self.omega),
            "isotropic_vertical": all(vanishes_on(w, self.vertical) for w in self.omega),
            "nondegenerate": stacked_rank(self.omega) == self.frame.dim,
        }


@dataclass
class KCosymplecticStructure:
    frame: CoordinateFrame
    eta: List[DifferentialForm]
    theta: List[DifferentialForm]
    omega: List[DifferentialForm]
    vertical: List[VectorField]
    reeb: List[VectorField]

    def check(self) -> dict:
        top = self.eta[0]
        for e in self.eta[1:]:
            top = wedge(top, e)
        reeb_eta = all(
            interior(R, e).scalar_value() == Const(1 if A == B else 0) for A, R in enumerate(self.reeb) for B, e in enumerate(self.eta)
        )
        reeb_omega = all(interior(R, w).is_zero() for R in self.reeb for w in self.omega)
        return {
            "exact": all(w == -d(t) for w, t in zip(self.omega, self.theta)),
            "closed": all(d(w).is_zero() for w in self.omega) and all(d(e).is_zero() for e in self.eta),
            "eta_volume_nonzero": not top.is_zero(),
            "eta_vanish_vertical": all(vanishes_on(e, self.vertical) for e in self.eta),
            "isotropic_vertical": all(vanishes_on(w, self.vertical) for w in self.omega),
            "reeb_dual": reeb_eta,
            "reeb_omega": reeb_omega,
            "nondegenerate": stacked_rank(self.omega, extra=self.eta) == self.frame.dim,
        }


@dataclass
class MultisymplecticStructure:
    frame: CoordinateFrame
    Theta: DifferentialForm
    Omega: DifferentialForm

    def check(self) -> dict:
        return {
            "exact": self.Omega == -d(self.Theta),
            "closed": d(self.Omega).is_zero(),
            "one_nondegenerate": multisymplectic_rank(self.Omega) == self.frame.dim,
        }


# ---------------------------------------------------------------------------


def _momentum_forms(frame: CoordinateFrame):
    thetas, omegas = [], []
    for A in range(1, frame.k + 1):
        th = DifferentialForm.zero(frame, 1)
        for i in range(1, frame.n + 1):
            th = th + Var(f"p{A}_{i}") * frame.dx(f"q{i}")
        thetas.append(th)
        omegas.append(-d(th))
    return thetas, omegas


def canonical_ksymplectic(k: int, n: int) -> KSymplecticStructure:
    """``θᴬ = pᴬᵢ dqⁱ``, ``ωᴬ = dqⁱ∧dpᴬᵢ`` on ``(T¹ₖ)*Q``."""
    frame = ksym_frame(k, n)
    thetas, omegas = _momentum_forms(frame)
    V = [coordinate_field(frame, f"p{A}_{i}") for A in range(1, k + 1) for i in range(1, n + 1)]
    return KSymplecticStructure(frame, thetas, omegas, V)


def canonical_kcosymplectic(k: int, n: int, frame: Optional[CoordinateFrame] = None) -> KCosymplecticStructure:
    """``ηᴬ = dtᴬ``, ``Θᴬ = pᴬᵢ dqⁱ``, ``Ωᴬ = dqⁱ∧dpᴬᵢ``; Reeb fields ``∂/∂tᴬ``."""
    frame = frame or kcosym_frame(k, n)
    thetas, omegas = _momentum_forms(frame)
    eta = [frame.dx(f"t{A}") for A in range(1, k + 1)]
    V = [coordinate_field(frame, f"p{A}_{i}") for A in range(1, k + 1) for i in range(1, n + 1)]
    reeb = [coordinate_field(frame, f"t{A}") for A in range(1, k + 1)]
    return KCosymplecticStructure(frame, eta, thetas, omegas, V, reeb)


def canonical_multisymplectic(k: int, n: int, frame: Optional[CoordinateFrame] = None) -> MultisymplecticStructure:
    """``Θ = pᴬᵢ dqⁱ∧d^{k-1}t_A + p dᵏt`` and ``Ω = -dΘ`` on 𝓜π."""
    frame = frame or multimomentum_frame(k, n)
    Theta = Var("p") * base_volume(frame)
    for A in range(1, k + 1):
        dk1 = base_codim1(frame, A)
        for i in range(1, n + 1):
            Theta = Theta + Var(f"p{A}_{i}") * wedge(frame.dx(f"q{i}"), dk1)
    return MultisymplecticStructure(frame, Theta, -d(Theta))


def k_tangent_structure(frame: CoordinateFrame) -> List[OneOneTensor]:
    """``Sᴬ = ∂/∂vᴬᵢ ⊗ dqⁱ`` on a velocity frame."""
    if frame.fiber != "v":
        raise ValueError(f"{frame.bundle} carries no velocities")
    return [
        OneOneTensor(frame, {(f"v{A}_{i}", f"q{i}"): 1 for i in range(1, frame.n + 1)})
        for A in range(1, frame.k + 1)
    ]


def liouville_field(frame: CoordinateFrame) -> VectorField:
    """``Δ = vᴬᵢ ∂/∂vᴬᵢ``."""
    if frame.fiber != "v":
        raise ValueError(f"{frame.bundle} carries no velocities")
    comps = {f"v{A}_{i}": Var(f"v{A}_{i}") for A in range(1, frame.k + 1) for i in range(1, frame.n + 1)}
    return VectorField(frame, comps)


def volume_form(k: int, frame: Optional[CoordinateFrame] = None) -> DifferentialForm:
    """``dt1∧…∧dtk``; on the bare base frame when none is given."""
    if frame is None:
        frame = CoordinateFrame(k, 1, None, True, False, "R^k x Q")
    return base_volume(frame)
