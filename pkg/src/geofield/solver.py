"""Integral sections of k-vector fields on rectangular grids.

The section through ``x0`` is built one axis at a time: a classic RK4 sweep
along ``t1`` from ``x0``, then a sweep along ``t2`` from every node of that
line, and so on.  Every sweep integrates all its lines at once as numpy
arrays.  The result only represents an integral section when the fields
commute, so every solution carries the sampled commutator residual.
"""

from __future__ import annotations

import io
import random
import re
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .forms import KVectorField, lie_bracket
from .hamiltonian import EquationSet, SymbolicSection
from .symexpr import Const, EvalError, default_seed, diff, lambdify, natural_key, normalize

__all__ = [
    "IntegrationError",
    "GridSpec",
    "GridSolution",
    "integrate",
    "commutator_residual",
    "grid_residual",
    "sample_section",
    "section_residual_on_grid",
    "INTEGRABILITY_TOL",
]

INTEGRABILITY_TOL = 1e-6
_JET = re.compile(r"^d(?P<c>.+)_dt(?P<B>\d+)$")
_JET2 = re.compile(r"^d2q(?P<i>\d+)_dt(?P<A>\d+)dt(?P<B>\d+)$")


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Axes ``[0, Tᴬ]`` sampled with step ``hᴬ``."""

    ranges: Tuple[float, ...]
    steps: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "ranges", tuple(float(r) for r in self.ranges))
        object.__setattr__(self, "steps", tuple(float(h) for h in self.steps))
        if len(self.ranges) != len(self.steps) or not self.ranges:
            raise ValueError("ranges and steps must have one entry per base axis")
        for T, h in zip(self.ranges, self.steps):
            if T < 0 or h <= 0:
                raise ValueError("ranges must be non-negative and steps positive")
            if abs(T / h - round(T / h)) > 1e-9 * max(1.0, T / h):
                raise ValueError(f"range {T} is not a whole number of steps {h}")

    @property
    def k(self) -> int:
        return len(self.ranges)

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(int(round(T / h)) + 1 for T, h in zip(self.ranges, self.steps))

    def axes(self) -> List[np.ndarray]:
        return [np.arange(N) * h for N, h in zip(self.counts, self.steps)]

    def mesh(self) -> List[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")


@dataclass
class GridSolution:
    """Node values of a section over a rectangular grid.

    ``values[..., j]`` holds coordinate ``coords[j]``; the base values are
    implicit in the grid indices.
    """

    grid: GridSpec
    coords: List[str]
    values: np.ndarray
    commutator_residual: float = 0.0
    integral_section: bool = True
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        expected = self.grid.counts + (len(self.coords),)
        if self.values.shape != expected:
            raise ValueError(f"value array has shape {self.values.shape}, expected {expected}")
        if not np.all(np.isfinite(self.values)):
            raise IntegrationError("non-finite values in grid solution")

    @property
    def k(self) -> int:
        return self.grid.k

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[..., self.coords.index(name)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        header = [f"t{A}" for A in range(1, self.k + 1)] + list(self.coords)
        buf.write(",".join(header) + "\n")
        axes = self.grid.axes()
        for idx in np.ndindex(*self.grid.counts):
            row = [axes[a][i] for a, i in enumerate(idx)] + list(self.values[idx])
            buf.write(",".join(f"{float(x):.17g}" for x in row) + "\n")
        return buf.getvalue()


# ---------------------------------------------------------------------------


def _compile(X: KVectorField):
    """Per-field callables returning the state derivative along ``tᴬ``."""
    frame = X.frame
    ts = [f"t{A}" for A in range(1, X.k + 1)]
    state = [c for c in frame.coords if not (frame.has_t and c in ts)]
    if frame.has_t:
        for A, XA in enumerate(X, 1):
            for B, t in enumerate(ts, 1):
                if XA[t] != Const(1 if A == B else 0):
                    raise ValueError(f"X{A} must have unit t{A}-component and no other base components")
    names = state + ts
    fns = [[lambdify(XA[c], names) for c in state] for XA in X]
    return state, fns


def _rhs(fns, y: np.ndarray, t: Sequence[np.ndarray]) -> np.ndarray:
    args = [y[..., j] for j in range(y.shape[-1])] + list(t)
    return np.stack([np.broadcast_to(np.asarray(f(*args), dtype=float), y.shape[:-1]) for f in fns], axis=-1)


def _rk4(fns, y, t, axis, h):
    def shifted(dt):
        out = list(t)
        out[axis] = t[axis] + dt
        return out

    k1 = _rhs(fns, y, t)
    k2 = _rhs(fns, y + 0.5 * h * k1, shifted(0.5 * h))
    k3 = _rhs(fns, y + 0.5 * h * k2, shifted(0.5 * h))
    k4 = _rhs(fns, y + h * k3, shifted(h))
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(
    X: KVectorField,
    x0: Mapping[str, float],
    grid: GridSpec,
    axis_order: Optional[Sequence[int]] = None,
    guard: bool = True,
    commutator_samples: int = 64,
) -> GridSolution:
    """Integrate ``X`` on ``grid`` starting from ``x0`` at ``t = 0``.

    Args:
        X: k-vector field with evaluable coefficients.  On t-extended frames
            the base components must be ``δᴮ_A``.
        x0: initial value of every non-base coordinate.
        grid: axis ranges and steps; ``grid.k`` must equal ``X.k``.
        axis_order: order of the sweeps (1-based); defaults to ``1..k``.
        guard: compare each step against two half steps and reject it when
            the difference exceeds ``1e3·h⁵·(1 + |y|)``.
        commutator_samples: sample count for the integrability diagnostic.

    Raises:
        IntegrationError: on non-finite states or rejected steps.
    """
    if grid.k != X.k:
        raise ValueError(f"grid has {grid.k} axes, k-vector field has {X.k} fields")
    state, fns = _compile(X)
    missing = [c for c in state if c not in x0]
    if missing:
        raise ValueError(f"initial value missing for {missing[0]}")
    order = [a - 1 for a in (axis_order or range(1, X.k + 1))]
    if sorted(order) != list(range(X.k)):
        raise ValueError("axis_order must be a permutation of 1..k")
    counts = grid.counts
    axes = grid.axes()
    m = len(state)
    # y has one leading axis per completed sweep, in grid order
    y = np.array([float(x0[c]) for c in state], dtype=float).reshape((1,) * X.k + (m,))
    for axis in order:
        h = grid.steps[axis]
        N = counts[axis]
        line_shape = list(y.shape[:-1])
        out = np.empty(line_shape[:axis] + [N] + line_shape[axis + 1 :] + [m])
        # base values of the lines being swept; unswept axes sit at 0
        t = []
        for a in range(X.k):
            vals = axes[a] if line_shape[a] > 1 else np.zeros(1)
            t.append(np.broadcast_to(vals.reshape([-1 if b == a else 1 for b in range(X.k)]), line_shape))
        cur = np.take(y, 0, axis=axis)
        cur = np.expand_dims(cur, axis)
        sl = [slice(None)] * (X.k + 1)
        sl[axis] = slice(0, 1)
        out[tuple(sl)] = cur
        for step in range(1, N):
            t_axis = (step - 1) * h
            t[axis] = np.full(line_shape, t_axis)
            with np.errstate(all="ignore"):
                nxt = _rk4(fns[axis], cur, t, axis, h)
                if guard:
                    half = _rk4(fns[axis], cur, t, axis, 0.5 * h)
                    t_half = list(t)
                    t_half[axis] = t[axis] + 0.5 * h
                    half = _rk4(fns[axis], half, t_half, axis, 0.5 * h)
            if not np.all(np.isfinite(nxt)):
                raise IntegrationError(f"non-finite state along t{axis + 1} at step {step}")
            if guard:
                err = np.abs(nxt - half)
                bound = 1e3 * h**5 * (1.0 + np.abs(nxt))
                if np.any(err > bound):
                    raise IntegrationError(
                        f"step rejected along t{axis + 1} at step {step}: local error {float(err.max()):.3g} exceeds guard"
                    )
            cur = nxt
            sl[axis] = slice(step, step + 1)
            out[tuple(sl)] = cur
        y = out
    sol = GridSolution(grid, state, y)
    region = {c: (float(y[..., j].min()), float(y[..., j].max())) for j, c in enumerate(state)}
    for A, T in enumerate(grid.ranges, 1):
        region[f"t{A}"] = (0.0, T)
    res = commutator_residual(X, region, commutator_samples)
    sol.commutator_residual = res
    sol.integral_section = res <= INTEGRABILITY_TOL
    if not sol.integral_section:
        sol.notes.append(f"fields do not commute (sampled residual {res:.3g}); grid is a sweep, not an integral section")
    return sol


def commutator_residual(X: KVectorField, region: Mapping[str, Tuple[float, float]], samples: int = 64, seed: Optional[int] = None) -> float:
    """Largest ``|[X_A, X_B]`` coefficient| over random points of a box.

    Coordinates missing from ``region`` are sampled in ``[−1, 1]``.
    """
    frame = X.frame
    brackets = []
    for A in range(len(X)):
        for B in range(A + 1, len(X)):
            br = lie_bracket(X[A], X[B])
            brackets.extend(c for c in br.coeffs if c != Const(0))
    if not brackets:
        return 0.0
    rng = random.Random(default_seed() if seed is None else seed)
    names = list(frame.coords)
    pts = {c: np.array([rng.uniform(*region.get(c, (-1.0, 1.0))) for _ in range(samples)]) for c in names}
    worst = 0.0
    for e in brackets:
        f = lambdify(e, names)
        with np.errstate(all="ignore"):
            vals = np.broadcast_to(np.asarray(f(*[pts[c] for c in names]), dtype=float), (samples,))
        finite = vals[np.isfinite(vals)]
        if finite.size:
            worst = max(worst, float(np.abs(finite).max()))
    return worst


def _grid_values(names: Sequence[str], sol: GridSolution) -> Dict[str, np.ndarray]:
    grid = sol.grid
    mesh = grid.mesh()
    out: Dict[str, np.ndarray] = {}
    first: Dict[Tuple[str, int], np.ndarray] = {}

    def base(c: str) -> np.ndarray:
        if c in sol.coords:
            return sol[c]
        if re.fullmatch(r"t\d+", c) and int(c[1:]) <= grid.k:
            return mesh[int(c[1:]) - 1]
        raise KeyError(f"{c} is neither a grid coordinate nor a base coordinate")

    def grad(c: str, B: int) -> np.ndarray:
        key = (c, B)
        if key not in first:
            vals = base(c)
            if vals.shape[B - 1] < 3:
                raise ValueError(f"axis t{B} needs at least 3 nodes for differencing")
            first[key] = np.gradient(vals, grid.steps[B - 1], axis=B - 1, edge_order=2)
        return first[key]

    for nm in names:
        m2 = _JET2.match(nm)
        m1 = _JET.match(nm)
        if m2:
            i, A, B = m2.group("i"), int(m2.group("A")), int(m2.group("B"))
            out[nm] = np.gradient(grad(f"q{i}", A), grid.steps[B - 1], axis=B - 1, edge_order=2)
        elif m1:
            out[nm] = grad(m1.group("c"), int(m1.group("B")))
        else:
            out[nm] = base(nm)
    return out


def _max_residual(eqs: EquationSet, values: Mapping[str, np.ndarray], shape) -> float:
    worst = 0.0
    for r in eqs.residuals:
        names = sorted(r.free, key=natural_key)
        f = lambdify(r, names)
        with np.errstate(all="ignore"):
            v = np.broadcast_to(np.asarray(f(*[values[n] for n in names]), dtype=float), shape)
        if not np.all(np.isfinite(v)):
            raise EvalError("residual is not finite on the grid")
        worst = max(worst, float(np.abs(v).max()))
    return worst


def grid_residual(eqs: EquationSet, sol: GridSolution) -> float:
    """Max ``|residual|`` over the grid with derivatives by finite differences.

    First jets use second-order central differences (one-sided second-order
    stencils at the boundary); second jets difference the first ones again.
    """
    if eqs.kind != "jet":
        raise ValueError("grid_residual needs a jet-alphabet equation set")
    names = sorted({n for r in eqs.residuals for n in r.free}, key=natural_key)
    values = _grid_values(names, sol)
    return _max_residual(eqs, values, sol.grid.counts)


def sample_section(s: SymbolicSection, grid: GridSpec, coords: Optional[Sequence[str]] = None) -> GridSolution:
    """Evaluate a symbolic section at the grid nodes."""
    coords = list(coords) if coords is not None else sorted(s.components, key=natural_key)
    mesh = grid.mesh()
    names = [f"t{A}" for A in range(1, grid.k + 1)]
    cols = []
    for c in coords:
        f = lambdify(s.components[c], names)
        cols.append(np.broadcast_to(np.asarray(f(*mesh), dtype=float), grid.counts))
    return GridSolution(grid, coords, np.stack(cols, axis=-1))


def section_residual_on_grid(eqs: EquationSet, s: SymbolicSection, grid: GridSpec) -> float:
    """Max ``|residual|`` at the grid nodes using the section's exact derivatives.

    The jets are differentiated symbolically before evaluation, so the value
    measures the equations alone, free of differencing error.
    """
    if eqs.kind != "jet":
        raise ValueError("section_residual_on_grid needs a jet-alphabet equation set")
    mesh = grid.mesh()
    ts = [f"t{A}" for A in range(1, grid.k + 1)]
    subst = dict(s.components)
    for c, e in s.components.items():
        for A in range(1, grid.k + 1):
            first = normalize(diff(e, f"t{A}"))
            subst[f"d{c}_dt{A}"] = first
            if c.startswith("q"):
                for B in range(A, grid.k + 1):
                    subst[f"d2{c}_dt{A}dt{B}"] = normalize(diff(first, f"t{B}"))
    values: Dict[str, np.ndarray] = {}
    names = sorted({n for r in eqs.residuals for n in r.free}, key=natural_key)
    for nm in names:
        if nm in ts:
            values[nm] = mesh[int(nm[1:]) - 1]
        elif nm in subst:
            f = lambdify(subst[nm], ts)
            values[nm] = np.broadcast_to(np.asarray(f(*mesh), dtype=float), grid.counts)
        else:
            raise KeyError(f"{nm} is not determined by the section")
    return _max_residual(eqs, values, grid.counts)

