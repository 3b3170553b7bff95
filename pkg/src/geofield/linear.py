"""Linear algebra on affine residual systems, evaluated at sample points.

Residual systems from the field-equation builders are affine in their
unknowns with coefficients that are expressions in frame coordinates.  The
helpers here split residuals into coefficient rows and evaluate those rows
at random points, exactly over the rationals when no transcendental atom is
involved and in floating point otherwise.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .symexpr import (
    ZERO,
    EvalError,
    Expr,
    NotRational,
    diff,
    evaluate,
    evaluate_exact,
    natural_key,
    normalize,
    subs,
)

__all__ = [
    "AffineRow",
    "affine_rows",
    "sample_points",
    "numeric_rows",
    "rank",
    "solve",
    "FLOAT_TOL",
]

FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class AffineRow:
    """``Σ coeffs[u]·u + const`` plus any part that is not affine."""

    coeffs: Dict[str, Expr]
    const: Expr
    affine: bool


def affine_rows(residuals: Sequence[Expr], unknowns: Sequence[str]) -> List[AffineRow]:
    unk = set(unknowns)
    zero_map = {u: ZERO for u in unknowns}
    rows = []
    for r in residuals:
        coeffs = {}
        affine = True
        for u in sorted(r.free & unk, key=natural_key):
            c = normalize(diff(r, u))
            if c.free & unk:
                affine = False
            if c != ZERO:
                coeffs[u] = c
        rows.append(AffineRow(coeffs, normalize(subs(r, zero_map)), affine))
    return rows


def sample_points(names: Sequence[str], count: int, seed: int) -> List[Dict[str, Fraction]]:
    """Deterministic small-denominator rational sample points."""
    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        pts.append({nm: Fraction(rng.randint(-40, 40), rng.randint(1, 9)) for nm in sorted(names, key=natural_key)})
    return pts


def _value(e: Expr, point, exact: bool):
    if exact:
        return evaluate_exact(e, point)
    return evaluate(e, {k: float(v) for k, v in point.items()})


def numeric_rows(rows: Sequence[AffineRow], unknowns: Sequence[str], point) -> Tuple[list, bool]:
    """Augmented numeric rows ``[a_1 … a_m | c]`` at ``point``.

    Returns the rows and whether they are exact rationals.  Raises
    :class:`EvalError` when the point is singular for some coefficient.
    """
    for exact in (True, False):
        try:
            out = []
            for row in rows:
                vals = [_value(row.coeffs[u], point, exact) if u in row.coeffs else 0 for u in unknowns]
                vals.append(_value(row.const, point, exact))
                out.append(vals)
            return out, exact
        except NotRational:
            continue
        except ZeroDivisionError as exc:
            raise EvalError(str(exc)) from exc
    raise AssertionError("unreachable")  # pragma: no cover


def _rref_exact(rows: List[List[Fraction]]):
    M = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(rows: Sequence[Sequence], exact: bool) -> int:
    if not rows:
        return 0
    if exact:
        return len(_rref_exact([list(r) for r in rows])[1])
    A = np.array(rows, dtype=float)
    scale = max(1.0, float(np.abs(A).max()))
    return int(np.linalg.matrix_rank(A, tol=FLOAT_TOL * scale * max(A.shape)))


def solve(rows: Sequence[Sequence], exact: bool) -> Optional[Tuple[list, List[list]]]:
    """Solve ``Σ a_j u_j + c = 0``; returns (particular, null-space basis) or None."""
    m = len(rows[0]) - 1 if rows else 0
    if not rows:
        return [0] * m, [[1 if i == j else 0 for i in range(m)] for j in range(m)]
    if exact:
        R, piv = _rref_exact([list(r) for r in rows])
        if m in piv:
            return None
        part = [Fraction(0)] * m
        for row, c in zip(R, piv):
            part[c] = -row[m]
        free = [j for j in range(m) if j not in piv]
        basis = []
        for f in free:
            v = [Fraction(0)] * m
            v[f] = Fraction(1)
            for row, c in zip(R, piv):
                v[c] = -row[f]
            basis.append(v)
        return part, basis
    A = np.array(rows, dtype=float)
    M, b = A[:, :m], -A[:, m]
    x, *_ = np.linalg.lstsq(M, b, rcond=None)
    if np.abs(M @ x - b).max(initial=0.0) > FLOAT_TOL * max(1.0, np.abs(b).max(initial=0.0)):
        return None
    _, s, vt = np.linalg.svd(M)
    r = int((s > FLOAT_TOL * max(1.0, s.max(initial=0.0))).sum())
    return list(x), [list(v) for v in vt[r:]]
