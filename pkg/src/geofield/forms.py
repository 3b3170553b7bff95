"""Exterior calculus in a single global coordinate chart.

A :class:`CoordinateFrame` fixes an ordered list of coordinate names.  Forms
are stored sparsely as ``{index tuple: coefficient}`` with strictly
increasing index tuples; coefficients are kept in the canonical form of
:func:`geofield.symexpr.normalize`.

The base volume and its contractions follow one orientation convention::

    d^k t = dt1∧…∧dtk,    d^{k-1} t_A = i(∂/∂tA) d^k t

Every downstream sign is derived from these two definitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .symexpr import (
    ONE,
    Add,
    ZERO,
    Const,
    Expr,
    Var,
    Verdict,
    add,
    as_expr,
    diff,
    equal,
    mul,
    normalize,
    subs,
    to_str,
)

__all__ = [
    "FrameError",
    "CoordinateFrame",
    "VectorField",
    "KVectorField",
    "DifferentialForm",
    "SmoothMap",
    "OneOneTensor",
    "ksym_frame",
    "kcosym_frame",
    "tangent_frame",
    "jet_frame",
    "multimomentum_frame",
    "split_frame",
    "base_frame",
    "config_frame",
    "wedge",
    "d",
    "interior",
    "contract_k",
    "evaluate",
    "pullback",
    "lie_bracket",
    "apply_tensor",
    "coordinate_field",
    "base_volume",
    "base_codim1",
    "form_equal",
    "symbolic_kvector",
]


class FrameError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Frames


def momentum_name(A: int, i: int) -> str:
    return f"p{A}_{i}"


def velocity_name(A: int, i: int) -> str:
    return f"v{A}_{i}"


@dataclass(frozen=True)
class CoordinateFrame:
    """Ordered chart: ``q1..qn``, fibre block (A-major), ``t1..tk``, affine ``p``.

    Attributes:
        k: number of base coordinates (also the k of the k-tangent data).
        n: number of configuration coordinates.
        fiber: ``"p"`` for momenta, ``"v"`` for velocities, ``None`` for none.
        has_t: whether ``t1..tk`` are coordinates.
        affine: whether the affine momentum ``p`` is a coordinate.
        bundle: human-readable bundle label.
    """

    k: int
    n: int
    fiber: Optional[str]
    has_t: bool
    affine: bool = False
    bundle: str = ""

    def __post_init__(self):
        if self.k < 1 or self.n < 0 or (self.n == 0 and self.fiber is not None):
            raise FrameError("k must be positive and n must be positive when a fibre is present")
        if self.fiber not in ("p", "v", None):
            raise FrameError(f"bad fiber role {self.fiber!r}")

    @cached_property
    def coords(self) -> Tuple[str, ...]:
        names = [f"q{i}" for i in range(1, self.n + 1)]
        if self.fiber == "p":
            names += [momentum_name(A, i) for A in range(1, self.k + 1) for i in range(1, self.n + 1)]
        elif self.fiber == "v":
            names += [velocity_name(A, i) for A in range(1, self.k + 1) for i in range(1, self.n + 1)]
        if self.has_t:
            names += [f"t{A}" for A in range(1, self.k + 1)]
        if self.affine:
            names.append("p")
        return tuple(names)

    @cached_property
    def index(self) -> Dict[str, int]:
        return {c: i for i, c in enumerate(self.coords)}

    @property
    def dim(self) -> int:
        return len(self.coords)

    @cached_property
    def coordset(self) -> frozenset:
        return frozenset(self.coords)

    def var(self, name: str) -> Var:
        if name not in self.index:
            raise FrameError(f"{name} is not a coordinate of {self.bundle}")
        return Var(name)

    def q(self, i: int) -> str:
        return f"q{i}"

    def fib(self, A: int, i: int) -> str:
        return f"{self.fiber}{A}_{i}"

    def t(self, A: int) -> str:
        return f"t{A}"

    def dx(self, name: str) -> "DifferentialForm":
        return DifferentialForm(self, 1, {(self.index_of(name),): ONE})

    def index_of(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise FrameError(f"{name} is not a coordinate of {self.bundle}") from None

    def check_expr(self, e: Expr, what: str = "expression"):
        bad = sorted(e.free - self.coordset)
        if bad:
            raise FrameError(f"{bad[0]} not in {self.bundle} frame ({what})")

    def base_indices(self) -> List[int]:
        return [self.index[f"t{A}"] for A in range(1, self.k + 1)] if self.has_t else []

    def describe(self) -> dict:
        return {"bundle": self.bundle, "k": self.k, "n": self.n, "coordinates": list(self.coords)}


def ksym_frame(k: int, n: int) -> CoordinateFrame:
    return CoordinateFrame(k, n, "p", False, False, "(T1k)*Q")


def kcosym_frame(k: int, n: int) -> CoordinateFrame:
    return CoordinateFrame(k, n, "p", True, False, "R^k x (T1k)*Q")


def tangent_frame(k: int, n: int) -> CoordinateFrame:
    return CoordinateFrame(k, n, "v", False, False, "T1kQ")


def jet_frame(k: int, n: int) -> CoordinateFrame:
    return CoordinateFrame(k, n, "v", True, False, "R^k x T1kQ")


def multimomentum_frame(k: int, n: int) -> CoordinateFrame:
    return CoordinateFrame(k, n, "p", True, True, "Mpi")


def base_frame(k: int) -> CoordinateFrame:
    """The base ``ℝᵏ`` with coordinates ``t1..tk``."""
    return CoordinateFrame(k, 0, None, True, False, "R^k")


def config_frame(k: int, n: int, with_t: bool = False) -> CoordinateFrame:
    """``Q`` or ``ℝᵏ×Q`` (configuration coordinates only)."""
    return CoordinateFrame(k, n, None, with_t, False, "R^k x Q" if with_t else "Q")


def split_frame(k: int, n: int) -> CoordinateFrame:
    """``ℝᵏ×ℝ×(T¹ₖ)*Q``: same chart as the multimomentum frame."""
    return CoordinateFrame(k, n, "p", True, True, "R^k x R x (T1k)*Q")


def _require_same(f1: CoordinateFrame, f2: CoordinateFrame):
    if f1 != f2:
        raise FrameError(f"frame mismatch: {f1.bundle} vs {f2.bundle}")


# ---------------------------------------------------------------------------
# Vector fields


class VectorField:
    """Vector field with one coefficient per frame coordinate."""

    __slots__ = ("frame", "coeffs")

    def __init__(self, frame: CoordinateFrame, coeffs):
        if isinstance(coeffs, Mapping):
            unknown = set(coeffs) - frame.coordset
            if unknown:
                raise FrameError(f"{sorted(unknown)[0]} not in {frame.bundle} frame")
            vals = tuple(normalize(as_expr(coeffs.get(c, 0))) for c in frame.coords)
        else:
            vals = tuple(normalize(as_expr(c)) for c in coeffs)
            if len(vals) != frame.dim:
                raise FrameError("coefficient count does not match frame dimension")
        self.frame = frame
        self.coeffs = vals

    def __getitem__(self, name: str) -> Expr:
        return self.coeffs[self.frame.index_of(name)]

    def as_dict(self) -> Dict[str, Expr]:
        return dict(zip(self.frame.coords, self.coeffs))

    def __call__(self, f) -> Expr:
        """Derivative of the scalar ``f`` along the field."""
        f = as_expr(f)
        return normalize(add(*(mul(c, diff(f, x)) for x, c in zip(self.frame.coords, self.coeffs) if c != ZERO)))

    def __add__(self, other: "VectorField") -> "VectorField":
        _require_same(self.frame, other.frame)
        return VectorField(self.frame, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        _require_same(self.frame, other.frame)
        return VectorField(self.frame, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return VectorField(self.frame, [-a for a in self.coeffs])

    def scale(self, f) -> "VectorField":
        f = as_expr(f)
        return VectorField(self.frame, [f * a for a in self.coeffs])

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.frame == other.frame and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.frame, self.coeffs))

    def is_zero(self) -> bool:
        return all(c == ZERO for c in self.coeffs)

    def subs(self, mapping) -> "VectorField":
        return VectorField(self.frame, [subs(c, mapping) for c in self.coeffs])

    def render(self) -> str:
        terms = [(c, f"∂/∂{x}") for x, c in zip(self.frame.coords, self.coeffs) if c != ZERO]
        return _render_terms(terms)

    __str__ = render

    def __repr__(self):
        return f"VectorField({self.render()!r})"


def coordinate_field(frame: CoordinateFrame, name: str) -> VectorField:
    return VectorField(frame, {name: 1})


class KVectorField(tuple):
    """Ordered k-tuple of vector fields on a common frame."""

    def __new__(cls, fields: Iterable[VectorField]):
        fields = tuple(fields)
        if not fields:
            raise FrameError("empty k-vector field")
        for f in fields[1:]:
            _require_same(fields[0].frame, f.frame)
        return super().__new__(cls, fields)

    @property
    def frame(self) -> CoordinateFrame:
        return self[0].frame

    @property
    def k(self) -> int:
        return len(self)

    def render(self) -> str:
        return "\n".join(f"X{A}: {X.render()}" for A, X in enumerate(self, 1))

    def subs(self, mapping) -> "KVectorField":
        return KVectorField(X.subs(mapping) for X in self)


def symbolic_kvector(frame: CoordinateFrame, prefix: str = "X") -> Tuple[KVectorField, List[str]]:
    """k-vector field whose components are the unknowns ``{prefix}{A}_{coord}``."""
    names: List[str] = []
    fields = []
    for A in range(1, frame.k + 1):
        comps = {}
        for c in frame.coords:
            nm = f"{prefix}{A}_{c}"
            names.append(nm)
            comps[c] = Var(nm)
        fields.append(VectorField(frame, comps))
    return KVectorField(fields), names


# ---------------------------------------------------------------------------
# Forms


def _sort_sign(idx: Sequence[int]) -> int:
    """Sign of the permutation sorting ``idx``; 0 on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign


class DifferentialForm:
    """Sparse r-form ``Σ c_I dx^I`` over a frame."""

    __slots__ = ("frame", "degree", "terms")

    def __init__(self, frame: CoordinateFrame, degree: int, terms: Optional[Mapping[Tuple[int, ...], object]] = None):
        self.frame = frame
        self.degree = degree
        clean: Dict[Tuple[int, ...], Expr] = {}
        for idx, c in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError("index tuple length differs from degree")
            if any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} is not strictly increasing")
            c = normalize(as_expr(c))
            if c != ZERO:
                clean[idx] = c
        self.terms = clean

    # constructors
    @classmethod
    def scalar(cls, frame: CoordinateFrame, f) -> "DifferentialForm":
        return cls(frame, 0, {(): as_expr(f)})

    @classmethod
    def zero(cls, frame: CoordinateFrame, degree: int) -> "DifferentialForm":
        return cls(frame, degree, {})

    @classmethod
    def _raw(cls, frame, degree, terms):
        obj = cls.__new__(cls)
        obj.frame, obj.degree, obj.terms = frame, degree, terms
        return obj

    def coeff(self, *names: str) -> Expr:
        """Coefficient of ``dx_{names}`` (names in any order, sign applied)."""
        idx = [self.frame.index_of(nm) for nm in names]
        s = _sort_sign(idx)
        if s == 0:
            return ZERO
        c = self.terms.get(tuple(sorted(idx)), ZERO)
        return c if s > 0 else normalize(-c)

    def scalar_value(self) -> Expr:
        if self.degree != 0:
            raise ValueError("not a 0-form")
        return self.terms.get((), ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        _require_same(self.frame, other.frame)
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        out = dict(self.terms)
        for idx, c in other.terms.items():
            out[idx] = out[idx] + c if idx in out else c
        return DifferentialForm(self.frame, self.degree, out)

    def __neg__(self):
        return DifferentialForm._raw(self.frame, self.degree, {i: normalize(-c) for i, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        f = as_expr(f)
        return DifferentialForm(self.frame, self.degree, {i: f * c for i, c in self.terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        return (
            isinstance(other, DifferentialForm)
            and self.frame == other.frame
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.frame, self.degree, frozenset(self.terms.items())))

    def subs(self, mapping) -> "DifferentialForm":
        return DifferentialForm(self.frame, self.degree, {i: subs(c, mapping) for i, c in self.terms.items()})

    def on_frame(self, frame: CoordinateFrame) -> "DifferentialForm":
        """Re-home onto a frame containing every coordinate used here."""
        out = {}
        for idx, c in self.terms.items():
            new = [frame.index_of(self.frame.coords[i]) for i in idx]
            s = _sort_sign(new)
            out[tuple(sorted(new))] = c if s > 0 else normalize(-c)
        for c in self.terms.values():
            frame.check_expr(c, "form coefficient")
        return DifferentialForm(frame, self.degree, out)

    def _render_key(self, idx):
        # group by the base-differential factor so that d^{k-1}t_A terms
        # appear in the order A = 1..k, then by the remaining factors
        base = set(self.frame.base_indices())
        tpart = tuple(-i for i in idx if i in base)
        rest = tuple(i for i in idx if i not in base)
        return (len(tpart) > 0 and len(tpart) == self.frame.k, tpart, rest)

    def render(self) -> str:
        if self.degree == 0:
            return to_str(self.scalar_value())
        coords = self.frame.coords
        terms = []
        for idx in sorted(self.terms, key=self._render_key):
            basis = "∧".join("d" + coords[i] for i in idx)
            terms.append((self.terms[idx], basis))
        return _render_terms(terms)

    __str__ = render

    def __repr__(self):
        return f"DifferentialForm({self.render()!r})"


def _render_terms(terms) -> str:
    if not terms:
        return "0"
    out = []
    for c, basis in terms:
        neg = False
        if not isinstance(c, Add):
            txt = to_str(c)
            if txt.startswith("-"):
                neg, txt = True, txt[1:]
        else:
            txt = f"({to_str(c)})"
        piece = basis if txt == "1" else f"{txt} {basis}"
        if not out:
            out.append(f"-{piece}" if neg else piece)
        else:
            out.append(f" - {piece}" if neg else f" + {piece}")
    return "".join(out)


def form_equal(a: DifferentialForm, b: DifferentialForm) -> Verdict:
    """Coefficientwise :func:`equal`; the weakest verdict wins."""
    _require_same(a.frame, b.frame)
    if a.degree != b.degree:
        return Verdict.NOT_EQUAL
    verdict = Verdict.EQUAL
    for idx in set(a.terms) | set(b.terms):
        v = equal(a.terms.get(idx, ZERO), b.terms.get(idx, ZERO))
        if v is Verdict.NOT_EQUAL:
            return v
        if v is Verdict.PROBABLY_EQUAL:
            verdict = v
    return verdict


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    _require_same(a.frame, b.frame)
    out: Dict[Tuple[int, ...], Expr] = {}
    for I, ca in a.terms.items():
        sI = set(I)
        for J, cb in b.terms.items():
            if sI.intersection(J):
                continue
            sign = _sort_sign(I + J)
            K = tuple(sorted(I + J))
            term = mul(ca, cb) if sign > 0 else mul(Const(-1), ca, cb)
            out[K] = add(out[K], term) if K in out else term
    return DifferentialForm(a.frame, a.degree + b.degree, out)


def d(a: DifferentialForm) -> DifferentialForm:
    """Exterior derivative."""
    coords = a.frame.coords
    out: Dict[Tuple[int, ...], Expr] = {}
    for I, c in a.terms.items():
        free = c.free
        for j, name in enumerate(coords):
            if name not in free or j in I:
                continue
            dc = diff(c, name)
            pos = sum(1 for i in I if i < j)
            K = I[:pos] + (j,) + I[pos:]
            term = dc if pos % 2 == 0 else mul(Const(-1), dc)
            out[K] = add(out[K], term) if K in out else term
    return DifferentialForm(a.frame, a.degree + 1, out)


def interior(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Contraction in the first slot: ``(i(X)a)(Y..) = a(X, Y..)``."""
    _require_same(X.frame, a.frame)
    if a.degree < 1:
        raise ValueError("interior product of a 0-form")
    out: Dict[Tuple[int, ...], Expr] = {}
    for I, c in a.terms.items():
        for s, idx in enumerate(I):
            xc = X.coeffs[idx]
            if xc == ZERO:
                continue
            K = I[:s] + I[s + 1 :]
            term = mul(xc, c) if s % 2 == 0 else mul(Const(-1), xc, c)
            out[K] = add(out[K], term) if K in out else term
    return DifferentialForm(a.frame, a.degree - 1, out)


def contract_k(Xs: Sequence[VectorField], a: DifferentialForm) -> DifferentialForm:
    """Iterated contraction ``a(X1, …, Xk, ·)``: ``X1`` fills the first slot."""
    if a.degree < len(Xs):
        raise ValueError(f"cannot contract {len(Xs)} fields into a {a.degree}-form")
    for X in Xs:
        a = interior(X, a)
    return a


def evaluate(a: DifferentialForm, slots: Sequence[Optional[VectorField]]) -> DifferentialForm:
    """Insert fields into the slots of ``a``; ``None`` marks a free slot.

    The free slots keep their relative order, so the result is the form
    ``(Y1, …) ↦ a(…, Y1, …, Y2, …)``.
    """
    if len(slots) != a.degree:
        raise ValueError("slot count must equal the form degree")
    filled = [i for i, s in enumerate(slots) if s is not None]
    free = [i for i, s in enumerate(slots) if s is None]
    sign = _sort_sign([*filled, *free]) if slots else 1
    out = contract_k([slots[i] for i in filled], a)
    return out if sign > 0 else -out


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    _require_same(X.frame, Y.frame)
    return VectorField(X.frame, [X(yc) - Y(xc) for xc, yc in zip(X.coeffs, Y.coeffs)])


def base_volume(frame: CoordinateFrame) -> DifferentialForm:
    """``dᵏt = dt1∧…∧dtk`` on a frame with base coordinates."""
    if not frame.has_t:
        raise FrameError(f"{frame.bundle} has no base coordinates")
    return DifferentialForm(frame, frame.k, {tuple(frame.base_indices()): ONE})


def base_codim1(frame: CoordinateFrame, A: int) -> DifferentialForm:
    """``d^{k-1}t_A = i(∂/∂tA) dᵏt``."""
    return interior(coordinate_field(frame, f"t{A}"), base_volume(frame))


# ---------------------------------------------------------------------------
# Maps


class SmoothMap:
    """Map given by one source-coordinate expression per target coordinate."""

    def __init__(self, source: CoordinateFrame, target: CoordinateFrame, exprs, name: str = ""):
        if isinstance(exprs, Mapping):
            missing = [c for c in target.coords if c not in exprs]
            if missing:
                raise FrameError(f"map does not define target coordinate {missing[0]}")
            vals = [exprs[c] for c in target.coords]
        else:
            vals = list(exprs)
        if len(vals) != target.dim:
            raise FrameError("expression count does not match target dimension")
        vals = tuple(normalize(as_expr(v)) for v in vals)
        for v in vals:
            source.check_expr(v, "map component")
        self.source = source
        self.target = target
        self.exprs = vals
        self.name = name
        self._dphi: Dict[int, DifferentialForm] = {}

    @classmethod
    def identity(cls, frame: CoordinateFrame, target: Optional[CoordinateFrame] = None, name="id"):
        return cls(frame, target or frame, [Var(c) for c in (target or frame).coords], name)

    def __getitem__(self, name: str) -> Expr:
        return self.exprs[self.target.index_of(name)]

    def as_dict(self) -> Dict[str, Expr]:
        return dict(zip(self.target.coords, self.exprs))

    def mapping(self) -> Dict[str, Expr]:
        return self.as_dict()

    def differential(self, j: int) -> DifferentialForm:
        if j not in self._dphi:
            self._dphi[j] = d(DifferentialForm.scalar(self.source, self.exprs[j]))
        return self._dphi[j]

    def compose(self, inner: "SmoothMap") -> "SmoothMap":
        """``self ∘ inner``."""
        _require_same(inner.target, self.source)
        m = inner.as_dict()
        return SmoothMap(inner.source, self.target, [subs(e, m) for e in self.exprs], f"{self.name}∘{inner.name}")

    def pull_function(self, f) -> Expr:
        f = as_expr(f)
        self.target.check_expr(f)
        return normalize(subs(f, self.as_dict()))

    def render(self) -> str:
        return "\n".join(f"{c} = {to_str(e)}" for c, e in zip(self.target.coords, self.exprs))

    def __repr__(self):
        return f"SmoothMap({self.name or '?'}: {self.source.bundle} -> {self.target.bundle})"


def pullback(phi: SmoothMap, a: DifferentialForm) -> DifferentialForm:
    _require_same(phi.target, a.frame)
    mapping = phi.as_dict()
    src = phi.source
    total = DifferentialForm.zero(src, a.degree)
    acc: Dict[Tuple[int, ...], Expr] = {}
    for I, c in a.terms.items():
        piece = DifferentialForm.scalar(src, subs(c, mapping))
        for j in I:
            piece = wedge(piece, phi.differential(j))
            if piece.is_zero():
                break
        for K, v in piece.terms.items():
            acc[K] = add(acc[K], v) if K in acc else v
    if acc:
        total = DifferentialForm(src, a.degree, acc)
    return total


# ---------------------------------------------------------------------------
# (1,1)-tensors


class OneOneTensor:
    """Sparse matrix ``M[target][source]``: ``S(∂_source) = Σ M[target][source] ∂_target``."""

    def __init__(self, frame: CoordinateFrame, entries: Mapping[Tuple[str, str], object]):
        self.frame = frame
        self.entries: Dict[Tuple[int, int], Expr] = {}
        for (tgt, src), v in entries.items():
            v = normalize(as_expr(v))
            if v != ZERO:
                self.entries[(frame.index_of(tgt), frame.index_of(src))] = v

    def apply(self, X: VectorField) -> VectorField:
        _require_same(self.frame, X.frame)
        out = [ZERO] * self.frame.dim
        for (t, s), v in self.entries.items():
            out[t] = out[t] + v * X.coeffs[s]
        return VectorField(self.frame, out)

    def compose(self, other: "OneOneTensor") -> "OneOneTensor":
        """``self ∘ other``."""
        _require_same(self.frame, other.frame)
        acc: Dict[Tuple[int, int], Expr] = {}
        for (t, m), v in self.entries.items():
            for (m2, s), w in other.entries.items():
                if m == m2:
                    acc[(t, s)] = acc.get((t, s), ZERO) + v * w
        c = self.frame.coords
        return OneOneTensor(self.frame, {(c[t], c[s]): v for (t, s), v in acc.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def render(self) -> str:
        c = self.frame.coords
        terms = [(v, f"∂/∂{c[t]}⊗d{c[s]}") for (t, s), v in sorted(self.entries.items())]
        return _render_terms(terms)


def apply_tensor(S: OneOneTensor, eta: DifferentialForm) -> DifferentialForm:
    """Transpose action ``η∘S`` on a 1-form."""
    _require_same(S.frame, eta.frame)
    if eta.degree != 1:
        raise ValueError("apply_tensor needs a 1-form")
    acc: Dict[Tuple[int, ...], Expr] = {}
    for (t, s), v in S.entries.items():
        c = eta.terms.get((t,))
        if c is None:
            continue
        acc[(s,)] = add(acc[(s,)], mul(v, c)) if (s,) in acc else mul(v, c)
    return DifferentialForm(S.frame, 1, acc)
