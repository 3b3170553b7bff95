"""Minimal symbolic expressions over named real coordinates.

Expressions are immutable trees built from rational constants, variables,
sums, products, integer powers and the elementary functions ``sin``,
``cos``, ``exp`` and ``ln``.  :func:`normalize` maps an expression to a
canonical expanded form in which sums of monomials over *atoms* (variables,
function applications and reciprocals of irreducible sums) are collected
with exact rational coefficients.  Function atoms are opaque: no
trigonometric or logarithmic identities are applied.
"""

from __future__ import annotations

import enum
import math
import os
import random
import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Tuple, Union

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Add",
    "Mul",
    "Pow",
    "Func",
    "FUNCTIONS",
    "ParseError",
    "EvalError",
    "Verdict",
    "parse",
    "diff",
    "normalize",
    "evaluate",
    "evaluate_exact",
    "NotRational",
    "equal",
    "is_zero",
    "subs",
    "free_vars",
    "to_str",
    "as_expr",
    "sym",
    "lambdify",
    "default_seed",
    "natural_key",
]

FUNCTIONS = ("sin", "cos", "exp", "ln")

Number = Union[int, Fraction]


class ParseError(ValueError):
    """Malformed expression text; ``offset`` is the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class EvalError(ArithmeticError):
    pass


class Verdict(str, enum.Enum):
    EQUAL = "Equal"
    PROBABLY_EQUAL = "ProbablyEqual"
    NOT_EQUAL = "NotEqual"


def natural_key(name: str):
    """Sort key treating digit runs numerically, so ``q2 < q10``."""
    return tuple(int(tok) if tok.isdigit() else tok for tok in re.findall(r"\d+|\D+", name))


# ---------------------------------------------------------------------------
# Tree nodes


class Expr:
    __slots__ = ("_hash", "_free")

    def _key(self):  # pragma: no cover - overridden
        raise NotImplementedError

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr) or self._hash != other._hash:
            return False
        return self._key() == other._key()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return f"Expr({to_str(self)!r})"

    def __str__(self):
        return to_str(self)

    # arithmetic builds unsimplified trees with trivial folding only
    def __add__(self, other):
        if not _coercible(other):
            return NotImplemented
        return _add(self, as_expr(other))

    def __radd__(self, other):
        if not _coercible(other):
            return NotImplemented
        return _add(as_expr(other), self)

    def __sub__(self, other):
        if not _coercible(other):
            return NotImplemented
        return _add(self, _neg(as_expr(other)))

    def __rsub__(self, other):
        if not _coercible(other):
            return NotImplemented
        return _add(as_expr(other), _neg(self))

    def __mul__(self, other):
        if not _coercible(other):
            return NotImplemented
        return _mul(self, as_expr(other))

    def __rmul__(self, other):
        if not _coercible(other):
            return NotImplemented
        return _mul(as_expr(other), self)

    def __truediv__(self, other):
        if not _coercible(other):
            return NotImplemented
        return _mul(self, _pow(as_expr(other), -1))

    def __rtruediv__(self, other):
        if not _coercible(other):
            return NotImplemented
        return _mul(as_expr(other), _pow(self, -1))

    def __neg__(self):
        return _neg(self)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer exponents are supported")
        return _pow(self, n)

    @property
    def free(self) -> frozenset:
        return self._free


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Number):
        self.value = Fraction(value)
        self._hash = hash(("C", self.value))
        self._free = frozenset()

    def _key(self):
        return ("C", self.value)


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("V", name))
        self._free = frozenset((name,))

    def _key(self):
        return ("V", self.name)


class Add(Expr):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[Expr]):
        self.args = tuple(args)
        self._hash = hash(("A", self.args))
        self._free = frozenset().union(*(a._free for a in self.args))

    def _key(self):
        return ("A", self.args)


class Mul(Expr):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[Expr]):
        self.args = tuple(args)
        self._hash = hash(("M", self.args))
        self._free = frozenset().union(*(a._free for a in self.args))

    def _key(self):
        return ("M", self.args)


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: int):
        self.base = base
        self.exp = int(exp)
        self._hash = hash(("P", base, self.exp))
        self._free = base._free

    def _key(self):
        return ("P", self.base, self.exp)


class Func(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        if name not in FUNCTIONS:
            raise ValueError(f"unknown function {name!r}")
        self.name = name
        self.arg = arg
        self._hash = hash(("F", name, arg))
        self._free = arg._free

    def _key(self):
        return ("F", self.name, self.arg)


ZERO = Const(0)
ONE = Const(1)


def _coercible(x) -> bool:
    return isinstance(x, (Expr, int, Fraction, float, str))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(x)
    if isinstance(x, str):
        return parse(x)
    if isinstance(x, float):
        return Const(Fraction(x).limit_denominator(10**12))
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def sym(name: str) -> Var:
    return Var(name)


def _is_const(e: Expr, value=None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


def _add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    left = a.args if isinstance(a, Add) else (a,)
    right = b.args if isinstance(b, Add) else (b,)
    return Add(left + right)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    return _mul(Const(-1), a)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    left = a.args if isinstance(a, Mul) else (a,)
    right = b.args if isinstance(b, Mul) else (b,)
    return Mul(left + right)


def _pow(a: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const):
        if a.value == 0 and n < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return Const(a.value**n)
    if isinstance(a, Pow):
        return Pow(a.base, a.exp * n)
    return Pow(a, n)


def add(*terms) -> Expr:
    out: Expr = ZERO
    for t in terms:
        out = _add(out, as_expr(t))
    return out


def mul(*factors) -> Expr:
    out: Expr = ONE
    for f in factors:
        out = _mul(out, as_expr(f))
    return out


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            # skip whitespace to report the offending character itself
            bad = pos
            while bad < len(text) and text[bad].isspace():
                bad += 1
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}" if kind != "end" else "unexpected end of input", off)

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", off)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                e = _add(e, rhs if val == "+" else _neg(rhs))
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                off = self.peek()[2]
                rhs = self.unary()
                if val == "*":
                    e = _mul(e, rhs)
                elif isinstance(rhs, Const):
                    e = _mul(e, _inv_const(rhs, off))
                else:
                    e = _mul(e, _pow(rhs, -1))
            else:
                return e

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return inner if val == "+" else _neg(inner)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            n = self.exponent()
            if isinstance(base, Const) and base.value == 0 and n < 0:
                raise ParseError("zero raised to a negative power", self.tokens[self.i - 1][2])
            return _pow(base, n)
        return base

    def exponent(self) -> int:
        kind, val, off = self.peek()
        sign = 1
        paren = False
        if kind == "op" and val == "(":
            self.take()
            paren = True
            kind, val, off = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
            kind, val, off = self.peek()
        if kind != "num" or "." in val:
            raise ParseError("expected integer exponent" if kind != "end" else "unexpected end of input", off)
        self.take()
        if paren:
            self.expect_op(")")
        return sign * int(val)

    def atom(self) -> Expr:
        kind, val, off = self.take()
        if kind == "num":
            return Const(Fraction(val))
        if kind == "id":
            nkind, nval, _ = self.peek()
            if nkind == "op" and nval == "(":
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", off)
                self.take()
                arg = self.expr()
                self.expect_op(")")
                return Func(val, arg)
            return Var(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == "end":
            raise ParseError("unexpected end of input", off)
        raise ParseError(f"unexpected token {val!r}", off)


def _inv_const(c: Const, offset: int) -> Expr:
    if c.value == 0:
        raise ParseError("division by literal zero", offset)
    return Const(1 / c.value)


def parse(text: str) -> Expr:
    """Parse expression text (see ``docs/grammar.ebnf``)."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Differentiation


def diff(e: Expr, var: str) -> Expr:
    """Exact partial derivative of ``e`` with respect to the variable ``var``."""
    if var not in e._free:
        return ZERO
    return _diff(e, var)


@lru_cache(maxsize=200_000)
def _diff(e: Expr, v: str) -> Expr:
    if v not in e._free:
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Add):
        return add(*(_diff(a, v) for a in e.args))
    if isinstance(e, Mul):
        terms = []
        for i, a in enumerate(e.args):
            da = _diff(a, v)
            if _is_const(da, 0):
                continue
            terms.append(mul(*e.args[:i], da, *e.args[i + 1 :]))
        return add(*terms)
    if isinstance(e, Pow):
        return mul(Const(e.exp), _pow(e.base, e.exp - 1), _diff(e.base, v))
    if isinstance(e, Func):
        du = _diff(e.arg, v)
        u = e.arg
        if e.name == "sin":
            return mul(Func("cos", u), du)
        if e.name == "cos":
            return mul(Const(-1), Func("sin", u), du)
        if e.name == "exp":
            return mul(e, du)
        return mul(du, _pow(u, -1))
    raise TypeError(type(e))  # pragma: no cover


# ---------------------------------------------------------------------------
# Canonical form
#
# A polynomial is a dict  monomial -> Fraction  with monomial a sorted tuple
# of (atom, exponent) pairs.  Atoms are Var, Func (with normalized argument)
# or Add (a normalized, content-free sum; only ever with negative exponent).

Monomial = Tuple[Tuple[Expr, int], ...]
Poly = Dict[Monomial, Fraction]


def _atom_key(a: Expr):
    if isinstance(a, Var):
        return (0, natural_key(a.name))
    if isinstance(a, Func):
        return (1, a.name, _str_key(a.arg))
    return (2, _str_key(a))


@lru_cache(maxsize=100_000)
def _str_key(e: Expr) -> str:
    return to_str(e)


def _mono_key(m: Monomial):
    return tuple((_atom_key(a), x) for a, x in m)


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    acc: Dict[Expr, int] = {}
    for a, x in m1:
        acc[a] = acc.get(a, 0) + x
    for a, x in m2:
        acc[a] = acc.get(a, 0) + x
    return tuple(sorted(((a, x) for a, x in acc.items() if x != 0), key=lambda ax: _atom_key(ax[0])))


def _poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, 0) + c
        if s == 0:
            out.pop(m, None)
        else:
            out[m] = s
    return out


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            s = out.get(m, 0) + c1 * c2
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
    return out


def _poly_pow(p: Poly, n: int) -> Poly:
    if n == 0:
        return {(): Fraction(1)}
    if n < 0:
        if not p:
            raise ZeroDivisionError("division by zero in normalize")
        if len(p) == 1:
            (m, c), = p.items()
            return {tuple((a, x * n) for a, x in m): c**n}
        # content-free reciprocal atom
        lead = min(p, key=_mono_key)
        c = p[lead]
        scaled = {m: v / c for m, v in p.items()}
        atom = _poly_to_expr(scaled)
        return {((atom, n),): c**n}
    result: Poly = {(): Fraction(1)}
    base = p
    while n:
        if n & 1:
            result = _poly_mul(result, base)
        n >>= 1
        if n:
            base = _poly_mul(base, base)
    return result


@lru_cache(maxsize=200_000)
def _to_poly_cached(e: Expr):
    return tuple(_to_poly(e).items())


def _poly_of(e: Expr) -> Poly:
    return dict(_to_poly_cached(e))


def _to_poly(e: Expr) -> Poly:
    if isinstance(e, Const):
        return {(): e.value} if e.value != 0 else {}
    if isinstance(e, Var):
        return {((e, 1),): Fraction(1)}
    if isinstance(e, Add):
        out: Poly = {}
        for a in e.args:
            out = _poly_add(out, _poly_of(a))
        return out
    if isinstance(e, Mul):
        out = {(): Fraction(1)}
        for a in e.args:
            out = _poly_mul(out, _poly_of(a))
            if not out:
                return {}
        return out
    if isinstance(e, Pow):
        return _poly_pow(_poly_of(e.base), e.exp)
    if isinstance(e, Func):
        arg = normalize(e.arg)
        if isinstance(arg, Const):
            folded = _fold_func(e.name, arg.value)
            if folded is not None:
                return {(): folded} if folded != 0 else {}
        return {((Func(e.name, arg), 1),): Fraction(1)}
    raise TypeError(type(e))  # pragma: no cover


def _fold_func(name: str, value: Fraction):
    if value == 0:
        return {"sin": Fraction(0), "cos": Fraction(1), "exp": Fraction(1)}.get(name)
    if name == "ln" and value == 1:
        return Fraction(0)
    return None


def _poly_to_expr(p: Poly) -> Expr:
    if not p:
        return ZERO
    terms = []
    for m in sorted(p, key=_mono_key):
        c = p[m]
        factors = [Pow(a, x) if x != 1 else a for a, x in m]
        if c != 1 or not factors:
            factors.insert(0, Const(c))
        terms.append(factors[0] if len(factors) == 1 else Mul(factors))
    return terms[0] if len(terms) == 1 else Add(terms)


@lru_cache(maxsize=200_000)
def normalize(e: Expr) -> Expr:
    """Canonical expanded form; idempotent."""
    return _poly_to_expr(_poly_of(e))


def is_normal_zero(e: Expr) -> bool:
    return isinstance(normalize(e), Const) and normalize(e).value == 0


# ---------------------------------------------------------------------------
# Substitution and evaluation


def free_vars(e: Expr) -> frozenset:
    return e._free


def subs(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions (simultaneously)."""
    if not mapping or not (e._free & mapping.keys()):
        return e
    return _subs(e, mapping)


def _subs(e: Expr, mapping) -> Expr:
    if not (e._free & mapping.keys()):
        return e
    if isinstance(e, Var):
        return as_expr(mapping[e.name])
    if isinstance(e, Add):
        return add(*(_subs(a, mapping) for a in e.args))
    if isinstance(e, Mul):
        return mul(*(_subs(a, mapping) for a in e.args))
    if isinstance(e, Pow):
        return _pow(_subs(e.base, mapping), e.exp)
    if isinstance(e, Func):
        return Func(e.name, _subs(e.arg, mapping))
    raise TypeError(type(e))  # pragma: no cover


def evaluate(e: Expr, assignment: Mapping[str, float]) -> float:
    """IEEE double evaluation; raises :class:`EvalError` on singular input."""
    missing = e._free - assignment.keys()
    if missing:
        raise KeyError(f"unassigned variables: {sorted(missing, key=natural_key)}")
    return _eval(e, assignment)


def _eval(e: Expr, a) -> float:
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Var):
        return float(a[e.name])
    if isinstance(e, Add):
        return math.fsum(_eval(x, a) for x in e.args)
    if isinstance(e, Mul):
        out = 1.0
        for x in e.args:
            out *= _eval(x, a)
        return out
    if isinstance(e, Pow):
        b = _eval(e.base, a)
        if e.exp < 0 and b == 0.0:
            raise EvalError("division by zero")
        try:
            return b**e.exp
        except OverflowError as exc:
            raise EvalError(str(exc)) from exc
    if isinstance(e, Func):
        u = _eval(e.arg, a)
        if e.name == "sin":
            return math.sin(u)
        if e.name == "cos":
            return math.cos(u)
        if e.name == "exp":
            try:
                return math.exp(u)
            except OverflowError as exc:
                raise EvalError(str(exc)) from exc
        if u <= 0.0:
            raise EvalError("ln of a non-positive argument")
        return math.log(u)
    raise TypeError(type(e))  # pragma: no cover


class NotRational(ArithmeticError):
    """Raised by :func:`evaluate_exact` when a transcendental value appears."""


def evaluate_exact(e: Expr, assignment: Mapping[str, Fraction]) -> Fraction:
    """Exact rational evaluation; raises :class:`NotRational` on ``sin(1)`` etc."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return Fraction(assignment[e.name])
    if isinstance(e, Add):
        return sum((evaluate_exact(x, assignment) for x in e.args), Fraction(0))
    if isinstance(e, Mul):
        out = Fraction(1)
        for x in e.args:
            out *= evaluate_exact(x, assignment)
            if out == 0:
                return out
        return out
    if isinstance(e, Pow):
        b = evaluate_exact(e.base, assignment)
        if b == 0 and e.exp < 0:
            raise EvalError("division by zero")
        return b**e.exp
    u = evaluate_exact(e.arg, assignment)
    folded = _fold_func(e.name, u)
    if folded is None:
        raise NotRational(f"{e.name}({u}) is not rational")
    return folded


def lambdify(e: Expr, names):
    """Compile ``e`` to a numpy-vectorised callable of positional arrays ``names``."""
    import numpy as np

    names = list(names)
    missing = e._free - set(names)
    if missing:
        raise KeyError(f"unassigned variables: {sorted(missing, key=natural_key)}")
    args = [f"_a{i}" for i in range(len(names))]
    env = dict(zip(names, args))
    src = f"lambda {', '.join(args)}: {_np_src(e, env)}"
    return eval(src, {"np": np, "_F": float})  # noqa: S307 - generated from a trusted tree


def _np_src(e: Expr, env) -> str:
    if isinstance(e, Const):
        return repr(float(e.value))
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Add):
        return "(" + " + ".join(_np_src(x, env) for x in e.args) + ")"
    if isinstance(e, Mul):
        return "(" + " * ".join(_np_src(x, env) for x in e.args) + ")"
    if isinstance(e, Pow):
        if e.exp < 0:
            return f"(1.0 / ({_np_src(e.base, env)}) ** {-e.exp})"
        return f"(({_np_src(e.base, env)}) ** {e.exp})"
    fname = {"sin": "np.sin", "cos": "np.cos", "exp": "np.exp", "ln": "np.log"}[e.name]
    return f"{fname}({_np_src(e.arg, env)})"


# ---------------------------------------------------------------------------
# Equality


def default_seed() -> int:
    """Sampling seed; the ``GEOFIELD_SEED`` environment variable overrides it."""
    raw = os.environ.get("GEOFIELD_SEED")
    return int(raw) if raw not in (None, "") else 20240917


def equal(e1, e2, *, samples: int = 32, rtol: float = 1e-9, seed=None) -> Verdict:
    """Decide ``e1 == e2``: structurally after normalization, else by sampling."""
    e1, e2 = as_expr(e1), as_expr(e2)
    delta = normalize(_add(e1, _neg(e2)))
    if _is_const(delta, 0):
        return Verdict.EQUAL
    if isinstance(delta, Const):
        return Verdict.NOT_EQUAL
    names = sorted(e1._free | e2._free, key=natural_key)
    rng = random.Random(default_seed() if seed is None else seed)
    good = attempts = 0
    while good < samples:
        if attempts >= 256:
            break
        attempts += 1
        point = {v: rng.uniform(-2.0, 2.0) for v in names}
        try:
            a, b = _eval(e1, point), _eval(e2, point)
        except (EvalError, ZeroDivisionError, OverflowError):
            continue
        if not (math.isfinite(a) and math.isfinite(b)):
            continue
        if abs(a - b) > rtol * max(1.0, abs(a), abs(b)):
            return Verdict.NOT_EQUAL
        good += 1
    if good == 0:
        return Verdict.NOT_EQUAL
    return Verdict.PROBABLY_EQUAL


def is_zero(e) -> bool:
    return equal(e, ZERO) is not Verdict.NOT_EQUAL


# ---------------------------------------------------------------------------
# Printing


def _fmt_const(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _factor_str(a: Expr, x: int) -> str:
    base = _atom_str(a)
    return base if x == 1 else f"{base}^{x}"


def _atom_str(a: Expr) -> str:
    if isinstance(a, Var):
        return a.name
    if isinstance(a, Func):
        return f"{a.name}({to_str(a.arg)})"
    if isinstance(a, Const):
        s = _fmt_const(a.value)
        return f"({s})" if ("/" in s or a.value < 0) else s
    return f"({to_str(a)})"


def _term_parts(e: Expr):
    """Split a product into (sign, numerator factors, denominator factors)."""
    coeff = Fraction(1)
    num, den = [], []
    factors = e.args if isinstance(e, Mul) else (e,)
    for f in factors:
        if isinstance(f, Const):
            coeff *= f.value
        elif isinstance(f, Pow) and f.exp < 0:
            den.append(_factor_str(f.base, -f.exp))
        elif isinstance(f, Pow):
            num.append(_factor_str(f.base, f.exp))
        else:
            num.append(_atom_str(f))
    sign = -1 if coeff < 0 else 1
    coeff = abs(coeff)
    if coeff.numerator != 1 or not num:
        num.insert(0, str(coeff.numerator))
    if coeff.denominator != 1:
        den.insert(0, str(coeff.denominator))
    return sign, num, den


def _term_str(e: Expr):
    sign, num, den = _term_parts(e)
    s = "*".join(num)
    if den:
        s += "/" + (den[0] if len(den) == 1 else "(" + "*".join(den) + ")")
    return sign, s


def to_str(e: Expr) -> str:
    """Deterministic text that :func:`parse` reads back."""
    if isinstance(e, Add):
        out = ""
        for i, t in enumerate(e.args):
            sign, s = _term_str(t) if not isinstance(t, Add) else (1, f"({to_str(t)})")
            if i == 0:
                out = s if sign > 0 else f"-{s}"
            else:
                out += (" + " if sign > 0 else " - ") + s
        return out
    if isinstance(e, Const):
        return _fmt_const(e.value)
    sign, s = _term_str(e)
    return s if sign > 0 else f"-{s}"
