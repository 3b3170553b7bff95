"""Independent reference renderings of the Darboux forms.

Strings are produced from the coordinate formulas directly: each term is a
coefficient times a wedge of differentials, which is sorted into chart order
with an inversion count.  No geofield form arithmetic is used.
"""


def chart(k, n, fibre=True, base=False, affine=False):
    names = [f"q{i}" for i in range(1, n + 1)]
    if fibre:
        names += [f"p{A}_{i}" for A in range(1, k + 1) for i in range(1, n + 1)]
    if base:
        names += [f"t{A}" for A in range(1, k + 1)]
    if affine:
        names.append("p")
    return names


def _normal_order(factors, order):
    pos = [order.index(f) for f in factors]
    inv = sum(1 for i in range(len(pos)) for j in range(i + 1, len(pos)) if pos[i] > pos[j])
    return (-1) ** inv, sorted(factors, key=order.index)


def render(terms, order):
    """``terms``: list of (sign, coefficient or None, [coordinate names])."""
    out = []
    for sign, coef, factors in terms:
        s, factors = _normal_order(factors, order)
        sign *= s
        body = "∧".join("d" + f for f in factors)
        piece = body if coef is None else f"{coef} {body}"
        if not out:
            out.append(piece if sign > 0 else "-" + piece)
        else:
            out.append((" + " if sign > 0 else " - ") + piece)
    return "".join(out)


def codim1(k, A):
    """``d^{k-1}t_A = (-1)^{A-1} dt1∧..^A..∧dtk`` as (sign, factors)."""
    return (-1) ** (A - 1), [f"t{B}" for B in range(1, k + 1) if B != A]


def theta_A(k, n, A, order):
    return render([(1, f"p{A}_{i}", [f"q{i}"]) for i in range(1, n + 1)], order)


def omega_A(k, n, A, order):
    return render([(1, None, [f"q{i}", f"p{A}_{i}"]) for i in range(1, n + 1)], order)


def eta_A(k, n, A, order):
    return render([(1, None, [f"t{A}"])], order)


def ms_theta(k, n):
    order = chart(k, n, base=True, affine=True)
    terms = []
    for A in range(1, k + 1):
        s, base = codim1(k, A)
        terms += [(s, f"p{A}_{i}", [f"q{i}", *base]) for i in range(1, n + 1)]
    terms.append((1, "p", [f"t{B}" for B in range(1, k + 1)]))
    return render(terms, order)


def ms_omega(k, n):
    order = chart(k, n, base=True, affine=True)
    terms = []
    for A in range(1, k + 1):
        s, base = codim1(k, A)
        terms += [(s, None, [f"q{i}", f"p{A}_{i}", *base]) for i in range(1, n + 1)]
    terms.append((-1, None, ["p", *[f"t{B}" for B in range(1, k + 1)]]))
    return render(terms, order)


def golden(k, n):
    """Every canonical form for one ``(k, n)``, keyed by structure name."""
    ks = chart(k, n)
    kc = chart(k, n, base=True)
    out = {}
    for A in range(1, k + 1):
        out[f"ksym.theta{A}"] = theta_A(k, n, A, ks)
        out[f"ksym.omega{A}"] = omega_A(k, n, A, ks)
        out[f"kcosym.eta{A}"] = eta_A(k, n, A, kc)
        out[f"kcosym.theta{A}"] = theta_A(k, n, A, kc)
        out[f"kcosym.omega{A}"] = omega_A(k, n, A, kc)
    out["ms.Theta"] = ms_theta(k, n)
    out["ms.Omega"] = ms_omega(k, n)
    return out


def rendered(k, n):
    """The same keys rendered by geofield."""
    from geofield.canonical import canonical_kcosymplectic, canonical_ksymplectic, canonical_multisymplectic

    s = canonical_ksymplectic(k, n)
    c = canonical_kcosymplectic(k, n)
    m = canonical_multisymplectic(k, n)
    out = {}
    for A in range(1, k + 1):
        out[f"ksym.theta{A}"] = s.theta[A - 1].render()
        out[f"ksym.omega{A}"] = s.omega[A - 1].render()
        out[f"kcosym.eta{A}"] = c.eta[A - 1].render()
        out[f"kcosym.theta{A}"] = c.theta[A - 1].render()
        out[f"kcosym.omega{A}"] = c.omega[A - 1].render()
    out["ms.Theta"] = m.Theta.render()
    out["ms.Omega"] = m.Omega.render()
    return out
