"""Acceptance criteria 1-10, one test each.

Every test records a ``PASS``/``FAIL`` line with the measured quantities;
the lines are printed at the end of the pytest run.
"""

import itertools
import random
import time

import numpy as np
import pytest

from geofield.bridges import (
    autonomize,
    certify_equation_equivalence,
    extract_kcosymplectic,
    extract_ksymplectic,
    extract_ksymplectic_slots,
    kcosym_from_hamilton_cartan,
    hamilton_cartan_from_kcosym,
    kcosym_from_poincare_cartan,
    poincare_cartan_from_kcosym,
    rebuild_ms_from_kcosymplectic,
    rebuild_ms_from_ksymplectic,
    suspend,
    theorem_suite,
)
from geofield.canonical import canonical_kcosymplectic, canonical_ksymplectic, canonical_multisymplectic
from geofield.forms import DifferentialForm, d, interior, jet_frame, kcosym_frame, multimomentum_frame, pullback
from geofield.hamiltonian import FieldTheory, SymbolicSection, Variant, geometric_residual, hdw_equations, solve_kvector
from geofield.lagrangian import (
    lagrangian_forms,
    lagrangian_section_equations,
    legendre,
    prolong,
    regularity,
    solve_lagrangian_kvector,
    sopde_forced,
    verify_euler_lagrange,
)
from geofield.multisym import extended_restricted_legendre, hamilton_cartan_forms, poincare_cartan_forms
from geofield.solver import GridSpec, grid_residual, integrate, sample_section, section_residual_on_grid
from geofield.symexpr import Const, Var, evaluate, parse

import conftest
import oracles
from conftest import HAMILTONIANS, LAGRANGIANS, REGULAR_LAGRANGIANS, TIME_DEPENDENT_HAMILTONIANS, TIME_DEPENDENT_LAGRANGIANS

SEED = 20240917


def record(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    conftest.ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------


def test_criterion_01_canonical_goldens():
    start = time.perf_counter()
    mismatches = []
    count = 0
    for k, n in itertools.product((1, 2, 3), repeat=2):
        got, want = oracles.rendered(k, n), oracles.golden(k, n)
        count += len(want)
        mismatches += [(k, n, key) for key in want if got.get(key) != want[key]]
    elapsed = time.perf_counter() - start
    record(1, not mismatches and elapsed < 1.0, f"{count} forms over (k,n) in {{1,2,3}}^2, {len(mismatches)} mismatches, {elapsed:.3f} s (< 1 s)")


def _random_form(rng, frame):
    degree = rng.randint(0, min(3, frame.dim - 2))
    terms = {}
    for _ in range(rng.randint(1, 3)):
        idx = tuple(sorted(rng.sample(range(frame.dim), degree)))
        coef = Const(rng.randint(-3, 3))
        for _ in range(rng.randint(1, 3)):
            v = Var(rng.choice(frame.coords))
            f = rng.choice(["x", "x^2", "sin", "exp", "x*y"])
            piece = {
                "x": v,
                "x^2": v**2,
                "sin": parse(f"sin({v})"),
                "exp": parse(f"exp({v})"),
                "x*y": v * Var(rng.choice(frame.coords)),
            }[f]
            coef = coef + piece if rng.random() < 0.5 else coef * piece
        terms[idx] = coef
    return DifferentialForm(frame, degree, terms)


def test_criterion_02_identity_suite():
    start = time.perf_counter()
    rng = random.Random(SEED)
    frames = [kcosym_frame(2, 1), jet_frame(2, 2), multimomentum_frame(3, 1)]
    dd_fail = sum(1 for i in range(1000) if not d(d(_random_form(rng, frames[i % 3]))).is_zero())

    reeb_ok = True
    for k, n in [(1, 1), (2, 2), (3, 1)]:
        c = canonical_kcosymplectic(k, n)
        for A, R in enumerate(c.reeb):
            reeb_ok &= all(interior(R, e).scalar_value() == Const(int(A == B)) for B, e in enumerate(c.eta))
            reeb_ok &= all(interior(R, w).is_zero() for w in c.omega)

    ksym_ok = True
    for L in LAGRANGIANS.values():
        ks, lf = canonical_ksymplectic(L.k, L.n), lagrangian_forms(L)
        ksym_ok &= all(pullback(legendre(L), a) == b for a, b in zip(ks.theta, lf.theta))
    kcos_ok = ext_ok = True
    cosym = [L.with_variant(Variant.KCosymLag) for L in LAGRANGIANS.values()] + list(TIME_DEPENDENT_LAGRANGIANS.values())
    for L in cosym:
        kc, lf = canonical_kcosymplectic(L.k, L.n), lagrangian_forms(L)
        kcos_ok &= all(pullback(legendre(L), a) == b for a, b in zip(kc.theta, lf.theta))
        ms, pc, pair = canonical_multisymplectic(L.k, L.n), poincare_cartan_forms(L), extended_restricted_legendre(L)
        ext_ok &= pullback(pair.extended, ms.Theta) == pc.Theta and pullback(pair.extended, ms.Omega) == pc.Omega
    elapsed = time.perf_counter() - start
    ok = dd_fail == 0 and reeb_ok and ksym_ok and kcos_ok and ext_ok and elapsed < 10
    record(
        2,
        ok,
        f"d∘d=0 failures {dd_fail}/1000, Reeb {reeb_ok}, FL*theta {ksym_ok} ({len(LAGRANGIANS)} L), "
        f"FL*Theta {kcos_ok} ({len(cosym)} L), extended FL pullbacks {ext_ok}, {elapsed:.2f} s (< 10 s)",
    )


def test_criterion_03_bridge_roundtrips():
    fails = []
    for k, n in itertools.product((1, 2, 3), (1, 2)):
        ms, ks, kc = canonical_multisymplectic(k, n), canonical_ksymplectic(k, n), canonical_kcosymplectic(k, n)
        th, om = extract_ksymplectic(ms.Theta, ms.Omega)
        if (th, om) != (ks.theta, ks.omega) or extract_ksymplectic_slots(ms.Theta, ms.Omega) != (ks.theta, ks.omega):
            fails.append(("ksym extract", k, n))
        rebuilt, alt = rebuild_ms_from_ksymplectic(ks.theta)
        if not (rebuilt.Theta == ms.Theta and rebuilt.Omega == ms.Omega and alt == ms.Omega):
            fails.append(("ksym rebuild", k, n))
        ext = extract_kcosymplectic(ms.Theta, ms.Omega)
        if not (ext.theta == kc.theta and ext.omega == kc.omega and ext.eta == kc.eta):
            fails.append(("kcosym extract", k, n))
        if ext.eta != ext.eta_alt:
            fails.append(("eta two ways", k, n))
        rebuilt, alt = rebuild_ms_from_kcosymplectic(ext.eta, ext.theta)
        if not (rebuilt.Theta == ms.Theta and rebuilt.Omega == ms.Omega and alt == ms.Omega):
            fails.append(("kcosym rebuild", k, n))
    systems = 0
    for H in list(HAMILTONIANS.values()) + list(TIME_DEPENDENT_HAMILTONIANS.values()):
        if H.k > 3 or H.n > 2:
            continue
        Hc = H.with_variant(Variant.KCosymHam)
        systems += 1
        hc, st = hamilton_cartan_forms(Hc), canonical_kcosymplectic(Hc.k, Hc.n)
        if kcosym_from_hamilton_cartan(Hc) != (st.theta, st.omega):
            fails.append(("Hamilton-Cartan extract", Hc.generator))
        rebuilt, alt = hamilton_cartan_from_kcosym(Hc)
        if not (rebuilt.Theta == hc.Theta and rebuilt.Omega == hc.Omega and alt == hc.Omega):
            fails.append(("Hamilton-Cartan rebuild", Hc.generator))
    for name, L in list(LAGRANGIANS.items()) + list(TIME_DEPENDENT_LAGRANGIANS.items()):
        Lc = L.with_variant(Variant.KCosymLag)
        systems += 1
        lf, pc = lagrangian_forms(Lc), poincare_cartan_forms(Lc)
        th, om = kcosym_from_poincare_cartan(Lc)
        if th != lf.theta or (name in LAGRANGIANS and om != lf.omega):
            fails.append(("Poincare-Cartan extract", name))
        rebuilt, alt = poincare_cartan_from_kcosym(Lc)
        if not (rebuilt.Theta == pc.Theta and rebuilt.Omega == pc.Omega and alt == pc.Omega):
            fails.append(("Poincare-Cartan rebuild", name))
    record(3, not fails, f"6 canonical (k,n) pairs + {systems} library systems, failures {fails or 'none'}")


def test_criterion_04_equivalence_certificates():
    systems = list(HAMILTONIANS.values()) + list(TIME_DEPENDENT_HAMILTONIANS.values()) + list(LAGRANGIANS.values()) + list(TIME_DEPENDENT_LAGRANGIANS.values())
    bad = []
    counts = {"Equivalent": 0, "NotEquivalent": 0}
    for sys in systems:
        report = theorem_suite(sys)
        for c in report["certificates"]:
            counts[c["result"]] += 1
            if c["status"] != "Pass":
                bad.append((str(sys.generator), c["theorem"]))
            if c["result"] == "NotEquivalent" and (c["witness"] is None or c["witness"]["residual"] == "0"):
                bad.append((str(sys.generator), "empty witness"))
    H = FieldTheory(Variant.KSymHam, 2, 1, parse("(p1_1^2 + p2_1^2)/2"))
    perturbed = FieldTheory(Variant.KSymHam, 2, 1, parse("(p1_1^2 + p2_1^2)/2 + q1"))
    cert = certify_equation_equivalence(hdw_equations(H), hdw_equations(perturbed))
    ok = not bad and cert.result == "NotEquivalent" and cert.witness["residual"] != "0"
    record(
        4,
        ok,
        f"{len(systems)} systems, {counts['Equivalent']} Equivalent + {counts['NotEquivalent']} expected NotEquivalent, "
        f"perturbed witness {cert.witness['label']}: {cert.witness['residual']}",
    )


def test_criterion_05_suspension():
    results = {name: geometric_residual(autonomize(H), suspend(solve_kvector(H))).is_zero() for name, H in HAMILTONIANS.items()}
    record(5, all(results.values()), f"symbolically zero for {sum(results.values())}/{len(results)} KSymHam systems")


def _oscillator(h, T=10.0, guard=True):
    X = solve_kvector(HAMILTONIANS["oscillator"])
    g = GridSpec((T,), (h,))
    sol = integrate(X, {"q1": 0.0, "p1_1": 1.0}, g, guard=guard)
    t = g.axes()[0]
    err = float(np.max(np.abs(sol["q1"] - np.sin(t))))
    energy = 0.5 * (sol["q1"] ** 2 + sol["p1_1"] ** 2)
    return err, float(np.max(np.abs(energy - energy[0])))


def test_criterion_06_oscillator():
    err, drift = _oscillator(1e-3)
    # at h = 1e-3 the global error is at roundoff level, so the order is
    # measured where truncation error dominates
    e1, _ = _oscillator(0.1, guard=False)
    e2, _ = _oscillator(0.05, guard=False)
    ratio = e1 / e2
    ok = err <= 1e-6 and drift <= 1e-6 and 12 <= ratio <= 20
    record(6, ok, f"max|q-sin t| = {err:.2e} (<= 1e-6), energy drift = {drift:.2e} (<= 1e-6), error ratio h=0.1/0.05 = {ratio:.2f} (in [12, 20])")


def test_criterion_07_laplace():
    H = HAMILTONIANS["laplace"]
    grid = GridSpec((1.0, 1.0), (1e-2, 1e-2))
    assert grid.counts == (101, 101)
    eqs = hdw_equations(H)
    good = SymbolicSection(2, {"q1": parse("t1^2 - t2^2"), "p1_1": parse("2*t1"), "p2_1": parse("-2*t2")})
    bad = SymbolicSection(2, {"q1": parse("t1^2"), "p1_1": parse("2*t1"), "p2_1": parse("0")})
    r_good = grid_residual(eqs, sample_section(good, grid))
    r_bad = grid_residual(eqs, sample_section(bad, grid))
    record(7, r_good <= 1e-8 and r_bad >= 1, f"harmonic residual {r_good:.1e} (<= 1e-8), q=t1^2 residual {r_bad:.3g} (>= 1)")


def test_criterion_08_wave():
    L = LAGRANGIANS["wave"]
    phi = SymbolicSection(2, {"q1": parse("sin(t1 - t2)")})
    rep = verify_euler_lagrange(L, phi)
    exact = rep.passed and all(r == Const(0) for r in rep.residuals)
    grid = GridSpec((1.0, 1.0), (1e-2, 1e-2))
    res = section_residual_on_grid(lagrangian_section_equations(L), prolong(phi), grid)
    record(8, exact and res <= 1e-8, f"EL residual exactly zero: {exact}, prolongation section residual on 101x101 grid {res:.1e} (<= 1e-8)")


def test_criterion_09_sopde():
    forced = {}
    for name, L in list(REGULAR_LAGRANGIANS.items()) + list(TIME_DEPENDENT_LAGRANGIANS.items()):
        assert regularity(L).regular
        G = solve_lagrangian_kvector(L)
        forced[name] = all(
            G[A - 1][f"q{i}"] == Var(f"v{A}_{i}") for A in range(1, L.k + 1) for i in range(1, L.n + 1)
        )
    singular = sopde_forced(LAGRANGIANS["singular"])
    ok = all(forced.values()) and not singular.forced
    record(9, ok, f"(Gamma_A)^i = v^i_A for {sum(forced.values())}/{len(forced)} regular L; singular L reports not forced: {singular.unforced}")


def test_criterion_10_determinism(tmp_path):
    outs = []
    for hashseed in ("1", "2"):
        env = {"GEOFIELD_SEED": "12345", "PYTHONHASHSEED": hashseed}
        outs.append(conftest.run_cli("verify", conftest.MODELS / "laplace.toml", "--theorems", env=env).stdout)
    record(10, outs[0] == outs[1] and len(outs[0]) > 0, f"two runs with GEOFIELD_SEED=12345 (different hash seeds): {len(outs[0])} bytes, identical {outs[0] == outs[1]}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
