import numpy as np
import pytest

from geofield.hamiltonian import SymbolicSection, hdw_equations, solve_kvector
from geofield.lagrangian import lagrangian_section_equations, prolong, solve_lagrangian_kvector
from geofield.solver import (
    GridSpec,
    IntegrationError,
    commutator_residual,
    grid_residual,
    integrate,
    sample_section,
    section_residual_on_grid,
)
from geofield.symexpr import parse

from conftest import HAMILTONIANS, LAGRANGIANS, theory


def oscillator_error(h, T=2.0):
    X = solve_kvector(HAMILTONIANS["oscillator"])
    sol = integrate(X, {"q1": 0.0, "p1_1": 1.0}, GridSpec((T,), (h,)), guard=False)
    t = GridSpec((T,), (h,)).axes()[0]
    return np.max(np.abs(sol["q1"] - np.sin(t)))


def test_grid_counts_and_axes():
    g = GridSpec((1.0, 0.5), (0.25, 0.1))
    assert g.counts == (5, 6)
    assert np.allclose(g.axes()[1], np.linspace(0, 0.5, 6))
    with pytest.raises(ValueError):
        GridSpec((1.0,), (0.0,))


def test_rk4_fourth_order():
    ratio = oscillator_error(0.1) / oscillator_error(0.05)
    assert 14 < ratio < 18


def test_oscillator_accuracy_short():
    assert oscillator_error(0.01) < 1e-8


def test_laplace_linear_solution_from_data():
    X = solve_kvector(HAMILTONIANS["laplace"])
    sol = integrate(X, {"q1": 0.0, "p1_1": 1.0, "p2_1": 2.0}, GridSpec((1.0, 1.0), (0.1, 0.1)))
    t1, t2 = GridSpec((1.0, 1.0), (0.1, 0.1)).mesh()
    assert sol.integral_section
    assert np.max(np.abs(sol["q1"] - (t1 + 2 * t2))) < 1e-12


def test_axis_order_irrelevant_when_commuting():
    X = solve_kvector(HAMILTONIANS["laplace"])
    g = GridSpec((0.5, 0.5), (0.05, 0.05))
    a = integrate(X, {"q1": 0.1, "p1_1": 0.3, "p2_1": -0.2}, g, axis_order=[1, 2])
    b = integrate(X, {"q1": 0.1, "p1_1": 0.3, "p2_1": -0.2}, g, axis_order=[2, 1])
    assert np.max(np.abs(a.values - b.values)) < 1e-12


def test_non_commuting_fields_flagged():
    X = solve_kvector(HAMILTONIANS["klein_gordon"])
    region = {c: (-1.0, 1.0) for c in X.frame.coords}
    assert commutator_residual(X, region, 32, seed=3) > 1e-3
    sol = integrate(X, {"q1": 1.0, "p1_1": 0.0, "p2_1": 0.0}, GridSpec((0.5, 0.5), (0.1, 0.1)))
    assert not sol.integral_section and sol.notes


def test_missing_initial_value():
    X = solve_kvector(HAMILTONIANS["oscillator"])
    with pytest.raises(ValueError, match="p1_1"):
        integrate(X, {"q1": 0.0}, GridSpec((1.0,), (0.1,)))


def test_blowup_raises():
    X = solve_kvector(theory("KSymHam", 1, 1, "p1_1*q1^2"))
    with pytest.raises(IntegrationError):
        integrate(X, {"q1": 1.0, "p1_1": 1.0}, GridSpec((2.0,), (0.01,)))


def test_lagrangian_integration_matches_exact():
    L = LAGRANGIANS["oscillator"]
    G = solve_lagrangian_kvector(L)
    g = GridSpec((3.0,), (0.01,))
    sol = integrate(G, {"q1": 0.0, "v1_1": 1.0}, g)
    assert np.max(np.abs(sol["q1"] - np.sin(g.axes()[0]))) < 1e-8


def test_grid_residual_detects_non_solution():
    H = HAMILTONIANS["laplace"]
    g = GridSpec((1.0, 1.0), (0.02, 0.02))
    good = SymbolicSection(2, {"q1": parse("exp(t1)*cos(t2)"), "p1_1": parse("exp(t1)*cos(t2)"), "p2_1": parse("-exp(t1)*sin(t2)")})
    assert grid_residual(hdw_equations(H), sample_section(good, g)) < 1e-3
    assert section_residual_on_grid(hdw_equations(H), good, g) < 1e-12
    bad = SymbolicSection(2, {"q1": parse("t1^2"), "p1_1": parse("2*t1"), "p2_1": parse("0")})
    assert section_residual_on_grid(hdw_equations(H), bad, g) >= 1.0


def test_wave_prolongation_on_grid():
    L = LAGRANGIANS["wave"]
    phi = SymbolicSection(2, {"q1": parse("sin(t1 - t2)")})
    g = GridSpec((1.0, 1.0), (0.05, 0.05))
    assert section_residual_on_grid(lagrangian_section_equations(L), prolong(phi), g) <= 1e-12


def test_csv_format():
    X = solve_kvector(HAMILTONIANS["oscillator"])
    sol = integrate(X, {"q1": 0.0, "p1_1": 1.0}, GridSpec((0.2,), (0.1,)))
    lines = sol.to_csv().splitlines()
    assert lines[0] == "t1,q1,p1_1"
    assert lines[1] == "0,0,1"
    assert len(lines) == 4
