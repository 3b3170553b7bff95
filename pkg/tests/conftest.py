"""Shared system library and helpers."""

import os
import subprocess
import sys
from pathlib import Path

import pytest

from geofield.hamiltonian import FieldTheory, Variant
from geofield.symexpr import parse

ROOT = Path(__file__).resolve().parents[1]
MODELS = ROOT / "models"


def theory(variant, k, n, text):
    return FieldTheory(Variant(variant), k, n, parse(text))


# Lagrangians on T1kQ; the singular one is last.
LAGRANGIANS = {
    "wave": theory("KSymLag", 2, 1, "(v1_1^2 - v2_1^2)/2"),
    "oscillator": theory("KSymLag", 1, 1, "(v1_1^2 - q1^2)/2"),
    "free_quadratic": theory("KSymLag", 2, 2, "(v1_1^2 + v2_1^2 + v1_2^2 + v2_2^2)/2"),
    "cross_term": theory("KSymLag", 2, 1, "v1_1*v2_1 - q1^2/2"),
    "coupled": theory("KSymLag", 1, 2, "v1_1*v1_2 - q1*q2"),
    "sine_gordon": theory("KSymLag", 2, 1, "(v1_1^2 - v2_1^2)/2 + cos(q1)"),
    "singular": theory("KSymLag", 2, 1, "v1_1^2/2"),
}
REGULAR_LAGRANGIANS = {k: v for k, v in LAGRANGIANS.items() if k != "singular"}

TIME_DEPENDENT_LAGRANGIANS = {
    "forced": theory("KCosymLag", 1, 1, "v1_1^2/2 + t1*q1"),
    "weighted": theory("KCosymLag", 2, 1, "exp(t1)*v1_1^2/2 - v2_1^2/2 + sin(t2)*q1"),
}

HAMILTONIANS = {
    "oscillator": theory("KSymHam", 1, 1, "(q1^2 + p1_1^2)/2"),
    "laplace": theory("KSymHam", 2, 1, "(p1_1^2 + p2_1^2)/2"),
    "klein_gordon": theory("KSymHam", 2, 1, "(p1_1^2 - p2_1^2 + q1^2)/2"),
    "two_field": theory("KSymHam", 2, 2, "(p1_1^2 + p2_1^2 + p1_2^2 + p2_2^2)/2 + q1*q2"),
    "three_base": theory("KSymHam", 3, 1, "(p1_1^2 + p2_1^2 + p3_1^2)/2 + q1^4/4"),
}

TIME_DEPENDENT_HAMILTONIANS = {
    "driven": theory("KCosymHam", 1, 1, "p1_1^2/2 + t1*q1"),
    "modulated": theory("KCosymHam", 2, 1, "(p1_1^2 + p2_1^2)/2 + cos(t1 - t2)*q1^2"),
}


def run_cli(*args, env=None, check=None):
    """Run the installed console entry point through the interpreter."""
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    proc = subprocess.run(
        [sys.executable, "-m", "geofield", *map(str, args)],
        capture_output=True,
        env=full_env,
        cwd=ROOT,
    )
    if check is not None:
        assert proc.returncode == check, proc.stderr.decode()
    return proc


@pytest.fixture
def models_dir():
    return MODELS


# PASS/FAIL lines recorded by test_acceptance.py, echoed after the run.
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
