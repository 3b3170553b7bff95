import itertools

import pytest

from geofield.canonical import (
    canonical_kcosymplectic,
    canonical_ksymplectic,
    canonical_multisymplectic,
    k_tangent_structure,
    liouville_field,
)
from geofield.forms import interior

import oracles

KN = list(itertools.product((1, 2, 3), repeat=2))


@pytest.mark.parametrize("k,n", KN)
def test_renderings_match_oracle(k, n):
    assert oracles.rendered(k, n) == oracles.golden(k, n)


def test_hand_written_goldens():
    got = oracles.rendered(2, 1)
    assert got["ms.Theta"] == "p1_1 dq1∧dt2 - p2_1 dq1∧dt1 + p dt1∧dt2"
    assert got["ms.Omega"] == "dq1∧dp1_1∧dt2 - dq1∧dp2_1∧dt1 - dt1∧dt2∧dp"
    assert got["kcosym.omega2"] == "dq1∧dp2_1"
    assert oracles.rendered(1, 2)["ms.Omega"] == "dq1∧dp1_1 + dq2∧dp1_2 + dt1∧dp"


@pytest.mark.parametrize("k,n", KN)
def test_structure_invariants(k, n):
    assert all(canonical_ksymplectic(k, n).check().values())
    assert all(canonical_kcosymplectic(k, n).check().values())
    assert all(canonical_multisymplectic(k, n).check().values())


@pytest.mark.parametrize("k,n", [(1, 1), (2, 1), (2, 2), (3, 1)])
def test_reeb_fields(k, n):
    c = canonical_kcosymplectic(k, n)
    for A, R in enumerate(c.reeb):
        assert R.render() == f"∂/∂t{A + 1}"
        for B, eta in enumerate(c.eta):
            assert interior(R, eta).scalar_value().value == (1 if A == B else 0)
        assert all(interior(R, w).is_zero() for w in c.omega)


@pytest.mark.parametrize("k,n", [(1, 1), (2, 2), (3, 1)])
def test_k_tangent_structure(k, n):
    from geofield.forms import tangent_frame

    frame = tangent_frame(k, n)
    S = k_tangent_structure(frame)
    assert all(a.compose(b).is_zero() for a in S for b in S)
    delta = liouville_field(frame)
    assert delta.render().startswith("v1_1 ∂/∂v1_1")
