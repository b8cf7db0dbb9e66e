import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbtqft import fusion_data as fd
from orbtqft.orbifold_datum import AXIOMS, DatumError, check_O_axioms, datum_from_spherical, datum_to_json

from conftest import datum


@pytest.mark.parametrize("name", fd.BUILTIN_NAMES)
def test_axioms_hold(name):
    rep = check_O_axioms(datum(name))
    assert rep.ok, (rep.worst, rep.max_residual)
    assert set(rep.residuals) == set(AXIOMS)
    assert len(rep.variants) == 32


@pytest.mark.parametrize("name", ["fibonacci", "ising"])
def test_psi_perturbation_is_detected(name):
    d = datum(name)
    psi = d.psi.copy()
    psi[1] *= 1.01
    assert check_O_axioms(d.with_psi(psi)).max_residual > 1e-3


@given(scale=st.floats(0.5, 2.0).filter(lambda x: abs(x - 1) > 0.01))
def test_phi_rescaling_is_detected(scale):
    d = datum("fibonacci")
    assert check_O_axioms(d.with_phi(d.phi * scale)).max_residual > 1e-3


def test_pointed_categories_have_unit_weights():
    d = datum("vec_z3")
    assert np.allclose(d.psi, 1)
    assert d.phi == pytest.approx(3 ** -0.5)


def test_a1_is_fusion_rule():
    cat = fd.builtin("ising")
    d = datum("ising")
    for a in range(3):
        for b in range(3):
            for c in range(3):
                assert d.a1[a, c, b] == cat.N[a, b, c]


def test_vertex_tensors_of_both_signs():
    # a0+ and a0- differ unless F is real and self-inverse
    d = datum("fibonacci")
    assert np.allclose(d.a0_plus, d.a0_minus)
    d3 = datum("vec_z3_omega")
    assert not np.allclose(d3.a0_plus, d3.a0_minus)


def test_insertion_counts_balance():
    rep = check_O_axioms(datum("vec_z2"))
    for fam, sides in rep.insertions.items():
        assert set(sides) == {"lhs", "rhs"}


def test_check_flag_raises_on_bad_weights():
    with pytest.raises(DatumError):
        datum_from_spherical(fd.builtin("fibonacci"), psi_exponent=0.3, check=True)


def test_datum_doc_is_json():
    doc = json.loads(datum_to_json(datum("ising")))
    assert doc["index_order"]["a1"] == ["x01", "x02", "x12"]
    assert doc["a0_plus"]["shape"] == [3] * 6
