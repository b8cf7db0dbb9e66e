import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbtqft import fusion_data as fd


@pytest.mark.parametrize("name", fd.BUILTIN_NAMES)
def test_builtin_pentagon_and_invariants(name):
    cat = fd.builtin(name)
    rep = fd.check_invariants(cat)
    assert rep.ok, rep.messages
    assert fd.check_pentagon(cat).max_residual < 1e-9


@pytest.mark.parametrize("name", fd.BUILTIN_NAMES)
def test_fixture_matches_construction(name):
    a, b = fd.builtin(name), fd._construct(name)
    assert a.names == b.names and a.dual == b.dual
    assert np.array_equal(a.N, b.N)
    assert np.allclose(a.tensor(), b.tensor(), atol=1e-15)
    assert np.allclose(a.qdim, b.qdim)


@pytest.mark.parametrize("name", ["fibonacci", "ising", "vec_z3_omega"])
def test_dump_load_roundtrip(name):
    cat = fd.builtin(name)
    back = fd.load_category(fd.dump_category(cat))
    assert np.array_equal(back.tensor(), cat.tensor())
    assert back.name == cat.name


def test_global_dimensions():
    phi = (1 + math.sqrt(5)) / 2
    assert fd.builtin("fibonacci").global_dim_sq == pytest.approx(1 + phi**2)
    assert fd.builtin("ising").global_dim_sq == pytest.approx(4)
    for n in range(1, 6):
        name = "trivial" if n == 1 else f"vec_z{n}"
        assert fd.builtin(name).global_dim_sq == pytest.approx(n)


def test_fibonacci_block_is_involutive():
    cat = fd.builtin("fibonacci")
    es, fs, mat = cat.block(1, 1, 1, 1)
    assert len(es) == 2
    assert np.allclose(mat @ mat, np.eye(2))


def _perturbed_doc(name, key, factor):
    doc = json.loads(fd.dump_category(fd.builtin(name)))
    for ent in doc["F"]:
        if tuple(ent[k] for k in "abcdef") == key:
            ent["re"] *= factor
            return doc
    raise AssertionError("entry not found")


def test_perturbation_fails_validation_with_worst_tuple():
    doc = _perturbed_doc("fibonacci", (1, 1, 1, 1, 0, 0), 1.01)
    with pytest.raises(fd.CategoryError, match="pentagon"):
        fd.load_category(doc)
    cat = fd.load_category(doc, tol=float("inf"))
    rep = fd.check_invariants(cat)
    assert not rep.ok
    assert rep.max_residual > 1e-3
    assert rep.worst is not None and len(rep.worst) == 9


@pytest.mark.parametrize("mutate,match", [
    (lambda d: d.pop("N"), "missing field"),
    (lambda d: d["N"][0][0].__setitem__(0, -1), "negative"),
    (lambda d: d["N"][1][1].__setitem__(1, 2), "multiplicities above 1"),
    (lambda d: d["F"][0].__setitem__("mu", 1), "multiplicity indices"),
    (lambda d: d["F"][0].__setitem__("a", 9), "out of range"),
    (lambda d: d.__setitem__("qdim", [1.0]), "one entry per simple"),
])
def test_schema_errors(mutate, match):
    doc = json.loads(fd.dump_category(fd.builtin("fibonacci")))
    mutate(doc)
    with pytest.raises(fd.CategoryError, match=match):
        fd.load_category(doc)


def test_wrong_dimension_rejected():
    doc = json.loads(fd.dump_category(fd.builtin("fibonacci")))
    doc["qdim"] = [1.0, 1.5]
    with pytest.raises(fd.CategoryError, match="dimension"):
        fd.load_category(doc)


@given(n=st.integers(2, 4), data=st.data())
def test_coboundary_twist_keeps_pentagon(n, data):
    # F -> F * d(beta) for any 2-cochain beta is again a solution
    vals = data.draw(st.lists(st.floats(0, 2 * math.pi), min_size=n * n, max_size=n * n))
    beta = np.exp(1j * np.asarray(vals)).reshape(n, n)
    base = fd.cyclic_cocycle(n, 1)

    def cocycle(a, b, c):
        db = beta[b, c] * beta[a, (b + c) % n] / (beta[(a + b) % n, c] * beta[a, b])
        return base(a, b, c) * db

    cat = fd.pointed_category(n, cocycle)
    assert fd.check_pentagon(cat).max_residual < 1e-9


@given(n=st.integers(2, 4), data=st.data())
def test_random_phase_is_detected(n, data):
    key = tuple(data.draw(st.integers(0, n - 1)) for _ in range(3))
    # no power up to 3 of the phase is 1, so no pentagon instance can balance it
    ang = data.draw(st.floats(0.05, 2.0))

    def cocycle(a, b, c):
        return complex(np.exp(1j * ang)) if (a, b, c) == key else 1.0

    if key.count(0):
        # unit-normalized entries are constrained by the unit check rather than the pentagon
        return
    with pytest.raises(fd.CategoryError):
        fd.pointed_category(n, cocycle)
