import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbtqft import fusion_data as fd
from orbtqft import library
from orbtqft.evaluator import (
    EvaluationError,
    TensorNetwork,
    brute_force,
    contract,
    cylinder_map,
    decorate,
    evaluate_closed,
    foamify,
    snap_rank,
    state_space,
)

from conftest import datum

# |Hom(pi_1 M, Z/n)| / n for trivially twisted Z/n: an oracle independent of any network
HOM_COUNT = {
    "s3_two_balls": lambda n: 1 / n,
    "s3_torus_halves": lambda n: 1 / n,
    "s3_dual": lambda n: 1 / n,
    "s3_two_tets": lambda n: 1 / n,
    "s2xs1_product": lambda n: 1.0,
    "t2xs1_product": lambda n: n**2,
    "t3_dual": lambda n: n**2,
    "lens(2)": lambda n: np.gcd(2, n) / n,
    "lens(3)": lambda n: np.gcd(3, n) / n,
}


@pytest.mark.parametrize("name", list(HOM_COUNT))
@pytest.mark.parametrize("n", [2, 3])
def test_pointed_invariants_count_homomorphisms(name, n):
    assert abs(evaluate_closed(library.get(name), datum(f"vec_z{n}")) - HOM_COUNT[name](n)) < 1e-9


@pytest.mark.parametrize("cat,t3", [("fibonacci", 4), ("ising", 9), ("vec_z3_omega", 9)])
def test_known_values(cat, t3):
    d = datum(cat)
    inv_dim = 1 / fd.builtin(cat).global_dim_sq
    assert abs(evaluate_closed(library.get("s3_dual"), d) - inv_dim) < 1e-9
    assert abs(evaluate_closed(library.get("s2xs1_product"), d) - 1) < 1e-9
    assert abs(evaluate_closed(library.get("t3_dual"), d) - t3) < 1e-9


@pytest.mark.parametrize("name", library.CLOSED_NAMES)
def test_trivial_datum_gives_one(name):
    assert evaluate_closed(library.get(name), datum("trivial")) == 1.0


@pytest.mark.parametrize("name", ["s3_two_balls", "s3_torus_halves", "s3_dual", "t3_dual"])
@pytest.mark.parametrize("cat", ["vec_z2", "fibonacci", "vec_z3_omega"])
def test_brute_force_matches_contraction(name, cat):
    tn = foamify(decorate(library.get(name), datum(cat)))
    if tn.labelings() > 10**6:
        pytest.skip("beyond the brute-force limit")
    assert np.max(np.abs(brute_force(tn) - contract(tn))) < 1e-10


@st.composite
def networks(draw):
    nv = draw(st.integers(1, 6))
    dims = {f"x{i}": draw(st.integers(1, 3)) for i in range(nv)}
    names = list(dims)
    tn = TensorNetwork()
    for k in range(draw(st.integers(1, 5))):
        vs = draw(st.lists(st.sampled_from(names), min_size=0, max_size=4))
        shape = [dims[v] for v in vs]
        seed = draw(st.integers(0, 2**31))
        rng = np.random.default_rng(seed)
        arr = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        tn.add(arr, vs, f"n{k}")
    for v in names:
        tn.dims.setdefault(v, dims[v])
    tn.open_vars = draw(st.lists(st.sampled_from(names), unique=True, max_size=2))
    tn.scalar = draw(st.sampled_from([1.0, -0.5, 2j]))
    return tn


@given(tn=networks())
def test_brute_force_oracle_on_random_networks(tn):
    assert np.max(np.abs(brute_force(tn) - contract(tn)), initial=0.0) < 1e-10


def test_cap_is_enforced():
    tn = foamify(decorate(library.get("s3_dual"), datum("vec_z3")))
    with pytest.raises(EvaluationError, match="cap"):
        contract(tn, cap=2)


def test_brute_force_limit():
    tn = foamify(decorate(library.get("s3_dual"), datum("ising")))
    with pytest.raises(EvaluationError):
        brute_force(tn, limit=10)


def test_open_skeleton_is_rejected():
    with pytest.raises(EvaluationError):
        evaluate_closed(library.get("cylinder(s2,s2,s2)"), datum("vec_z2"))


FAMILIES = {"s2": ["s2", "s2_stellar", "s2_stellar_flip"], "t2": ["t2", "t2_flip1", "t2_flip2"]}


@pytest.mark.parametrize("sigma", ["s2", "t2"])
@pytest.mark.parametrize("cat", ["vec_z2", "fibonacci"])
def test_idempotent_laws(sigma, cat):
    d = datum(cat)
    g0, g1, g2 = FAMILIES[sigma]
    P = cylinder_map(g0, g0, d).matrix
    assert np.max(np.abs(P @ P - P)) < 1e-9
    A = cylinder_map(g0, g1, d).matrix
    B = cylinder_map(g1, g2, d).matrix
    C = cylinder_map(g0, g2, d).matrix
    assert np.max(np.abs(B @ A - C)) < 1e-9
    ev = np.linalg.eigvals(P)
    assert all(min(abs(x), abs(x - 1)) < 1e-6 for x in ev)


@pytest.mark.parametrize("sigma", ["s2", "t2"])
@pytest.mark.parametrize("cat", ["vec_z2", "vec_z3", "ising"])
def test_trace_identity(sigma, cat):
    d = datum(cat)
    P = cylinder_map(sigma, sigma, d).matrix
    assert abs(np.trace(P) - evaluate_closed(library.get(f"{sigma}xs1_product"), d)) < 1e-9


@pytest.mark.parametrize("cat,dim", [("vec_z2", 4), ("vec_z3", 9), ("fibonacci", 4), ("ising", 9)])
def test_torus_state_space(cat, dim):
    assert state_space("t2", datum(cat))[0] == dim
    assert state_space("s2", datum(cat))[0] == 1


def test_snap_rank_rejects_non_idempotent():
    with pytest.raises(EvaluationError):
        snap_rank(np.diag([1.0, 0.5]))
