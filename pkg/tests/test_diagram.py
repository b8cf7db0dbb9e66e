import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbtqft import diagram as D
from orbtqft import library
from orbtqft import wilson as W
from orbtqft.evaluator import contract, decorate, evaluate_closed, foamify

from conftest import center, datum


def shift_and_char(X, n):
    """(g, j) with chi = exp(2 pi i j k / n), read off the stored phases."""
    g, chi = X.pointed
    j = int(round(np.angle(chi[1]) * n / (2 * np.pi))) % n
    return g, j


def hopf_oracle(X, Y, n):
    gx, jx = shift_and_char(X, n)
    gy, jy = shift_and_char(Y, n)
    return np.exp(2j * np.pi * (jy * gx + jx * gy) / n) / n


@pytest.mark.parametrize("name", ["s3_two_balls", "s3_dual", "t3_dual"])
@pytest.mark.parametrize("cat", ["vec_z2", "fibonacci"])
def test_empty_diagram_is_the_skeleton_network(name, cat):
    sk = library.get(name)
    d = datum(cat)
    a = D.Diagram(sk).network(d)
    b = foamify(decorate(sk, d))
    assert [(n.vars, n.label) for n in a.nodes] == [(n.vars, n.label) for n in b.nodes]
    assert all(np.array_equal(x.array, y.array) for x, y in zip(a.nodes, b.nodes))
    assert a.scalar == b.scalar
    assert contract(a) == contract(b)
    assert D.Diagram(sk).evaluate(d) == evaluate_closed(sk, d)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("name", ["s3_two_balls", "s3_dual"])
def test_unknot_and_hopf_match_phase_products(n, name):
    d = datum(f"vec_z{n}")
    sk = library.get(name)
    objs = center(f"vec_z{n}")
    for X in objs:
        assert abs(D.unknot(sk, X).evaluate(d) - 1 / n) < 1e-9
        for Y in objs:
            assert abs(D.hopf(sk, X, Y).evaluate(d) - hopf_oracle(X, Y, n)) < 1e-9


@pytest.mark.parametrize("side,power", [("left", 1), ("right", -1)])
def test_kink_gives_twist(side, power):
    d = datum("vec_z3")
    sk = library.get("s3_dual")
    for X in center("vec_z3"):
        g, chi = X.pointed
        want = (chi[g] ** power) / 3
        got = D.kinked(sk, X, side).evaluate(d)
        assert abs(got - want) < 1e-9 or abs(got - np.conj(want)) < 1e-9


def test_unit_strands_are_invisible_with_nontrivial_weights():
    d = datum("fibonacci")
    u = W.unit_object(d)
    sk = library.get("s3_dual")
    z = evaluate_closed(sk, d)
    assert abs(D.unknot(sk, u).evaluate(d) - z) < 1e-10
    assert abs(D.hopf(sk, u, u).evaluate(d) - z) < 1e-10


def test_ledger_arithmetic():
    d = datum("vec_z2")
    X, Y = center("vec_z2")[3], center("vec_z2")[2]
    g, _ = D.random_moves(D.hopf(library.get("s3_dual"), X, Y), 12, seed=5)
    for row in g.face_ledger().values():
        assert row["chi"] == row["cells"] - row["cuts"] + row["points"]
        assert row["psi_exponent"] == 2 * row["chi"] - row["corners"] + row["extras"]
    assert g.evaluate(d) == pytest.approx(hopf_oracle(X, Y, 2))


@pytest.mark.parametrize("kind", D.OMEGA_KINDS)
def test_each_move_kind_preserves_values(kind):
    d = datum("vec_z3")
    C = center("vec_z3")
    sk = library.get("s3_dual")
    g = D.hopf(sk, C[4], C[7])
    g, _ = D.random_moves(g, 6, seed=11)
    v0 = g.evaluate(d)
    sites = g.sites(kind)
    for site in sites[:6]:
        h = g.copy()
        try:
            h.apply(kind, site)
        except (D.DiagramError, W.WilsonError):
            continue
        h.check()
        assert abs(h.evaluate(d) - v0) < 1e-9


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_random_moves_fuzz(seed):
    d = datum("vec_z3")
    C = center("vec_z3")
    g = D.hopf(library.get("s3_dual"), C[4], C[5])
    v0 = g.evaluate(d)
    out, log = D.random_moves(g, 50, seed=seed)
    assert len(log) == 50
    assert abs(out.evaluate(d) - v0) < 1e-8


@given(seed=st.integers(0, 2**31))
def test_coupon_composition(seed):
    rng = np.random.default_rng(seed)
    d = datum("vec_z3")
    C = center("vec_z3")
    Y, Z = C[int(rng.integers(9))], C[int(rng.integers(9))]
    X = W.tensor(d, Y, Z)
    sk = library.get("s3_dual")
    f = W.coupon_support([X], [Y, Z]) * complex(*rng.normal(size=2))
    g = W.coupon_support([Y, Z], [X]) * complex(*rng.normal(size=2))
    stacked = D.stacked_coupons(sk, X, Y, Z, f, g).evaluate(d)
    composite = D.composite_coupon(sk, X, D.compose(f, g, 1, 2, 1)).evaluate(d)
    assert abs(stacked - composite) < 1e-10


def test_coupon_composition_with_nontrivial_weights():
    d = datum("fibonacci")
    u = W.unit_object(d)
    rng = np.random.default_rng(3)
    f = W.coupon_support([u], [u, u]) * (rng.normal(size=(2, 2, 2)) + 1j)
    g = W.coupon_support([u, u], [u]) * (rng.normal(size=(2, 2, 2)) - 1j)
    sk = library.get("s3_two_balls")
    stacked = D.stacked_coupons(sk, u, u, u, f, g)
    composite = D.composite_coupon(sk, u, D.compose(f, g, 1, 2, 1))
    assert abs(stacked.evaluate(d) - composite.evaluate(d)) < 1e-10


def test_serialization_roundtrip():
    d = datum("vec_z2")
    X, Y = center("vec_z2")[3], center("vec_z2")[2]
    g, _ = D.random_moves(D.hopf(library.get("s3_dual"), X, Y), 10, seed=2)
    doc = json.loads(json.dumps(D.to_doc(g)))
    back = D.from_doc(doc, d)
    assert back.evaluate(d) == g.evaluate(d)


def test_graph_fixture_matches_oracle():
    from importlib import resources

    d = datum("vec_z2")
    doc = json.loads(resources.files("orbtqft").joinpath("fixtures", "graphs", "hopf.json").read_text())
    g = D.from_doc(doc, d)
    X, Y = g.colors["X"], g.colors["Y"]
    assert abs(W.evaluate_graph(g, d) - hopf_oracle(X, Y, 2)) < 1e-9


def test_evaluate_graph_rejects_bad_colors():
    d = datum("vec_z3")
    bad = W.pointed_object(d, 1, np.exp(2j * np.pi * np.array([0, 1, 1]) / 3))
    with pytest.raises(W.WilsonError):
        W.evaluate_graph(D.unknot(library.get("s3_two_balls"), bad), d)


def test_evaluate_graph_rejects_non_intertwiners():
    d = datum("vec_z3")
    C = center("vec_z3")
    X = C[4]
    sup = W.coupon_support([X], [X])
    h = sup * np.arange(1, sup.size + 1).reshape(sup.shape)
    with pytest.raises(W.WilsonError):
        W.evaluate_graph(D.composite_coupon(library.get("s3_dual"), X, h), d)


def test_check_catches_corruption():
    g = D.hopf(library.get("s3_two_balls"), center("vec_z2")[3], center("vec_z2")[2])
    arc = next(iter(g.arcs))
    del g.arcs[arc]
    with pytest.raises((D.DiagramError, KeyError)):
        g.check()


def test_open_skeleton_is_rejected():
    sk = library.get("cylinder(s2,s2,s2)")
    with pytest.raises(D.DiagramError):
        D.Diagram(sk).network(datum("vec_z2"))
