import dataclasses
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbtqft import library
from orbtqft import skeleton as S
from orbtqft.evaluator import evaluate_closed

from conftest import datum

CLOSED = library.CLOSED_NAMES + ("s3_two_tets", "lens(2)", "lens(3)")


@pytest.mark.parametrize("name", CLOSED)
def test_library_skeleta_validate(name):
    sk = library.get(name)
    rep = S.validate(sk)
    assert rep.ok, rep.violations[:3]
    assert sk.is_closed and sk.canonical


@pytest.mark.parametrize("name", library.CLOSED_NAMES)
def test_doc_roundtrip(name):
    sk = library.get(name)
    back = S.Skeleton.from_doc(sk.to_doc())
    assert back.to_doc() == sk.to_doc()
    assert S.isomorphic(sk, back)


@pytest.mark.parametrize("name", ["s3_dual", "t3_dual", "s2xs1_product"])
def test_fixture_equals_construction(name):
    library._get.cache_clear()
    shipped = library.get(name)
    rebuilt = {
        "s3_dual": lambda: library.dual_of_triangulation(library.boundary_4simplex(), name="s3_dual"),
        "t3_dual": lambda: library.dual_of_triangulation(library.freudenthal_t3(), name="t3_dual"),
        "s2xs1_product": lambda: library.product_with_circle("s2"),
    }[name]()
    assert shipped.to_doc() == rebuilt.to_doc()


def test_dual_euler_characteristic_vanishes():
    for name in ("s3_dual", "t3_dual", "lens(3)"):
        sk = library.get(name)
        assert sk.euler_characteristic() == 0


def test_chi_sym():
    st_ = S.Stratum(0, 2, (0, 1), chi=1, boundary_chi=1)
    assert S.chi_sym(st_) == 1
    assert S.chi_sym(dataclasses.replace(st_, boundary_chi=0)) == 2
    assert S.chi_sym(dataclasses.replace(st_, chi=0, boundary_chi=0)) == 0


def _drop_flag(sk, k):
    flags = list(sk.flags)
    del flags[k]
    return S.Skeleton(sk.strata.values(), flags, sk.canonical, sk.name)


@given(k=st.integers(0, 10**6))
def test_missing_flag_is_reported(k):
    sk = library.get("s3_dual")
    bad = _drop_flag(sk, k % len(sk.flags))
    assert not S.validate(bad).ok


def test_uncertified_ball_is_reported():
    sk = library.get("s3_two_balls")
    b = sk.of_dim(3)[0]
    strata = [dataclasses.replace(b, ball_certified=False) if s.id == b.id else s for s in sk.strata.values()]
    rep = S.validate(S.Skeleton(strata, sk.flags, True))
    assert any("ball" in v for v in rep.violations)


def _relabel(sk, perm):
    strata = [dataclasses.replace(s, id=perm[s.id], germs=tuple(perm[g] for g in s.germs))
              for s in sk.strata.values()]
    flags = [dataclasses.replace(f, lower=perm[f.lower], higher=perm[f.higher]) for f in sk.flags]
    return S.Skeleton(strata, flags, sk.canonical, sk.name)


@given(seed=st.integers(0, 10**6), name=st.sampled_from(["s3_torus_halves", "s3_dual", "lens(2)"]))
def test_relabelling_is_invisible(seed, name):
    sk = library.get(name)
    ids = sorted(sk.strata)
    new = ids[:]
    random.Random(seed).shuffle(new)
    other = _relabel(sk, dict(zip(ids, new)))
    assert S.validate(other).ok
    assert S.canonical_signature(other) == S.canonical_signature(sk)
    d = datum("vec_z3_omega")
    assert abs(evaluate_closed(other, d) - evaluate_closed(sk, d)) < 1e-12


def test_local_orders_roundtrip_through_orientations():
    sk = library.torus_halves_unordered()
    sols = S.solve_local_order(sk)
    assert sols
    for order in sols:
        osk = S.orient_from_order(sk, order)
        assert S.recover_order(osk) == order
        assert S.validate(S.apply_order(sk, order)).ok


def test_boundary_of_cylinder():
    cyl = library.get("cylinder(t2,t2,t2_flip1)")
    g_in, g_out = S.boundary_skeleton(cyl)
    assert S.validate_surface(g_in).ok and S.validate_surface(g_out).ok
    assert g_in.euler_characteristic() == 0 == g_out.euler_characteristic()
    assert not cyl.is_closed


def test_distinct_manifolds_have_distinct_signatures():
    names = ("s3_two_balls", "s3_torus_halves", "s3_dual", "s2xs1_product", "t3_dual")
    sigs = {S.canonical_signature(library.get(n)) for n in names}
    assert len(sigs) == len(names)


def test_signature_ignores_end_labels():
    sk = library.get("s3_dual")
    flipped = [S.Flag(f.lower, f.higher, f.injection, None if f.end is None else 1 - f.end) for f in sk.flags]
    assert S.canonical_signature(S.Skeleton(sk.strata.values(), flipped)) == S.canonical_signature(sk)
