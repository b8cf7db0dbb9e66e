import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbtqft import library, moves
from orbtqft.evaluator import evaluate_closed
from orbtqft.skeleton import isomorphic, validate

from conftest import datum


def test_variant_counts():
    assert moves.variant_counts() == {"B": 3, "L": 9, "T": 20}
    assert len(moves.oriented_variants()) == 32


def test_variants_are_valid_patterns():
    for v in moves.oriented_variants():
        assert v.before.strata and v.after.strata
        assert set(v.before_interface.values()) == set(v.after_interface.values())


@pytest.mark.parametrize("name", ["s3_torus_halves", "s3_dual", "lens(3)"])
@pytest.mark.parametrize("kind", moves.KINDS)
def test_every_site_preserves_the_invariant(name, kind):
    sk = library.get(name)
    d = datum("vec_z3_omega")
    base = evaluate_closed(sk, d)
    for app in moves.find_sites(sk, kind)[:8]:
        out = moves.apply(sk, app)
        assert validate(out).ok
        assert abs(evaluate_closed(out, d) - base) < 1e-9


def test_forward_then_inverse_returns():
    sk = library.get("s3_dual")
    for kind, inv in (("B", "B-"), ("L", "L-"), ("T", "T-")):
        app = moves.find_sites(sk, kind)[0]
        out = moves.apply(sk, app)
        back = [moves.apply(out, a) for a in moves.find_sites(out, inv)]
        assert any(isomorphic(sk, b) for b in back), kind


@given(seed=st.integers(0, 10**6))
def test_random_walk_is_deterministic_and_replayable(seed):
    sk = library.get("s3_torus_halves")
    a, log_a = moves.random_walk(sk, 6, seed=seed)
    b, log_b = moves.random_walk(sk, 6, seed=seed)
    assert moves.log_hash(log_a) == moves.log_hash(log_b)
    assert moves.fingerprint(a) == moves.fingerprint(b)
    log = moves.log_from_json(moves.log_to_json(log_a))
    assert moves.fingerprint(moves.replay(sk, log)) == moves.fingerprint(a)


@given(seed=st.integers(0, 10**6), cat=st.sampled_from(["fibonacci", "ising", "vec_z2_omega"]))
def test_random_walk_preserves_the_invariant(seed, cat):
    sk = library.get("s3_two_balls")
    out, _ = moves.random_walk(sk, 8, seed=seed, max_size=40)
    d = datum(cat)
    assert abs(evaluate_closed(out, d) - evaluate_closed(sk, d)) < 1e-9


def test_stale_site_is_rejected():
    sk = library.get("s3_dual")
    app = moves.find_sites(sk, "T")[0]
    out = moves.apply(sk, app)
    with pytest.raises(moves.MoveError):
        moves.apply(out, app)


@pytest.mark.parametrize("name", ["s2", "s2_stellar", "t2", "t2_flip1"])
def test_surface_moves_invert(name):
    ss = library.surface(name).skeleton
    for app in moves.surface_moves(ss, "l"):
        out = moves.surface_apply(ss, app)
        assert any(moves.surface_isomorphic(ss, moves.surface_apply(out, a)) for a in moves.surface_moves(out, "l"))
    for app in moves.surface_moves(ss, "b"):
        out = moves.surface_apply(ss, app)
        assert any(moves.surface_isomorphic(ss, moves.surface_apply(out, a)) for a in moves.surface_moves(out, "b-"))


def test_surfaces_connect():
    path = moves.connect_surfaces(library.surface("t2").skeleton, library.surface("t2_flip2").skeleton)
    assert path is not None
