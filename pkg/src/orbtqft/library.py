"""Named skeleta, surfaces and cylinders."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .skeleton import (
    Flag,
    Skeleton,
    SkeletonError,
    Stratum,
    SurfaceSkeleton,
    apply_order,
    solve_local_order,
)
from .triangulation import (
    DeltaSurface,
    boundary_4simplex,
    dual_of_triangulation,
    freudenthal_t3,
    glue_ends,
    lens_space,
    sphere_two_triangles,
    surface_cylinder,
    torus_one_vertex,
    two_tet_sphere,
)

CLOSED_NAMES = ("s3_two_balls", "s3_torus_halves", "s3_dual", "s2xs1_product", "t2xs1_product", "t3_dual")


def _det_sign(pts) -> int:
    p0 = np.asarray(pts[0], float)
    m = np.array([np.asarray(p, float) - p0 for p in pts[1:]])
    return 1 if np.linalg.det(m) > 0 else -1


def two_balls() -> Skeleton:
    """S^3 as two balls separated by one 2-sphere."""
    strata = [
        Stratum(0, 3, (0,), ball_certified=True),
        Stratum(1, 3, (1,), ball_certified=True),
        Stratum(2, 2, (0, 1), chi=2),
    ]
    return Skeleton(strata, [], canonical=True, name="s3_two_balls")


def torus_halves_unordered() -> Skeleton:
    """S^3 from a solid torus cut into two halves by two meridian discs; the
    complementary solid torus is cut into a ball by one disc."""
    H1, H2, W = 0, 1, 2
    D1, D2, T1, T2, E = 3, 4, 5, 6, 7
    m1, m2, l1, l2 = 8, 9, 10, 11
    v1, v2 = 12, 13
    # local pictures; vertex germs listed (H1, H2, W+, W-)
    at_v1 = [(1, 1, 0), (1, -1, 0), (-1, 0, 1), (-1, 0, -1)]
    at_v2 = [(-1, 1, 0), (-1, -1, 0), (1, 0, 1), (1, 0, -1)]
    strata = [
        Stratum(H1, 3, (H1,), ball_certified=True),
        Stratum(H2, 3, (H2,), ball_certified=True),
        Stratum(W, 3, (W,), ball_certified=True),
        Stratum(D1, 2, (H1, H2)),
        Stratum(D2, 2, (H1, H2)),
        Stratum(T1, 2, (H1, W)),
        Stratum(T2, 2, (H2, W)),
        Stratum(E, 2, (W, W)),  # germs (W+ side, W- side)
        Stratum(m1, 1, (H1, H2, W)),
        Stratum(m2, 1, (H1, H2, W)),
        Stratum(l1, 1, (H1, W, W)),  # (H1, W+, W-)
        Stratum(l2, 1, (H2, W, W)),
        Stratum(v1, 0, (H1, H2, W, W), sign=_det_sign(at_v1)),
        Stratum(v2, 0, (H1, H2, W, W), sign=_det_sign(at_v2)),
    ]
    flags = []
    for m, D in ((m1, D1), (m2, D2)):
        flags += [Flag(m, D, (0, 1)), Flag(m, T1, (0, 2)), Flag(m, T2, (1, 2))]
    for l, T in ((l1, T1), (l2, T2)):
        flags += [Flag(l, T, (0, 1)), Flag(l, T, (0, 2)), Flag(l, E, (1, 2))]
    for v, m, D in ((v1, m1, D1), (v2, m2, D2)):
        flags += [
            Flag(v, D, (0, 1)), Flag(v, T1, (0, 2)), Flag(v, T1, (0, 3)),
            Flag(v, T2, (1, 2)), Flag(v, T2, (1, 3)), Flag(v, E, (2, 3)),
            Flag(v, m, (0, 1, 2), 0), Flag(v, m, (0, 1, 3), 1),
        ]
    flags += [Flag(v1, l1, (0, 2, 3), 0), Flag(v2, l1, (0, 2, 3), 1)]
    flags += [Flag(v2, l2, (1, 2, 3), 0), Flag(v1, l2, (1, 2, 3), 1)]
    return Skeleton(strata, flags, canonical=False, name="s3_torus_halves")


TORUS_HALVES = {"H1": 0, "H2": 1, "W": 2, "D1": 3, "D2": 4}


def torus_halves() -> Skeleton:
    """Locally ordered torus-halves skeleton, choosing a solution in which the
    two meridian discs order the halves oppositely."""
    sk = torus_halves_unordered()
    for order in solve_local_order(sk):
        if order[3] != order[4]:
            return apply_order(sk, order)
    raise SkeletonError("torus-halves skeleton admits no order with opposite meridian discs")


# ---------------------------------------------------------------------------------
# surfaces


SURFACES = {
    "s2": ("s2", ()),
    "s2_stellar": ("s2", (("stellar", "N", "n"),)),
    "s2_stellar_flip": ("s2", (("stellar", "N", "n"), ("flip", "ab"))),
    "t2": ("t2", ()),
    "t2_flip1": ("t2", (("flip", "d"),)),
    "t2_flip2": ("t2", (("flip", "d"), ("flip", "x"))),
}

_BASE = {"s2": sphere_two_triangles, "t2": torus_one_vertex}


@dataclass(frozen=True)
class Surface:
    """A named surface triangulation and the steps producing it from its family base."""

    name: str
    family: str
    steps: tuple
    delta: DeltaSurface

    @property
    def skeleton(self) -> SurfaceSkeleton:
        return self.delta.skeleton()


def surface(name: str) -> Surface:
    if name not in SURFACES:
        raise KeyError(f"unknown surface {name!r}; known: {sorted(SURFACES)}")
    fam, steps = SURFACES[name]
    G = _BASE[fam]()
    G = G.with_orientation(G.orientation())
    if steps:
        _, G = surface_cylinder(G, steps)
    return Surface(name, fam, steps, G.renamed(name))


def steps_between(G: Surface, H: Surface) -> list:
    if G.family != H.family:
        raise SkeletonError(f"surfaces {G.name} and {H.name} are not the same surface")
    if H.steps[: len(G.steps)] != G.steps:
        raise SkeletonError(f"no stored move sequence from {G.name} to {H.name}")
    return list(H.steps[len(G.steps):])


def empty_s2_cylinder() -> Skeleton:
    """Degenerate cylinder over S^2 with the empty skeleton on both ends: a
    single 3-stratum S^2 x I (chi 2, boundary chi 4)."""
    return Skeleton(
        [Stratum(0, 3, (0,), chi=2, boundary_chi=4, ball_certified=False, bnd=(("in", "S2"), ("out", "S2")))],
        [], canonical=True, name="cylinder(s2,empty,empty)",
    )


def cylinder_between(G, H=None, steps=None) -> Skeleton:
    """Skeleton of Sigma x [0, 1] restricting to ``G`` on the in- and ``H`` on the out-boundary."""
    if isinstance(G, str) and G in ("s2_empty", "empty"):
        return empty_s2_cylinder()
    G = surface(G) if isinstance(G, str) else G
    H = G if H is None else (surface(H) if isinstance(H, str) else H)
    path = steps_between(G, H) if steps is None else list(steps)
    tri, _ = surface_cylinder(G.delta, path, name=f"cylinder({G.family},{G.name},{H.name})")
    return dual_of_triangulation(tri)


def product_with_circle(G) -> Skeleton:
    G = surface(G) if isinstance(G, str) else G
    tri, _ = surface_cylinder(G.delta, ())
    return dual_of_triangulation(glue_ends(tri, name=f"{G.name}xs1_product"))


# ---------------------------------------------------------------------------------
# registry


def _fixture(name: str) -> Skeleton | None:
    try:
        path = resources.files("orbtqft").joinpath("fixtures", "skeleta", f"{name}.json")
        if path.is_file():
            return Skeleton.from_doc(json.loads(path.read_text()))
    except (FileNotFoundError, ModuleNotFoundError):
        return None
    return None


@lru_cache(maxsize=64)
def _get(name: str) -> Skeleton:
    m = re.fullmatch(r"lens\((\d+)\)", name)
    if m:
        p = int(m.group(1))
        tri = two_tet_sphere() if p == 1 else lens_space(p)
        sk = dual_of_triangulation(tri, name=name)
        return sk
    m = re.fullmatch(r"cylinder\(([^,]+),([^,]+),([^,]+)\)", name.replace(" ", ""))
    if m:
        sigma, g, h = m.groups()
        if g in ("empty", "s2_empty"):
            return empty_s2_cylinder()
        g = g if g in SURFACES else f"{sigma}_{g}"
        h = h if h in SURFACES else f"{sigma}_{h}"
        return cylinder_between(g, h)
    fx = _fixture(name)
    if fx is not None:
        return fx
    if name == "s3_two_balls":
        return two_balls()
    if name == "s3_torus_halves":
        return torus_halves()
    if name == "s3_dual":
        return dual_of_triangulation(boundary_4simplex(), name="s3_dual")
    if name == "s3_two_tets":
        return dual_of_triangulation(two_tet_sphere(), name="s3_two_tets")
    if name == "s2xs1_product":
        return product_with_circle("s2")
    if name == "t2xs1_product":
        return product_with_circle("t2")
    if name == "t3_dual":
        return dual_of_triangulation(freudenthal_t3(), name="t3_dual")
    raise KeyError(f"unknown skeleton {name!r}")


def get(name: str) -> Skeleton:
    return _get(name.strip())


def names() -> list[str]:
    return list(CLOSED_NAMES) + ["s3_two_tets", "lens(k)", "cylinder(sigma,G,G')"]
