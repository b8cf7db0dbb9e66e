"""Ordered (branched) triangulations and their dual skeleta.

A triangulation is a Delta-complex: tetrahedra with vertex slots 0..3 and face
gluings ``(t, i) -> (t2, j, perm)``, where ``perm`` maps slots of ``t`` to
slots of ``t2`` with ``perm[i] == j``.  Slot order is the branching, so every
gluing must be order preserving on the glued face.  Unglued faces form the
boundary and carry ``(side, key, edge_names, vertex_names)`` markers: ``key``
names the surface triangle, ``edge_names`` its sides in slot-pair order
``01, 02, 12`` and ``vertex_names`` its corners in slot order.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from typing import Hashable, Iterable, Sequence

from .skeleton import Flag, Skeleton, Stratum, SurfaceSkeleton


class TriangulationError(ValueError):
    pass


FACE = {i: tuple(j for j in range(4) if j != i) for i in range(4)}


def _perm_parity(seq: Sequence[int]) -> int:
    s = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


class _UF:
    def __init__(self):
        self.p: dict = {}

    def find(self, x):
        self.p.setdefault(x, x)
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[max(a, b, key=repr)] = min(a, b, key=repr)


@dataclass
class Triangulation:
    tets: list[tuple]  # vertex labels per slot (informational for Delta-complexes)
    gluings: dict[tuple[int, int], tuple[int, int, tuple[int, ...]]] = field(default_factory=dict)
    boundary: dict[tuple[int, int], tuple] = field(default_factory=dict)
    first_sign: int = 1
    name: str = ""

    # -- constructors -------------------------------------------------------------
    @classmethod
    def simplicial(
        cls,
        tets: Iterable[Sequence[Hashable]],
        vertex_order: Sequence[Hashable] | None = None,
        boundary_side: dict[Hashable, str] | None = None,
        name: str = "",
        first_sign: int = 1,
    ) -> "Triangulation":
        """Simplicial complex given by vertex labels; slots sorted by ``vertex_order``.

        ``boundary_side`` maps a vertex label to ``"in"``/``"out"``; a boundary
        face takes the side of its vertices.  Boundary keys are the sorted
        ``surface`` names, obtained by stripping a ``(name, layer)`` label to
        ``name``.
        """
        tets = [tuple(t) for t in tets]
        labels = sorted({v for t in tets for v in t}, key=repr)
        if vertex_order is None:
            vertex_order = labels
        pos = {v: i for i, v in enumerate(vertex_order)}
        missing = [v for v in labels if v not in pos]
        if missing:
            raise TriangulationError(f"vertex_order misses {missing}")
        ordered = []
        for t in tets:
            if len(set(t)) != 4:
                raise TriangulationError(f"degenerate simplex {t}")
            ordered.append(tuple(sorted(t, key=lambda v: pos[v])))
        faces: dict[tuple, list[tuple[int, int]]] = {}
        for ti, t in enumerate(ordered):
            for i in range(4):
                key = tuple(t[j] for j in FACE[i])
                faces.setdefault(key, []).append((ti, i))
        gl = {}
        bnd = {}
        for key, occ in faces.items():
            if len(occ) > 2:
                raise TriangulationError(f"face {key} lies in {len(occ)} simplices")
            if len(occ) == 2:
                (t1, i1), (t2, i2) = occ
                perm = [0] * 4
                for a, b in zip(FACE[i1], FACE[i2]):
                    perm[a] = b
                perm[i1] = i2
                gl[(t1, i1)] = (t2, i2, tuple(perm))
                inv = [0] * 4
                for a in range(4):
                    inv[perm[a]] = a
                gl[(t2, i2)] = (t1, i1, tuple(inv))
            else:
                (t1, i1), = occ
                side = "out"
                if boundary_side is not None:
                    sides = {boundary_side.get(v, "out") for v in key}
                    if len(sides) != 1:
                        raise TriangulationError(f"boundary face {key} mixes sides")
                    side = sides.pop()
                names = tuple(_surface_name(v) for v in key)
                bnd[(t1, i1)] = _simplicial_marker(side, names)
        return cls(ordered, gl, bnd, first_sign, name)

    def to_doc(self) -> dict:
        return {
            "name": self.name,
            "tetrahedra": [[_js(v) for v in t] for t in self.tets],
            "gluings": [[t, i, t2, j, list(p)] for (t, i), (t2, j, p) in sorted(self.gluings.items())],
            "boundary": [[t, i] + [_js(x) for x in m] for (t, i), m in sorted(self.boundary.items())],
            "first_sign": self.first_sign,
        }

    @classmethod
    def from_doc(cls, doc: dict | str) -> "Triangulation":
        if isinstance(doc, str):
            doc = json.loads(doc)
        tets = [tuple(_hs(v) for v in t) for t in doc["tetrahedra"]]
        if "gluings" not in doc:
            return cls.simplicial(tets, doc.get("vertex_order"), name=doc.get("name", ""))
        gl = {}
        for t, i, t2, j, p in doc["gluings"]:
            gl[(int(t), int(i))] = (int(t2), int(j), tuple(int(x) for x in p))
        bnd = {}
        for t, i, side, *rest in doc.get("boundary", []):
            m = (side,) + tuple(_hs(x) for x in rest)
            bnd[(int(t), int(i))] = m if len(m) == 4 else _simplicial_marker(side, m[1])
        tri = cls(tets, gl, bnd, int(doc.get("first_sign", 1)), doc.get("name", ""))
        return tri

    # -- structure ----------------------------------------------------------------
    def check(self) -> None:
        n = len(self.tets)
        for (t, i), (t2, j, p) in self.gluings.items():
            if not (0 <= t < n and 0 <= t2 < n):
                raise TriangulationError(f"gluing references missing tetrahedron: {(t, i)}")
            if sorted(p) != [0, 1, 2, 3] or p[i] != j:
                raise TriangulationError(f"bad gluing permutation at {(t, i)}")
            back = self.gluings.get((t2, j))
            if back is None or back[0] != t or back[1] != i:
                raise TriangulationError(f"gluing at {(t, i)} is not symmetric")
            for a in range(4):
                if back[2][p[a]] != a:
                    raise TriangulationError(f"gluing at {(t, i)} has inconsistent inverse")
            img = [p[a] for a in FACE[i]]
            if img != sorted(img):
                raise TriangulationError(
                    f"gluing at {(t, i)} is not order preserving: the ordering creates a loop"
                )
        for t in range(n):
            for i in range(4):
                if (t, i) not in self.gluings and (t, i) not in self.boundary:
                    raise TriangulationError(f"face {(t, i)} is neither glued nor boundary")

    def _classes(self, k: int):
        """Equivalence classes of k-subsets of slots (k=1 vertices, 2 edges, 3 faces)."""
        uf = _UF()
        n = len(self.tets)
        for t in range(n):
            for sub in itertools.combinations(range(4), k):
                uf.find((t, sub))
        for (t, i), (t2, j, p) in self.gluings.items():
            for sub in itertools.combinations(FACE[i], k):
                img = tuple(sorted(p[a] for a in sub))
                uf.union((t, sub), (t2, img))
        cls: dict = {}
        for t in range(n):
            for sub in itertools.combinations(range(4), k):
                cls.setdefault(uf.find((t, sub)), []).append((t, sub))
        return list(cls.values())

    def orientation_signs(self) -> list[int]:
        n = len(self.tets)
        sign: list[int | None] = [None] * n
        for start in range(n):
            if sign[start] is not None:
                continue
            sign[start] = self.first_sign if start == 0 else 1
            stack = [start]
            while stack:
                t = stack.pop()
                for i in range(4):
                    g = self.gluings.get((t, i))
                    if g is None:
                        continue
                    t2, j, p = g
                    par = _perm_parity([p[a] for a in FACE[i]])
                    want = -sign[t] * (-1) ** i * par * (-1) ** j
                    if sign[t2] is None:
                        sign[t2] = want
                        stack.append(t2)
                    elif sign[t2] != want:
                        raise TriangulationError("triangulation is not orientable")
        return [int(s) for s in sign]

    def vertex_classes(self):
        return self._classes(1)

    def f_vector(self) -> tuple[int, int, int, int]:
        return (len(self._classes(1)), len(self._classes(2)), len(self._classes(3)), len(self.tets))


def _simplicial_marker(side, names):
    names = tuple(names)
    edges = tuple((names[a], names[b]) for a, b in ((0, 1), (0, 2), (1, 2)))
    return (side, names, edges, names)


def _surface_name(v):
    if isinstance(v, tuple) and len(v) == 2 and v[1] in ("in", "out", "m0"):
        return v[0]
    return v


def _js(v):
    return list(v) if isinstance(v, tuple) else v


def _hs(v):
    return tuple(_hs(x) for x in v) if isinstance(v, list) else v


def dual_of_triangulation(tri: Triangulation | dict, vertex_order: Sequence | None = None, name: str = "") -> Skeleton:
    """Poincare dual skeleton with the local order inherited from the branching."""
    if isinstance(tri, dict):
        if vertex_order is not None:
            tri = dict(tri, vertex_order=list(vertex_order))
        tri = Triangulation.from_doc(tri)
    tri.check()
    n = len(tri.tets)
    signs = tri.orientation_signs()
    vcls = tri._classes(1)
    ecls = tri._classes(2)
    fcls = tri._classes(3)

    nid = itertools.count()
    vid = {}
    for c in vcls:
        i = next(nid)
        for t, sub in c:
            vid[(t, sub[0])] = i
    eid = {}
    for c in ecls:
        i = next(nid)
        for t, sub in c:
            eid[(t, sub)] = i
    fid = {}
    for c in fcls:
        i = next(nid)
        for t, sub in c:
            fid[(t, sub)] = i
    tid = {t: next(nid) for t in range(n)}

    # boundary bookkeeping
    bverts: dict[int, set] = {}
    bedges: dict[int, set] = {}
    bface = {}
    for (t, i), (side, key, enames, vnames) in tri.boundary.items():
        bface[fid[(t, FACE[i])]] = (side, key, t, i)
        face = FACE[i]
        for a, name_ in zip(face, vnames):
            bverts.setdefault(vid[(t, a)], set()).add((side, name_))
        for (pa, pb), name_ in zip(((0, 1), (0, 2), (1, 2)), enames):
            bedges.setdefault(eid[(t, (face[pa], face[pb]))], set()).add((side, name_))

    strata: list[Stratum] = []
    for c in vcls:
        v = vid[(c[0][0], c[0][1][0])]
        bnd = tuple(sorted(bverts.get(v, ()), key=repr))
        strata.append(Stratum(v, 3, (v,), chi=1, boundary_chi=len(bnd), ball_certified=True, bnd=bnd))
    for c in ecls:
        t, (a, b) = c[0]
        e = eid[(t, (a, b))]
        bnd = tuple(sorted(bedges.get(e, ()), key=repr))
        if len(bnd) > 1:
            raise TriangulationError(f"edge {e} meets the boundary in several arcs")
        if len(bverts.get(vid[(t, a)], ())) > 1 or len(bverts.get(vid[(t, b)], ())) > 1:
            raise TriangulationError(f"vertex of edge {e} meets the boundary in several discs")
        strata.append(
            Stratum(e, 2, (vid[(t, a)], vid[(t, b)]), chi=1, boundary_chi=len(bnd), bnd=bnd)
        )
    flags: list[Flag] = []
    for c in fcls:
        t, sub = c[0]
        f = fid[(t, sub)]
        germs = tuple(vid[(t, a)] for a in sub)
        bnd = ()
        if f in bface:
            side, key, _, _ = bface[f]
            bnd = ((side, key, 1),)
        strata.append(Stratum(f, 1, germs, chi=1, boundary_chi=len(bnd), bnd=bnd))
        for pi, pj in itertools.combinations(range(3), 2):
            flags.append(Flag(f, eid[(t, (sub[pi], sub[pj]))], (pi, pj)))
    for t in range(n):
        v = tid[t]
        germs = tuple(vid[(t, a)] for a in range(4))
        strata.append(Stratum(v, 0, germs, chi=1, sign=signs[t]))
        for a, b in itertools.combinations(range(4), 2):
            flags.append(Flag(v, eid[(t, (a, b))], (a, b)))
    # ends of dual 1-strata
    end_used: dict[int, int] = {}
    for c in fcls:
        for t, sub in c:
            f = fid[(t, sub)]
            end = end_used.get(f, 0)
            end_used[f] = end + 1
            flags.append(Flag(tid[t], f, sub, end))
    sk = Skeleton(strata, flags, canonical=True, name=name or tri.name)
    return sk


# -----------------------------------------------------------------------------
# standard triangulations


def boundary_4simplex(order: Sequence[int] = (0, 1, 2, 3, 4)) -> Triangulation:
    tets = [tuple(v for v in range(5) if v != i) for i in range(5)]
    return Triangulation.simplicial(tets, order, name="s3_dual")


def two_tet_sphere() -> Triangulation:
    """Two tetrahedra glued along all four faces by the identity."""
    gl = {}
    for i in range(4):
        gl[(0, i)] = (1, i, (0, 1, 2, 3))
        gl[(1, i)] = (0, i, (0, 1, 2, 3))
    return Triangulation([(0, 1, 2, 3), (0, 1, 2, 3)], gl, {}, 1, "s3_two_tets")


def lens_space(p: int) -> Triangulation:
    """L(p, 1) as p tetrahedra around an axis, for p >= 2."""
    if p < 2:
        raise TriangulationError("use two_tet_sphere for p = 1")
    # tet i has slots (e_i, e_{i+1}, S, N)
    gl = {}

    def glue(t, i, t2, j, perm):
        gl[(t, i)] = (t2, j, tuple(perm))
        inv = [0] * 4
        for a in range(4):
            inv[perm[a]] = a
        gl[(t2, j)] = (t, i, tuple(inv))

    for i in range(p):
        k = (i + 1) % p
        # face (e_{i+1}, S, N) of tet i = face (e_k, S, N) of tet k: slots 1,2,3 -> 0,2,3
        glue(i, 0, k, 1, [1, 0, 2, 3])
        # face (e_i, e_{i+1}, N) of tet i -> face (e_{i+1}, e_{i+2}, S) of tet k
        glue(i, 2, k, 3, [0, 1, 3, 2])
    tets = [(("e", i), ("e", (i + 1) % p), "S", "N") for i in range(p)]
    return Triangulation(tets, gl, {}, 1, f"lens({p})")


def freudenthal_t3() -> Triangulation:
    """Six-tetrahedron ordered triangulation of the 3-torus (one vertex)."""
    cube = {}
    perms = list(itertools.permutations(range(3)))
    for idx, pm in enumerate(perms):
        pts = [(0, 0, 0)]
        cur = [0, 0, 0]
        for ax in pm:
            cur[ax] = 1
            pts.append(tuple(cur))
        cube[idx] = pts
    # glue faces by matching vertex sets modulo the lattice
    faces: dict = {}
    for t, pts in cube.items():
        for i in range(4):
            face = [pts[j] for j in FACE[i]]
            faces.setdefault(_torus_face_key(face), []).append((t, i, face))
    gl = {}
    for key, occ in faces.items():
        if len(occ) != 2:
            raise TriangulationError("Freudenthal gluing failed")
        (t1, i1, f1), (t2, i2, f2) = occ
        perm = [0] * 4
        for a, b in zip(FACE[i1], FACE[i2]):
            perm[a] = b
        perm[i1] = i2
        gl[(t1, i1)] = (t2, i2, tuple(perm))
        inv = [0] * 4
        for a in range(4):
            inv[perm[a]] = a
        gl[(t2, i2)] = (t1, i1, tuple(inv))
    return Triangulation([tuple(range(4))] * 6, gl, {}, 1, "t3_dual")


def _torus_face_key(face):
    # faces agree in the torus iff they are integer translates of each other
    v0 = face[0]
    return tuple(tuple(p[k] - v0[k] for k in range(3)) for p in face)


# -----------------------------------------------------------------------------
# surfaces and cylinders


SIDE_PAIRS = ((1, 2), (0, 2), (0, 1))  # slots joined by the side opposite slot k


@dataclass(frozen=True)
class DeltaSurface:
    """Ordered Delta-complex surface.

    ``tris`` maps a triangle name to ``(corner vertex names, side edge names)``,
    both indexed by slot; side ``k`` is the edge opposite slot ``k`` and runs
    from the lower to the higher of the remaining slots.
    """

    tris: tuple[tuple[Hashable, tuple, tuple], ...]
    family: str = ""
    name: str = ""
    # orientation of each triangle's slot order relative to the surface orientation
    orient: tuple[tuple[Hashable, int], ...] = ()

    def orientation(self) -> dict:
        """Stored triangle orientations, or a propagated one fixing the first triangle."""
        if self.orient:
            return dict(self.orient)
        sign: dict = {self.tris[0][0]: 1}
        stack = [self.tris[0][0]]
        tab = self.table
        while stack:
            t = stack.pop()
            for k in range(3):
                e = tab[t][1][k]
                for t2, k2 in self.incidences(e):
                    if (t2, k2) == (t, k):
                        continue
                    # an edge induced with the same direction from both sides needs
                    # opposite slot orientations
                    want = -sign[t] * (-1) ** k * (-1) ** k2
                    if t2 not in sign:
                        sign[t2] = want
                        stack.append(t2)
                    elif sign[t2] != want:
                        raise TriangulationError("surface is not orientable")
        return sign

    def with_orientation(self, orient: dict) -> "DeltaSurface":
        return replace(self, orient=tuple(sorted(orient.items(), key=lambda x: repr(x[0]))))

    @property
    def table(self) -> dict:
        return {t: (tuple(v), tuple(e)) for t, v, e in self.tris}

    def edges(self) -> dict[Hashable, tuple]:
        out: dict = {}
        for t, vs, es in self.tris:
            for k in range(3):
                i, j = SIDE_PAIRS[k]
                ends = (vs[i], vs[j])
                if out.setdefault(es[k], ends) != ends:
                    raise TriangulationError(f"edge {es[k]!r} has inconsistent endpoints")
        return out

    def incidences(self, edge) -> list[tuple[Hashable, int]]:
        return [(t, k) for t, _, es in self.tris for k in range(3) if es[k] == edge]

    def vertices(self) -> list:
        return sorted({v for _, vs, _ in self.tris for v in vs}, key=repr)

    def check(self) -> None:
        self.edges()
        for e in self.edges():
            if len(self.incidences(e)) != 2:
                raise TriangulationError(f"edge {e!r} is not shared by exactly two triangle sides")

    def euler_characteristic(self) -> int:
        return len(self.vertices()) - len(self.edges()) + len(self.tris)

    def marker(self, side: str, t) -> tuple:
        vs, es = self.table[t]
        # side names in slot-pair order 01, 02, 12
        return (side, t, (es[2], es[1], es[0]), vs)

    def skeleton(self) -> SurfaceSkeleton:
        """Dual surface skeleton: 2-strata keyed by vertices, 1-strata by edges,
        0-strata by triangles."""
        strata = [Stratum(v, 2, (v,), chi=1) for v in self.vertices()]
        for e, (a, b) in sorted(self.edges().items(), key=lambda x: repr(x[0])):
            strata.append(Stratum(e, 1, (a, b), chi=1))
        flags = []
        for t, vs, es in self.tris:
            strata.append(Stratum(t, 0, vs, chi=1))
            for k in range(3):
                flags.append(Flag(t, es[k], SIDE_PAIRS[k]))
        return SurfaceSkeleton(strata, flags, canonical=True, name=self.name)

    def replace_tris(self, drop: Iterable, add: Iterable, name: str = "") -> "DeltaSurface":
        drop = set(drop)
        tris = tuple(x for x in self.tris if x[0] not in drop) + tuple(add)
        return DeltaSurface(tris, self.family, name or self.name)

    def renamed(self, name: str) -> "DeltaSurface":
        return replace(self, name=name)


def sphere_two_triangles() -> DeltaSurface:
    es = ("bc", "ac", "ab")
    return DeltaSurface((("N", ("a", "b", "c"), es), ("S", ("a", "b", "c"), es)), "s2", "s2")


def torus_one_vertex() -> DeltaSurface:
    return DeltaSurface(
        (("L", ("v", "v", "v"), ("y", "d", "x")), ("U", ("v", "v", "v"), ("x", "d", "y"))), "t2", "t2"
    )


@dataclass(frozen=True)
class SurfaceStep:
    """A surface move realised by one tetrahedron on top of the current surface.

    ``faces`` lists the tetrahedron's faces (opposite slots 0..3) as
    ``(triangle name, is_new)``; old triangles lie below, new ones above.
    """

    kind: str
    faces: tuple[tuple[Hashable, bool], ...]
    result: DeltaSurface


def flip_step(G: DeltaSurface, edge, choice: int = 0) -> SurfaceStep:
    """2-2 move across ``edge``; ``choice`` orders the two far corners when the
    ordering leaves it free."""
    inc = G.incidences(edge)
    if len(inc) != 2 or inc[0][0] == inc[1][0]:
        raise TriangulationError(f"edge {edge!r} does not separate two distinct triangles")
    (T, k), (T2, k2) = inc
    tab = G.table
    vT, eT = tab[T]
    vT2, eT2 = tab[T2]
    i, j = SIDE_PAIRS[k]
    p_name, q_name = vT[i], vT[j]
    # symbolic corners p < q, with a (far corner of T) and b (far corner of T2)
    rank = {"p": 1, "q": 3, "a": {0: 0, 1: 2, 2: 4}[k], "b": {0: 0, 1: 2, 2: 4}[k2]}
    tie = {"a": 0, "b": 1} if choice == 0 else {"a": 1, "b": 0}
    order = sorted("pqab", key=lambda c: (rank[c], tie.get(c, 0)))
    name = {"p": p_name, "q": q_name, "a": vT[k], "b": vT2[k2]}

    corners_T = sorted("pqa", key=order.index)
    corners_T2 = sorted("pqb", key=order.index)
    new_edge = f"{edge}'"
    U, U2 = f"{T}{T2}+", f"{T}{T2}-"
    sides = {}
    # sides of the old triangles, addressed by the opposite corner
    sides[("T", "p")] = eT[corners_T.index("p")]
    sides[("T2", "p")] = eT2[corners_T2.index("p")]
    sides[("T", "q")] = eT[corners_T.index("q")]
    sides[("T2", "q")] = eT2[corners_T2.index("q")]

    def tri(keep, drop):
        cs = sorted(keep + "ab", key=order.index)
        es = []
        for c in cs:
            if c == keep:
                es.append(new_edge)
            elif c == "a":
                es.append(sides[("T2", drop)])
            else:
                es.append(sides[("T", drop)])
        return tuple(name[c] for c in cs), tuple(es)

    vu, eu = tri("q", "p")  # U = {q, a, b}, opposite p
    vu2, eu2 = tri("p", "q")  # U2 = {p, a, b}, opposite q
    faces = []
    for c in order:
        faces.append({"a": (T2, False), "b": (T, False), "p": (U, True), "q": (U2, True)}[c])
    res = G.replace_tris((T, T2), ((U, vu, eu), (U2, vu2, eu2)))
    res.check()
    return SurfaceStep("flip", tuple(faces), res)


def stellar_step(G: DeltaSurface, T, new_vertex) -> SurfaceStep:
    """1-3 move: a new vertex, ordered last, inside triangle ``T``."""
    vs, es = G.table[T]
    n = new_vertex
    spokes = tuple(f"{vs[i]}{n}{i}" for i in range(3))
    new = []
    faces = []
    for i in range(3):
        a, b = SIDE_PAIRS[i]
        # triangle opposite corner i: corners (a, b, n)
        U = f"{T}{n}{i}"
        new.append((U, (vs[a], vs[b], n), (spokes[b], spokes[a], es[i])))
        faces.append((U, True))
    faces.append((T, False))
    return SurfaceStep("stellar", tuple(faces), G.replace_tris((T,), new))


def unstellar_step(G: DeltaSurface, new_vertex, name=None) -> SurfaceStep:
    """3-1 move removing a degree-three vertex that is last in its triangles."""
    n = new_vertex
    around = [(t, vs, es) for t, vs, es in G.tris if n in vs]
    if len(around) != 3 or any(vs[2] != n or n in vs[:2] for _, vs, _ in around):
        raise TriangulationError(f"vertex {n!r} is not a removable degree-three vertex")
    # corners are identified by their spokes; in (x, y, n) the spoke to x is side 1
    less = set()
    for _, vs, es in around:
        less.add((es[1], es[0]))
    spokes = sorted({s for _, _, es in around for s in es[:2]}, key=repr)
    if len(spokes) != 3:
        raise TriangulationError(f"vertex {n!r} has a self-glued star")
    cs = sorted(spokes, key=lambda s: sum(1 for x, y in less if y == s))
    tail = {}
    for _, vs, es in around:
        tail[es[1]] = vs[0]
        tail[es[0]] = vs[1]
    ring = []
    faces = []
    for c in cs:
        (U,) = [(t, es) for t, vs, es in around if c not in es[:2]]
        ring.append(U[1][2])
        faces.append((U[0], False))
    T = name or f"{n}-"
    faces.append((T, True))
    vs = tuple(tail[c] for c in cs)
    return SurfaceStep("unstellar", tuple(faces), G.replace_tris([t for t, _, _ in around], [(T, vs, tuple(ring))]))


def apply_surface_step(G: DeltaSurface, step: tuple) -> SurfaceStep:
    kind = step[0]
    if kind == "flip":
        return flip_step(G, step[1], *step[2:])
    if kind == "stellar":
        return stellar_step(G, step[1], step[2])
    if kind == "unstellar":
        return unstellar_step(G, step[1], *step[2:])
    raise TriangulationError(f"unknown surface step {step!r}")


def from_faces(tets: Sequence[Sequence[Hashable]], markers: dict, name: str = "") -> Triangulation:
    """Ordered Delta-complex from tetrahedra given by face names (opposite slots 0..3).

    A face name used twice is glued order-preservingly; a face name used once
    must have a boundary marker.
    """
    occ: dict = {}
    for t, fs in enumerate(tets):
        if len(fs) != 4:
            raise TriangulationError(f"tetrahedron {t} needs four faces")
        for i, f in enumerate(fs):
            occ.setdefault(f, []).append((t, i))
    gl = {}
    bnd = {}
    for f, where in occ.items():
        if len(where) == 2:
            (t1, i1), (t2, i2) = where
            perm = [0] * 4
            for x, y in zip(FACE[i1], FACE[i2]):
                perm[x] = y
            perm[i1] = i2
            gl[(t1, i1)] = (t2, i2, tuple(perm))
            inv = [0] * 4
            for x in range(4):
                inv[perm[x]] = x
            gl[(t2, i2)] = (t1, i1, tuple(inv))
        elif len(where) == 1:
            if f not in markers:
                raise TriangulationError(f"face {f!r} is unglued and unmarked")
            bnd[where[0]] = markers[f]
        else:
            raise TriangulationError(f"face {f!r} used {len(where)} times")
    return Triangulation([tuple(fs) for fs in tets], gl, bnd, 1, name)


def _prism_faces(G: DeltaSurface, lo, hi) -> list[tuple]:
    """Staircase prisms over every triangle between levels ``lo`` and ``hi``."""
    tets = []
    for t, vs, es in G.tris:
        bot, top = ("t", lo, t), ("t", hi, t)
        ql = lambda k: ("ql", lo, es[k])  # noqa: E731  [L_i, L_j, H_j]
        qh = lambda k: ("qh", lo, es[k])  # noqa: E731  [L_i, H_i, H_j]
        i1, i2 = ("i1", lo, t), ("i2", lo, t)
        tets.append((ql(0), ql(1), i1, bot))
        tets.append((qh(0), i2, i1, ql(2)))
        tets.append((top, i2, qh(1), qh(2)))
    return tets


def surface_cylinder(G: DeltaSurface, steps: Sequence[tuple] = (), name: str = "") -> tuple[Triangulation, DeltaSurface]:
    """Triangulation of Sigma x [0, 1] from ``G`` (in) to ``G`` moved by ``steps`` (out)."""
    G.check()
    if not steps:
        tets = _prism_faces(G, "in", "out")
        top = G
    else:
        tets = _prism_faces(G, "in", "mid")
        cur = G
        for st in steps:
            s = apply_surface_step(cur, st)
            tets.append(tuple(("t", "mid", f) for f, _ in s.faces))
            cur = s.result
        tets += _prism_faces(cur, "mid", "out")
        top = cur
    markers = {("t", "in", t): G.marker("in", t) for t, _, _ in G.tris}
    markers.update({("t", "out", t): top.marker("out", t) for t, _, _ in top.tris})
    tri = from_faces(tets, markers, name=name or f"cylinder({G.name})")
    tri.check()
    # orient the cylinder so that the in-boundary carries G's orientation
    # reversed (outward normal convention), then read off the top orientation
    want = G.orientation()
    sig = tri.orientation_signs()
    (t0, i0), m0 = next((k, m) for k, m in sorted(tri.boundary.items()) if m[0] == "in")
    if -sig[t0] * (-1) ** i0 != want[m0[1]]:
        tri.first_sign = -tri.first_sign
        sig = tri.orientation_signs()
    top_orient = {}
    for (t, i), m in tri.boundary.items():
        s = sig[t] * (-1) ** i
        if m[0] == "in" and -s != want[m[1]]:
            raise TriangulationError("in-boundary orientation is inconsistent")
        if m[0] == "out":
            top_orient[m[1]] = s
    return tri, top.with_orientation(top_orient)

def glue_ends(tri: Triangulation, name: str = "") -> Triangulation:
    """Glue the out-boundary of a cylinder to its in-boundary along matching keys."""
    ins = {}
    outs = {}
    for (t, i), m in tri.boundary.items():
        (ins if m[0] == "in" else outs)[m[1]] = (t, i)
    if set(ins) != set(outs):
        raise TriangulationError("in- and out-boundary do not match")
    gl = dict(tri.gluings)
    for key, (t1, i1) in ins.items():
        t2, i2 = outs[key]
        perm = [0] * 4
        for a, b in zip(FACE[i1], FACE[i2]):
            perm[a] = b
        perm[i1] = i2
        gl[(t1, i1)] = (t2, i2, tuple(perm))
        inv = [0] * 4
        for a in range(4):
            inv[perm[a]] = a
        gl[(t2, i2)] = (t1, i1, tuple(inv))
    return Triangulation(list(tri.tets), gl, {}, tri.first_sign, name or tri.name)


def pachner_23(tri: Triangulation, t1: int, face: int) -> Triangulation:
    """2-3 move on a simplicial triangulation across face ``face`` of ``t1``."""
    g = tri.gluings.get((t1, face))
    if g is None:
        raise TriangulationError("face is on the boundary")
    t2, j, _ = g
    A = tri.tets[t1]
    B = tri.tets[t2]
    common = [v for v in A if v in B]
    a = A[face]
    b = B[j]
    if len(common) != 3 or a == b:
        raise TriangulationError("not a simplicial 2-3 site")
    new = [tuple(common[k] for k in range(3) if k != m) + (a, b) for m in range(3)]
    tets = [t for i, t in enumerate(tri.tets) if i not in (t1, t2)] + new
    order = _labels_in_slot_order(tri.tets)
    return Triangulation.simplicial(tets, order, name=tri.name)


def pachner_14(tri: Triangulation, t: int, new_label, position: int) -> Triangulation:
    """1-4 move on a simplicial triangulation; the new vertex is inserted at
    ``position`` in the global vertex order."""
    T = tri.tets[t]
    tets = [x for i, x in enumerate(tri.tets) if i != t]
    for m in range(4):
        tets.append(tuple(T[k] for k in range(4) if k != m) + (new_label,))
    order = _labels_in_slot_order(tri.tets)
    order.insert(position, new_label)
    return Triangulation.simplicial(tets, order, name=tri.name)


def _labels_in_slot_order(tets) -> list:
    """Recover a global vertex order from a simplicial complex's slot orders."""
    succ: dict = {}
    labels = set()
    for t in tets:
        labels.update(t)
        for i in range(4):
            for j in range(i + 1, 4):
                succ.setdefault(t[i], set()).add(t[j])
    out = []
    seen = set()

    def visit(v):
        if v in seen:
            return
        seen.add(v)
        for w in succ.get(v, ()):
            visit(w)
        out.append(v)

    for v in sorted(labels, key=repr):
        visit(v)
    return out[::-1]
