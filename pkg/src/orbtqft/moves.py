"""Local rewrites of skeleta.

Bubble (B), lune (L) and triangle (T) moves and their inverses act on canonical
skeleta through the :class:`Tables` view.  Every move keeps the local order:
new germ lists are sorted by a symbolic order on the corners of the move, and
new 0-strata get their chirality from a straight-line model of the corners
(triangle) or from in/out consistency with the edges they cut (lune).

The unoriented patterns live in ``fixtures/moves/blt_patterns.json``; their
oriented variants are generated by the local order solver.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from collections import deque
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources

import numpy as np

from .orbifold_datum import EDGE_PAIRS, WING_PAIRS
from .skeleton import (
    TRIPLES,
    Flag,
    LocalOrder,
    Skeleton,
    SkeletonError,
    Stratum,
    SurfaceSkeleton,
    Tables,
    apply_order,
    region_cycles,
    region_sides,
    solve_local_order,
)

KINDS = ("B", "B-", "L", "L-", "T", "T-")
INVERSE = {"B": "B-", "B-": "B", "L": "L-", "L-": "L", "T": "T-", "T-": "T"}
# sign of the wing pair in the boundary orientation of a region along a 1-stratum
_WING_SENSE = {(0, 1): 1, (1, 2): 1, (0, 2): -1}


class MoveError(ValueError):
    pass


class StaleSiteError(MoveError):
    pass


@dataclass(frozen=True)
class MoveApplication:
    kind: str
    site: tuple
    variant: int = 0
    host: str = ""

    def to_doc(self) -> dict:
        return {"kind": self.kind, "variant": self.variant, "site": list(self.site)}


def fingerprint(sk: Skeleton) -> str:
    doc = sk.to_doc()
    doc.pop("name", None)
    doc["flags"] = sorted(doc["flags"], key=lambda f: (f["lower"], f["higher"], f["injection"]))
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


def log_hash(log: list) -> str:
    return hashlib.sha256(json.dumps([a.to_doc() for a in log]).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------------
# table helpers


def _copy(T: Tables) -> Tables:
    return Tables(
        dict(T.strata),
        {k: dict(v) for k, v in T.ewings.items()},
        {k: dict(v) for k, v in T.vwings.items()},
        {k: dict(v) for k, v in T.vends.items()},
        {k: dict(v) for k, v in T.eends.items()},
        T.name,
    )


class _Ids:
    def __init__(self, T: Tables):
        self.n = T.next_id()

    def __call__(self) -> int:
        self.n += 1
        return self.n - 1


def _drop(T: Tables, *ids: int) -> None:
    for i in ids:
        T.strata.pop(i, None)
        T.ewings.pop(i, None)
        T.vwings.pop(i, None)
        T.vends.pop(i, None)
        T.eends.pop(i, None)


def _set_end(T: Tables, e: int, end: int, v: int, k: int) -> None:
    T.eends.setdefault(e, {})[end] = (v, k)
    T.vends.setdefault(v, {})[k] = (e, end)


def _direction(T: Tables, v: int, k: int) -> int:
    """+1 if the 1-stratum ending at (v, k) points into v."""
    return 1 if T.strata[v].sign * (-1) ** k == -1 else -1


def _arc_direction(T: Tables, e: int) -> int:
    for end, (v, k) in T.eends[e].items():
        into = _direction(T, v, k) == 1
        return (1 if into else -1) * (1 if end == 1 else -1)
    return 0


def _consistent(T: Tables, e: int) -> bool:
    ends = T.eends.get(e, {})
    if len(ends) < 2:
        return True
    (v0, k0), (v1, k1) = ends[0], ends[1]
    return _direction(T, v0, k0) != _direction(T, v1, k1)


def _det(points) -> int:
    p = np.asarray(points, dtype=float)
    return 1 if np.linalg.det(p[1:] - p[0]) > 0 else -1


_TRI = [np.array([np.cos(t), np.sin(t), 0.0]) for t in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)]
_UP, _DOWN = np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])


def _uses(T: Tables) -> dict[int, int]:
    """Number of germ references to each 3-stratum from lower strata."""
    out: dict[int, int] = {}
    for s in T.strata.values():
        if s.dim < 3:
            for g in s.germs:
                out[g] = out.get(g, 0) + 1
    return out


# ---------------------------------------------------------------------------------
# bubble


def _bubble(T: Tables, r: int, variant: int) -> None:
    ids = _Ids(T)
    R = T.strata[r]
    A, C = R.germs
    B, c, D, D2 = ids(), ids(), ids(), ids()
    order = [["B", "A", "C"], ["A", "B", "C"], ["A", "C", "B"]][variant]
    ball = {"A": A, "B": B, "C": C}
    region = {frozenset("AC"): r, frozenset("AB"): D, frozenset("BC"): D2}
    T.strata[B] = Stratum(B, 3, (B,), chi=1, ball_certified=True)
    for rid, pair in ((D, "AB"), (D2, "BC")):
        germs = tuple(ball[x] for x in sorted(pair, key=order.index))
        T.strata[rid] = Stratum(rid, 2, germs, chi=1)
    T.strata[r] = replace(R, chi=R.chi - 1)
    T.strata[c] = Stratum(c, 1, tuple(ball[x] for x in order), chi=0, circle=True)
    T.ewings[c] = {p: region[frozenset((order[p[0]], order[p[1]]))] for p in EDGE_PAIRS}
    T.eends[c] = {}


def _bubble_sites(T: Tables) -> list[tuple[tuple, int]]:
    return [((r,), v) for r in sorted(i for i, s in T.strata.items() if s.dim == 2) for v in range(3)]


def _unbubble_slot(T: Tables, c: int, uses: dict[int, int]) -> int | None:
    e = T.strata[c]
    if not e.circle:
        return None
    w = T.ewings[c]
    for beta in range(3):
        b = e.germs[beta]
        if e.germs.count(b) != 1 or T.strata[b].bnd:
            continue
        pairs = [p for p in EDGE_PAIRS if beta in p]
        discs = [w[p] for p in pairs]
        (rest,) = [p for p in EDGE_PAIRS if beta not in p]
        if discs[0] == discs[1] or w[rest] in discs:
            continue
        if uses.get(b, 0) != 3:
            continue
        ok = True
        for d in discs:
            st = T.strata[d]
            if st.chi != 1 or st.bnd or region_sides(T, d) != [(c, pairs[discs.index(d)])]:
                ok = False
        if ok:
            return beta
    return None


def _unbubble(T: Tables, c: int, beta: int) -> None:
    e = T.strata[c]
    w = T.ewings[c]
    discs = [w[p] for p in EDGE_PAIRS if beta in p]
    (rest,) = [p for p in EDGE_PAIRS if beta not in p]
    r = w[rest]
    T.strata[r] = replace(T.strata[r], chi=T.strata[r].chi + 1)
    _drop(T, c, e.germs[beta], *discs)


def _unbubble_sites(T: Tables) -> list[tuple[tuple, int]]:
    uses = _uses(T)
    out = []
    for c in sorted(i for i, s in T.strata.items() if s.dim == 1 and s.circle):
        beta = _unbubble_slot(T, c, uses)
        if beta is not None:
            out.append(((c,), beta))
    return out


# ---------------------------------------------------------------------------------
# triangle (dual 2-3) and its inverse


def _triangle_plan(T: Tables, e: int):
    """Corner data for a 2-3 move on the arc ``e`` or None."""
    st = T.strata[e]
    if st.circle or len(T.eends.get(e, {})) != 2:
        return None
    (u, ku), (w, kw) = T.eends[e][0], T.eends[e][1]
    if u == w:
        return None
    return u, ku, w, kw


def _triangle(T: Tables, e: int, variant: int) -> None:
    plan = _triangle_plan(T, e)
    if plan is None:
        raise MoveError(f"1-stratum {e} is not a triangle site")
    u, ku, w, kw = plan
    ids = _Ids(T)
    S = T.strata
    # corners: "a" apex of u, "b" apex of w, 0 1 2 the germs of e
    key = {0: 1.0, 1: 3.0, 2: 5.0, "a": 2.0 * ku, "b": 2.0 * kw}
    if ku == kw:
        key["b"] += 0.5 if variant == 0 else -0.5
    elif variant != 0:
        raise MoveError("this triangle site has a single variant")
    ball = {"a": S[u].germs[ku], "b": S[w].germs[kw], 0: S[e].germs[0], 1: S[e].germs[1], 2: S[e].germs[2]}
    point = {"a": _UP, "b": _DOWN, 0: _TRI[0], 1: _TRI[1], 2: _TRI[2]}

    def pos(apex_k: int, i: int) -> int:
        return i if i < apex_k else i + 1

    def lam(v, apex, apex_k):
        syms = [None] * 4
        syms[apex_k] = apex
        for i in range(3):
            syms[pos(apex_k, i)] = i
        return S[v].sign * _det([point[x] for x in syms])

    lam_u, lam_w = lam(u, "a", ku), lam(w, "b", kw)
    if lam_u != lam_w:
        raise MoveError(f"triangle site {e}: end orientations disagree")
    delta = ids()

    def region(x, y):
        s = {x, y}
        if s == {"a", "b"}:
            return delta
        if "a" in s or "b" in s:
            apex = "a" if "a" in s else "b"
            (i,) = s - {apex}
            v, k = (u, ku) if apex == "a" else (w, kw)
            return T.vwings[v][tuple(sorted((k, pos(k, i))))]
        i, j = sorted(s)
        return T.ewings[e][(i, j)]

    newv = {i: ids() for i in range(3)}
    newe = {i: ids() for i in range(3)}
    moved = []
    for i in range(3):
        syms = sorted({"a", "b", 0, 1, 2} - {i}, key=key.get)
        v = newv[i]
        S[v] = Stratum(v, 0, tuple(ball[x] for x in syms), sign=lam_u * _det([point[x] for x in syms]))
        T.vwings[v] = {p: region(syms[p[0]], syms[p[1]]) for p in WING_PAIRS}
        T.vends[v] = {}
        for k, x in enumerate(syms):
            if x == "b":
                moved.append((T.vends[u][pos(ku, i)], v, k))
            elif x == "a":
                moved.append((T.vends[w][pos(kw, i)], v, k))
    for l in range(3):
        syms = sorted({"a", "b", l}, key=key.get)
        n = newe[l]
        S[n] = Stratum(n, 1, tuple(ball[x] for x in syms))
        T.ewings[n] = {p: region(syms[p[0]], syms[p[1]]) for p in EDGE_PAIRS}
        T.eends[n] = {}
        for end, i in enumerate(x for x in range(3) if x != l):
            vsyms = sorted({"a", "b", 0, 1, 2} - {i}, key=key.get)
            (omit,) = {0, 1, 2} - {i, l}
            _set_end(T, n, end, newv[i], vsyms.index(omit))
    ab = sorted(("a", "b"), key=key.get)
    S[delta] = Stratum(delta, 2, tuple(ball[x] for x in ab), chi=1)
    for (oe, oend), v, k in moved:
        _set_end(T, oe, oend, v, k)
    _drop(T, e, u, w)
    for n in newe.values():
        if not _consistent(T, n):
            raise MoveError(f"triangle site {e}: new 1-stratum {n} is inconsistent")


def _triangle_sites(T: Tables) -> list[tuple[tuple, int]]:
    out = []
    for e in sorted(i for i, s in T.strata.items() if s.dim == 1):
        plan = _triangle_plan(T, e)
        if plan is None:
            continue
        u, ku, w, kw = plan
        out.append(((e,), 0))
        if ku == kw:
            out.append(((e,), 1))
    return out


def _untriangle_plan(T: Tables, d: int):
    st = T.strata[d]
    if st.dim != 2 or st.chi != 1 or st.bnd:
        return None
    try:
        cycles = region_cycles(T, d)
    except SkeletonError:
        return None
    if len(cycles) != 1 or len(cycles[0]) != 3:
        return None
    cyc = cycles[0]
    edges = [c[0] for c in cyc]
    if len(set(edges)) != 3 or any(x == -1 for _, _, x in cyc):
        return None
    verts = [T.eends[e][x][0] for e, _, x in cyc]
    if len(set(verts)) != 3:
        return None
    # corners: "p" and "q" the germs of d (lower, upper); 0 1 2 name the cycle edges
    S = T.strata
    corners = {}  # vertex index -> list of 4 symbols by position
    for i, (e, p, x) in enumerate(cyc):
        v, k = T.eends[e][x]
        tri = TRIPLES[k]
        vp = (tri[p[0]], tri[p[1]])
        nxt = (i + 1) % 3
        third = 3 - i - nxt
        syms = [None] * 4
        syms[vp[0]], syms[vp[1]] = "p", "q"
        syms[k] = nxt  # the edge i omits corner nxt at this vertex
        (rest,) = [j for j in range(4) if syms[j] is None]
        syms[rest] = i
        e2, p2, x2 = cyc[nxt]
        if T.vends[v].get(rest) is None or T.vends[v][rest][0] != e2:
            return None
        corners[third] = syms
    # the corner i sits in vertices other than corners[i]
    rel = set()
    ball = {}
    for r, syms in corners.items():
        v = verts[(r + 1) % 3]
        for a, b in itertools.combinations(range(4), 2):
            rel.add((syms[a], syms[b]))
        for j, x in enumerate(syms):
            if ball.setdefault(x, S[v].germs[j]) != S[v].germs[j]:
                return None
    for a, b in rel:
        if (b, a) in rel:
            return None
    symbols = ["p", "q", 0, 1, 2]
    rank = {x: sum(1 for y in symbols if (y, x) in rel) for x in symbols}
    if sorted(rank.values()) != list(range(5)):
        return None
    point = {"p": _UP, "q": _DOWN, 0: _TRI[0], 1: _TRI[1], 2: _TRI[2]}
    lams = {S[verts[(r + 1) % 3]].sign * _det([point[x] for x in syms]) for r, syms in corners.items()}
    if len(lams) != 1:
        return None
    return cyc, verts, corners, rank, ball, lams.pop()


def _untriangle(T: Tables, d: int) -> None:
    plan = _untriangle_plan(T, d)
    if plan is None:
        raise MoveError(f"2-stratum {d} is not an inverse triangle site")
    cyc, verts, corners, rank, ball, lam = plan
    S = T.strata
    ids = _Ids(T)
    vert_of = {r: verts[(r + 1) % 3] for r in corners}
    point = {"p": _UP, "q": _DOWN, 0: _TRI[0], 1: _TRI[1], 2: _TRI[2]}

    def region(x, y):
        for r, syms in corners.items():
            if x in syms and y in syms:
                return T.vwings[vert_of[r]][tuple(sorted((syms.index(x), syms.index(y))))]
        raise MoveError("corner pair missing")

    e = ids()
    u, w = ids(), ids()
    moved = []
    for v, apex, other in ((u, "p", "q"), (w, "q", "p")):
        syms = sorted({apex, 0, 1, 2}, key=rank.get)
        S[v] = Stratum(v, 0, tuple(ball[x] for x in syms), sign=lam * _det([point[x] for x in syms]))
        T.vwings[v] = {p: region(syms[p[0]], syms[p[1]]) for p in WING_PAIRS}
        T.vends[v] = {}
        for k, x in enumerate(syms):
            if x != apex:
                # face {apex, others minus x} lies in the old vertex omitting ``other``
                src = vert_of[x]
                moved.append((T.vends[src][corners[x].index(other)], v, k))
    esyms = sorted((0, 1, 2), key=rank.get)
    S[e] = Stratum(e, 1, tuple(ball[x] for x in esyms))
    T.ewings[e] = {p: region(esyms[p[0]], esyms[p[1]]) for p in EDGE_PAIRS}
    T.eends[e] = {}
    for end, (v, apex) in enumerate(((u, "p"), (w, "q"))):
        syms = sorted({apex, 0, 1, 2}, key=rank.get)
        _set_end(T, e, end, v, syms.index(apex))
    for (oe, oend), v, k in moved:
        _set_end(T, oe, oend, v, k)
    _drop(T, d, *[c[0] for c in cyc], *verts)
    if not _consistent(T, e):
        raise MoveError(f"inverse triangle at {d}: merged 1-stratum is inconsistent")


def _untriangle_sites(T: Tables) -> list[tuple[tuple, int]]:
    return [((d,), 0) for d in sorted(i for i, s in T.strata.items() if s.dim == 2) if _untriangle_plan(T, d)]


# ---------------------------------------------------------------------------------
# lune (dual 0-2) and its inverse


def _cycle_sense(T: Tables, cyc) -> int:
    e, p, x = cyc[0]
    if x == -1:
        return 0
    return _arc_direction(T, e) * _WING_SENSE[p] * (1 if x == 1 else -1)


def _lune_plan(T: Tables, r: int, ea: int, eb: int):
    S = T.strata
    R = S[r]
    if R.dim != 2 or R.bnd or ea == eb or S[ea].dim != 1 or S[eb].dim != 1:
        return None
    if S[ea].circle and S[eb].circle:
        return None
    pa = [p for p, x in T.ewings[ea].items() if x == r]
    pb = [p for p, x in T.ewings[eb].items() if x == r]
    if len(pa) != 1 or len(pb) != 1:
        return None
    try:
        cycles = region_cycles(T, r)
    except SkeletonError:
        return None
    where = {}
    for ci, cyc in enumerate(cycles):
        for si, (e, p, x) in enumerate(cyc):
            where[(e, p)] = (ci, si, x)
    ca, ia, xa = where[(ea, pa[0])]
    cb, ib, xb = where[(eb, pb[0])]
    same = ca == cb
    if same and (R.chi != 1 or len(cycles) != 1):
        return None
    if not same:
        sa, sb = _cycle_sense(T, cycles[ca]), _cycle_sense(T, cycles[cb])
        if sa == -1:
            xa = 1 - xa
        if sb == -1:
            xb = 1 - xb
    return {"pa": pa[0], "pb": pb[0], "fa": xa, "fb": xb, "same": same, "cycle": cycles[ca], "ia": ia, "ib": ib}


def _lune_variants(T: Tables, ea: int, pa, eb: int, pb) -> int:
    (ma,) = {0, 1, 2} - set(pa)
    (mb,) = {0, 1, 2} - set(pb)
    return 2 if ma == mb else 1


def _lune(T: Tables, r: int, ea: int, eb: int, variant: int) -> None:
    plan = _lune_plan(T, r, ea, eb)
    if plan is None:
        raise MoveError(f"no lune site at {(r, ea, eb)}")
    S = T.strata
    ids = _Ids(T)
    pa, pb = plan["pa"], plan["pb"]
    (ma,) = {0, 1, 2} - set(pa)
    (mb,) = {0, 1, 2} - set(pb)
    key = {"x": 1.0, "y": 3.0, "z": 2.0 * ma, "w": 2.0 * mb}
    if ma == mb:
        key["w"] += 0.5 if variant == 0 else -0.5
    elif variant != 0:
        raise MoveError("this lune site has a single variant")
    R = S[r]
    ball = {"x": R.germs[0], "y": R.germs[1], "z": S[ea].germs[ma], "w": S[eb].germs[mb]}
    slot_a = {"x": pa[0], "y": pa[1], "z": ma}
    slot_b = {"x": pb[0], "y": pb[1], "w": mb}
    r1 = ids() if plan["same"] else r
    r2 = r
    D = ids()
    syms = sorted("xyzw", key=key.get)

    def region(x, y, top):
        s = {x, y}
        if s == {"x", "y"}:
            return r1 if top else r2
        if s == {"z", "w"}:
            return D
        if "z" in s:
            return T.ewings[ea][tuple(sorted(slot_a[c] for c in s))]
        return T.ewings[eb][tuple(sorted(slot_b[c] for c in s))]

    # split the region along the chord
    if plan["same"]:
        cyc, ia, ib = plan["cycle"], plan["ia"], plan["ib"]
        n = len(cyc)
        i = ia
        while True:
            e, p, x = cyc[i]
            v, k = T.eends[e][x]
            tri = TRIPLES[k]
            T.vwings[v][(tri[p[0]], tri[p[1]])] = r1
            i = (i + 1) % n
            if i == ib:
                break
            T.ewings[cyc[i][0]][cyc[i][1]] = r1
        S[r1] = replace(R, id=r1, chi=1)
        S[r2] = replace(R, chi=1)
    else:
        S[r] = replace(R, chi=R.chi + 1)
    t1, t2 = ids(), ids()
    for t in (t1, t2):
        S[t] = Stratum(t, 0, tuple(ball[x] for x in syms), sign=1)
        T.vwings[t] = {p: region(syms[p[0]], syms[p[1]], t == t1) for p in WING_PAIRS}
        T.vends[t] = {}
    kz, kw = syms.index("w"), syms.index("z")  # omitted slot for ea pieces / eb pieces

    # pieces of ea and eb: the forward piece of ea and the backward piece of eb meet t1
    def split(e, fwd, k, top_fwd):
        st = S[e]
        if st.circle:
            S[e] = replace(st, circle=False, chi=1)
            T.eends[e] = {}
            _set_end(T, e, 0, t1, k)
            _set_end(T, e, 1, t2, k)
            return None
        other = ids()
        wings = dict(T.ewings[e])
        S[other] = replace(st, id=other)
        back = 1 - fwd
        far_v, far_k = T.eends[e][back]
        # ``e`` keeps its forward end; ``other`` takes the backward end
        T.eends[other] = {}
        T.ewings[other] = dict(wings)
        _set_end(T, other, back, far_v, far_k)
        near_fwd, near_back = (t1, t2) if top_fwd else (t2, t1)
        T.eends[e].pop(back)
        _set_end(T, e, back, near_fwd, k)
        _set_end(T, other, fwd, near_back, k)
        for pcs, t in ((e, near_fwd), (other, near_back)):
            for p, x in T.ewings[pcs].items():
                if x == r:
                    T.ewings[pcs][p] = r1 if t == t1 else r2
        return (e, back), (other, back)

    kept = []
    sa = split(ea, plan["fa"], kz, True)
    sb = split(eb, 1 - plan["fb"], kw, True)
    for piece in (sa, sb):
        if piece is not None:
            kept.append(piece[0])
    # chirality of t1 from the first kept far end
    (e0, end0) = kept[0]
    far = 1 - end0
    fv, fk = T.eends[e0][far]
    k_t1 = T.eends[e0][end0][1]
    want = -_direction(T, fv, fk)  # direction at t1 must be opposite
    s1 = 1 if (want == -1) == ((-1) ** k_t1 == 1) else -1
    S[t1] = replace(S[t1], sign=s1)
    S[t2] = replace(S[t2], sign=-s1)
    for c, omit in (("x", "y"), ("y", "x")):
        n = ids()
        es = sorted({c, "z", "w"}, key=key.get)
        S[n] = Stratum(n, 1, tuple(ball[x] for x in es))
        T.ewings[n] = {p: region(es[p[0]], es[p[1]], True) for p in EDGE_PAIRS}
        T.eends[n] = {}
        _set_end(T, n, 0, t1, syms.index(omit))
        _set_end(T, n, 1, t2, syms.index(omit))
    zw = sorted("zw", key=key.get)
    S[D] = Stratum(D, 2, tuple(ball[x] for x in zw), chi=1)
    bad = [e for e in T.eends if e in S and not _consistent(T, e)]
    if bad:
        raise MoveError(f"lune at {(r, ea, eb)}: inconsistent 1-strata {bad}")


def _lune_sites(T: Tables) -> list[tuple[tuple, int]]:
    out = []
    for r in sorted(i for i, s in T.strata.items() if s.dim == 2 and not s.bnd):
        edges = sorted({e for e, _ in region_sides(T, r)})
        for ea, eb in itertools.combinations(edges, 2):
            plan = _lune_plan(T, r, ea, eb)
            if plan is None:
                continue
            for v in range(_lune_variants(T, ea, plan["pa"], eb, plan["pb"])):
                out.append(((r, ea, eb), v))
    return out


def _unlune_plan(T: Tables, d: int):
    S = T.strata
    st = S[d]
    if st.dim != 2 or st.chi != 1 or st.bnd:
        return None
    try:
        cycles = region_cycles(T, d)
    except SkeletonError:
        return None
    if len(cycles) != 1 or len(cycles[0]) != 2:
        return None
    (s1, p1, x1), (s2, p2, x2) = cycles[0]
    if s1 == s2 or x1 == -1:
        return None
    t1, k1 = T.eends[s1][x1]
    t2, k2 = T.eends[s2][x2]
    if t1 == t2 or S[t1].sign != -S[t2].sign or S[t1].germs != S[t2].germs:
        return None
    tri = TRIPLES[k1]
    zw = (tri[p1[0]], tri[p1[1]])
    xy = tuple(sorted(set(range(4)) - set(zw)))
    for p in WING_PAIRS:
        if p != xy and T.vwings[t1][p] != T.vwings[t2][p]:
            return None
    if T.vwings[t1][zw] != d:
        return None
    # the two s-edges join t1 and t2 at the same slot
    for s in (s1, s2):
        ends = T.eends[s]
        if {ends[0][0], ends[1][0]} != {t1, t2} or ends[0][1] != ends[1][1]:
            return None
    pieces = {}
    for name, k in (("a", zw[1]), ("b", zw[0])):
        e1, end1 = T.vends[t1][k]
        e2, end2 = T.vends[t2][k]
        pieces[name] = (e1, end1, e2, end2, k)
    ea = {pieces["a"][0], pieces["a"][2]}
    eb = {pieces["b"][0], pieces["b"][2]}
    if ea & eb or ea & {s1, s2} or eb & {s1, s2}:
        return None
    if len(ea) == 1 and len(eb) == 1:
        return None
    r1, r2 = T.vwings[t1][xy], T.vwings[t2][xy]
    if S[r1].bnd or S[r2].bnd:
        return None
    for e1, end1, e2, end2, k in pieces.values():
        if e1 != e2:
            if S[e1].germs != S[e2].germs:
                return None
            for p in EDGE_PAIRS:
                a, b = T.ewings[e1][p], T.ewings[e2][p]
                if a != b and {a, b} != {r1, r2}:
                    return None
    return {"t1": t1, "t2": t2, "s": (s1, s2), "pieces": pieces, "r1": r1, "r2": r2}


def _unlune(T: Tables, d: int) -> None:
    plan = _unlune_plan(T, d)
    if plan is None:
        raise MoveError(f"2-stratum {d} is not an inverse lune site")
    S = T.strata
    t1, t2, r1, r2 = plan["t1"], plan["t2"], plan["r1"], plan["r2"]
    for e1, end1, e2, end2, k in plan["pieces"].values():
        if e1 == e2:
            S[e1] = replace(S[e1], circle=True, chi=0)
            T.eends[e1] = {}
            continue
        far2 = T.eends[e2][1 - end2]
        T.eends[e1].pop(end1)
        T.vends[far2[0]].pop(far2[1], None)
        _set_end(T, e1, end1, far2[0], far2[1])
        _drop(T, e2)
    if r1 != r2:
        for w in itertools.chain(T.ewings.values(), T.vwings.values()):
            for p, x in w.items():
                if x == r2:
                    w[p] = r1
        S[r1] = replace(S[r1], chi=S[r1].chi + S[r2].chi - 1)
        _drop(T, r2)
    else:
        S[r1] = replace(S[r1], chi=S[r1].chi - 1)
    _drop(T, d, t1, t2, *plan["s"])
    for e in list(T.eends):
        T.eends[e] = {end: vk for end, vk in T.eends[e].items() if vk[0] in S}


def _unlune_sites(T: Tables) -> list[tuple[tuple, int]]:
    return [((d,), 0) for d in sorted(i for i, s in T.strata.items() if s.dim == 2) if _unlune_plan(T, d)]


# ---------------------------------------------------------------------------------
# public interface

_SITES = {
    "B": _bubble_sites, "B-": _unbubble_sites,
    "T": _triangle_sites, "T-": _untriangle_sites,
    "L": _lune_sites, "L-": _unlune_sites,
}


def _tables(sk: Skeleton) -> Tables:
    if not sk.canonical:
        raise MoveError("moves act on locally ordered (canonical) skeleta")
    return Tables.of(sk)


def find_sites(sk: Skeleton, kind: str) -> list[MoveApplication]:
    """All applications of ``kind`` to ``sk`` in lexicographic order of anchors."""
    if kind not in _SITES:
        raise MoveError(f"unknown move kind {kind!r}; known: {KINDS}")
    T = _tables(sk)
    host = fingerprint(sk)
    return [MoveApplication(kind, site, v, host) for site, v in _SITES[kind](T)]


def apply(sk: Skeleton, app: MoveApplication, check: bool = True) -> Skeleton:
    """Rewrite ``sk`` at ``app``; returns a new skeleton."""
    if app.host and app.host != fingerprint(sk):
        raise StaleSiteError(f"site {app.to_doc()} was found on a different host")
    T = _copy(_tables(sk))
    if (tuple(app.site), app.variant) not in _SITES[app.kind](T):
        raise StaleSiteError(f"site {app.to_doc()} is not available on this host")
    k, s = app.kind, app.site
    if k == "B":
        _bubble(T, s[0], app.variant)
    elif k == "B-":
        _unbubble(T, s[0], app.variant)
    elif k == "T":
        _triangle(T, s[0], app.variant)
    elif k == "T-":
        _untriangle(T, s[0])
    elif k == "L":
        _lune(T, s[0], s[1], s[2], app.variant)
    else:
        _unlune(T, s[0])
    out = T.to_skeleton()
    out.name = sk.name
    if check:
        from .skeleton import validate

        rep = validate(out)
        if not rep.ok:
            raise MoveError(f"move {app.to_doc()} produced an invalid skeleton: {rep.violations[0]}")
    return out


def random_walk(sk: Skeleton, n: int, seed: int = 0, kinds=KINDS, max_size: int | None = None):
    """Apply ``n`` random moves: a kind uniformly among those with sites, then a
    site uniformly.  Returns the final skeleton and the move log."""
    rng = random.Random(seed)
    log: list[MoveApplication] = []
    cur = sk
    for _ in range(n):
        options = {}
        for k in kinds:
            if max_size is not None and k in ("B", "L", "T") and len(cur.strata) >= max_size:
                continue
            sites = find_sites(cur, k)
            if sites:
                options[k] = sites
        if not options:
            break
        k = rng.choice(sorted(options))
        app = rng.choice(options[k])
        cur = apply(cur, app)
        log.append(app)
    return cur, log


def replay(sk: Skeleton, log) -> Skeleton:
    cur = sk
    for a in log:
        if isinstance(a, dict):
            a = MoveApplication(a["kind"], tuple(a["site"]), int(a.get("variant", 0)))
        cur = apply(cur, replace(a, host=""))
    return cur


def log_to_json(log) -> str:
    return json.dumps([a.to_doc() for a in log])


def log_from_json(text: str) -> list[MoveApplication]:
    return [MoveApplication(d["kind"], tuple(d["site"]), int(d.get("variant", 0))) for d in json.loads(text)]


# ---------------------------------------------------------------------------------
# pattern table and oriented variants

PATTERN_KINDS = ("B", "L", "T")


@lru_cache(maxsize=1)
def pattern_table() -> dict:
    path = resources.files("orbtqft").joinpath("fixtures", "moves", "blt_patterns.json")
    return json.loads(path.read_text())


@dataclass(frozen=True)
class PatternSide:
    skeleton: Skeleton  # germs listed in label order (not canonical)
    ids: dict  # stratum name -> id
    interface: dict  # 2-stratum id -> shared boundary key
    labels: dict  # 3-stratum id -> label


def pattern_side(doc: dict, points: dict | None = None) -> PatternSide:
    ids: dict = {}
    nxt = itertools.count()
    strata, flags = [], []
    for lab in doc["balls"]:
        ids[("ball", lab)] = next(nxt)
    for name in doc["regions"]:
        ids[("region", name)] = next(nxt)
    for name in doc["edges"]:
        ids[("edge", name)] = next(nxt)
    for name in doc["vertices"]:
        ids[("vertex", name)] = next(nxt)
    ball = {lab: ids[("ball", lab)] for lab in doc["balls"]}
    for lab, b in doc["balls"].items():
        strata.append(Stratum(ball[lab], 3, (ball[lab],), chi=1, boundary_chi=b["boundary_chi"],
                              ball_certified=True, bnd=(("pattern", lab),) if b["boundary_chi"] else ()))
    interface = {}
    for name, r in doc["regions"].items():
        rid = ids[("region", name)]
        bnd = ()
        if "interface" in r:
            interface[rid] = r["interface"]
            bnd = (("pattern", r["interface"]),)
        strata.append(Stratum(rid, 2, tuple(ball[g] for g in r["germs"]), chi=r["chi"],
                              boundary_chi=r["boundary_chi"], bnd=bnd))
    region_germs = {name: r["germs"] for name, r in doc["regions"].items()}

    def wing_flags(lower, germs, wings):
        for _, rname in sorted(wings.items()):
            g = region_germs[rname]
            flags.append(Flag(lower, ids[("region", rname)], (germs.index(g[0]), germs.index(g[1]))))

    ends_used: dict[str, int] = {}
    for name, v in doc["vertices"].items():
        vid = ids[("vertex", name)]
        germs = v["germs"]
        sign = v.get("sign")
        if sign is None:
            sign = _det([points[g] for g in germs])
        strata.append(Stratum(vid, 0, tuple(ball[g] for g in germs), sign=sign))
        wing_flags(vid, germs, v["wings"])
        for _, ename in sorted(v["ends"].items()):
            eg = doc["edges"][ename]["germs"]
            end = ends_used.get(ename, 0)
            ends_used[ename] = end + 1
            flags.append(Flag(vid, ids[("edge", ename)], tuple(germs.index(g) for g in eg), end))
    for name, e in doc["edges"].items():
        eid = ids[("edge", name)]
        used = ends_used.get(name, 0)
        bnd = () if e["circle"] else tuple(("pattern", f"{name}:{k}", k) for k in range(used, 2))
        strata.append(Stratum(eid, 1, tuple(ball[g] for g in e["germs"]), chi=0 if e["circle"] else 1,
                              circle=e["circle"], bnd=bnd))
        wing_flags(eid, e["germs"], e["wings"])
    labels = {b: lab for lab, b in ball.items()}
    return PatternSide(Skeleton(strata, flags, canonical=False), ids, interface, labels)


@dataclass(frozen=True)
class Variant:
    kind: str
    index: int
    orbit: int
    data: tuple  # (lower label, upper label) per interface 2-stratum of the before side
    before: Skeleton  # canonical
    after: Skeleton  # canonical
    before_interface: dict
    after_interface: dict


@dataclass(frozen=True)
class MoveRule:
    kind: str
    before: PatternSide
    after: PatternSide
    automorphisms: tuple
    lhs_orders: int
    orbits: int
    variants: tuple


def _group(gens: list[dict], labels: list) -> list[dict]:
    ident = {x: x for x in labels}
    full = [{x: g.get(x, x) for x in labels} for g in gens]
    group = [ident]
    frontier = [ident]
    while frontier:
        new = []
        for h in frontier:
            for g in full:
                c = {x: g[h[x]] for x in labels}
                if c not in group:
                    group.append(c)
                    new.append(c)
        frontier = new
    return group


def _order_data(side: PatternSide, order: LocalOrder) -> tuple:
    out = []
    for rid in side.interface:
        g = side.skeleton.strata[rid].germs
        lo, hi = (g[0], g[1]) if order[rid] == (0, 1) else (g[1], g[0])
        out.append((side.labels[lo], side.labels[hi]))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def rule(kind: str) -> MoveRule:
    """Oriented variants of an unoriented pattern: orbits of local orders of the
    before side under the pattern automorphisms, each with all admissible
    completions of the after side."""
    doc = pattern_table()[kind]
    points = doc.get("points")
    before = pattern_side(doc["before"], points)
    after = pattern_side(doc["after"], points)
    group = _group(doc["automorphisms"], doc["labels"])
    sols = solve_local_order(before.skeleton)
    keyed = {_order_data(before, o): o for o in sols}

    def image(data, g):
        return tuple(sorted((g[a], g[b]) for a, b in data))

    for data in keyed:
        for g in group:
            if image(data, g) not in keyed:
                raise MoveError(f"pattern {kind}: automorphism does not preserve the admissible orders")
    reps = sorted({min(image(data, g) for g in group) for data in keyed})
    variants = []
    for oi, data in enumerate(reps):
        order = keyed[data]
        low = {}
        for rid in before.interface:
            g = before.skeleton.strata[rid].germs
            lo = g[0] if order[rid] == (0, 1) else g[1]
            low[before.interface[rid]] = before.labels[lo]
        fixed = {}
        for rid, key in after.interface.items():
            g = after.skeleton.strata[rid].germs
            fixed[rid] = 0 if after.labels[g[0]] == low[key] else 1
        for comp in solve_local_order(after.skeleton, fixed=fixed):
            variants.append(Variant(
                kind, len(variants), oi, data,
                apply_order(before.skeleton, order), apply_order(after.skeleton, comp),
                dict(before.interface), dict(after.interface),
            ))
    return MoveRule(kind, before, after, tuple(group), len(sols), len(reps), tuple(variants))


def oriented_variants(kind: str | None = None) -> list[Variant]:
    kinds = PATTERN_KINDS if kind is None else (kind,)
    return [v for k in kinds for v in rule(k).variants]


def variant_counts() -> dict[str, int]:
    return {k: len(rule(k).variants) for k in PATTERN_KINDS}


# ---------------------------------------------------------------------------------
# surface moves: b (bubble on a 1-stratum) and l (dual 2-2 flip)

SURFACE_KINDS = ("b", "b-", "l")


@dataclass
class SurfaceTables:
    """Mutable view of a canonical surface skeleton with numbered arc ends."""

    strata: dict
    eends: dict  # edge -> end -> (vertex, omitted slot)
    vends: dict  # vertex -> omitted slot -> (edge, end)
    name: str = ""

    @classmethod
    def of(cls, ss: SurfaceSkeleton) -> "SurfaceTables":
        if not ss.canonical:
            raise MoveError("surface moves act on locally ordered surface skeleta")
        strata = dict(ss.strata)
        eends: dict = {e.id: {} for e in ss.of_dim(1)}
        vends: dict = {v.id: {} for v in ss.of_dim(0)}
        for f in sorted(ss.flags, key=lambda f: (repr(f.higher), repr(f.lower), f.injection)):
            (k,) = set(range(3)) - set(f.injection)
            end = len(eends[f.higher])
            eends[f.higher][end] = (f.lower, k)
            vends[f.lower][k] = (f.higher, end)
        T = cls(strata, eends, vends, ss.name)
        if any(strata[v].sign == 0 for v in vends):
            T._propagate_signs()
        return T

    def _propagate_signs(self) -> None:
        S = self.strata
        sign: dict = {}
        for start in sorted(self.vends, key=repr):
            if start in sign:
                continue
            sign[start] = 1
            stack = [start]
            while stack:
                v = stack.pop()
                for k, (e, end) in self.vends[v].items():
                    if 1 - end not in self.eends[e]:
                        continue
                    v2, k2 = self.eends[e][1 - end]
                    want = -sign[v] * (-1) ** k * (-1) ** k2
                    if v2 not in sign:
                        sign[v2] = want
                        stack.append(v2)
                    elif sign[v2] != want:
                        raise MoveError("surface skeleton is not consistently oriented")
        for v, s in sign.items():
            S[v] = replace(S[v], sign=s)

    def copy(self) -> "SurfaceTables":
        return SurfaceTables(dict(self.strata), {k: dict(v) for k, v in self.eends.items()},
                             {k: dict(v) for k, v in self.vends.items()}, self.name)

    def fresh(self, prefix: str) -> str:
        i = len(self.strata)
        while f"{prefix}{i}" in self.strata:
            i += 1
        name = f"{prefix}{i}"
        self.strata[name] = None
        return name

    def set_end(self, e, end, v, k) -> None:
        self.eends.setdefault(e, {})[end] = (v, k)
        self.vends.setdefault(v, {})[k] = (e, end)

    def direction(self, v, k) -> int:
        return 1 if self.strata[v].sign * (-1) ** k == -1 else -1

    def consistent(self) -> bool:
        for e, ends in self.eends.items():
            if len(ends) == 2 and self.direction(*ends[0]) == self.direction(*ends[1]):
                return False
        return True

    def to_skeleton(self) -> SurfaceSkeleton:
        flags = []
        for v, ends in self.vends.items():
            for k, (e, _) in ends.items():
                flags.append(Flag(v, e, tuple(i for i in range(3) if i != k)))
        return SurfaceSkeleton([s for s in self.strata.values() if s is not None], flags, canonical=True,
                               name=self.name)


def _s_bubble(T: SurfaceTables, e, variant: int) -> None:
    S = T.strata
    A, C = S[e].germs
    B = T.fresh("f")
    v1, v2 = T.fresh("v"), T.fresh("v")
    fab, fbc = T.fresh("e"), T.fresh("e")
    order = [["B", "A", "C"], ["A", "B", "C"], ["A", "C", "B"]][variant]
    ball = {"A": A, "B": B, "C": C}
    germs = tuple(ball[x] for x in order)
    S[B] = Stratum(B, 2, (B,), chi=1)
    kB, kC, kA = order.index("B"), order.index("C"), order.index("A")
    for n, pair in ((fab, "AB"), (fbc, "BC")):
        S[n] = Stratum(n, 1, tuple(ball[x] for x in sorted(pair, key=order.index)), chi=1)
    if S[e].circle:
        s1 = 1
        S[e] = replace(S[e], circle=False)
        T.eends[e] = {}
        S[v1] = Stratum(v1, 0, germs, sign=s1)
        S[v2] = Stratum(v2, 0, germs, sign=-s1)
        T.set_end(e, 0, v1, kB)
        T.set_end(e, 1, v2, kB)
    else:
        far_v, far_k = T.eends[e][1]
        d0 = T.direction(*T.eends[e][0])
        # direction at v1 must be opposite to the kept end 0
        s1 = 1 if (-d0 == -1) == ((-1) ** kB == 1) else -1
        S[v1] = Stratum(v1, 0, germs, sign=s1)
        S[v2] = Stratum(v2, 0, germs, sign=-s1)
        e2 = T.fresh("e")
        S[e2] = replace(S[e], id=e2)
        T.eends[e].pop(1)
        T.set_end(e, 1, v1, kB)
        T.set_end(e2, 0, v2, kB)
        T.set_end(e2, 1, far_v, far_k)
    T.set_end(fab, 0, v1, kC)
    T.set_end(fab, 1, v2, kC)
    T.set_end(fbc, 0, v1, kA)
    T.set_end(fbc, 1, v2, kA)


def _s_bubble_sites(T: SurfaceTables):
    edges = sorted((x for x, s in T.strata.items() if s is not None and s.dim == 1), key=repr)
    return [((e,), v) for e in edges for v in range(3)]


def _s_unbubble_plan(T: SurfaceTables, B):
    S = T.strata
    st = S[B]
    if st is None or st.dim != 2:
        return None
    edges = [x for x, s in S.items() if s is not None and s.dim == 1 and B in s.germs]
    verts = [x for x, s in S.items() if s is not None and s.dim == 0 and B in s.germs]
    if len(edges) != 2 or len(verts) != 2 or any(S[x].germs.count(B) != 1 for x in edges + verts):
        return None
    v1, v2 = sorted(verts, key=repr)
    if S[v1].germs != S[v2].germs or S[v1].sign != -S[v2].sign:
        return None
    kB = S[v1].germs.index(B)
    for f in edges:
        ends = T.eends.get(f, {})
        if len(ends) != 2 or {ends[0][0], ends[1][0]} != {v1, v2} or ends[0][1] != ends[1][1]:
            return None
    e1, end1 = T.vends[v1][kB]
    e2, end2 = T.vends[v2][kB]
    if e1 in edges or e2 in edges or S[e1].germs != S[e2].germs:
        return None
    return v1, v2, edges, (e1, end1), (e2, end2)


def _s_unbubble(T: SurfaceTables, B) -> None:
    v1, v2, edges, (e1, end1), (e2, end2) = _s_unbubble_plan(T, B)
    S = T.strata
    if e1 == e2:
        S[e1] = replace(S[e1], circle=True)
        T.eends[e1] = {}
    else:
        far = T.eends[e2][1 - end2]
        T.eends[e1].pop(end1)
        T.set_end(e1, end1, *far)
        T.eends.pop(e2)
        S.pop(e2)
    for x in [B, v1, v2, *edges]:
        S.pop(x)
        T.eends.pop(x, None)
        T.vends.pop(x, None)


def _s_unbubble_sites(T: SurfaceTables):
    faces = sorted((x for x, s in T.strata.items() if s is not None and s.dim == 2), key=repr)
    return [((f,), 0) for f in faces if _s_unbubble_plan(T, f)]


_P2 = {"a": (-1.0, 0.0), "b": (1.0, 0.0), 0: (0.0, 1.0), 1: (0.0, -1.0)}


def _det2(pts) -> int:
    (x0, y0), (x1, y1), (x2, y2) = pts
    return 1 if (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0) > 0 else -1


def _s_flip(T: SurfaceTables, e, variant: int) -> None:
    S = T.strata
    (u, ku), (w, kw) = T.eends[e][0], T.eends[e][1]
    key = {0: 1.0, 1: 3.0, "a": 2.0 * ku, "b": 2.0 * kw}
    if ku == kw:
        key["b"] += 0.5 if variant == 0 else -0.5
    ball = {"a": S[u].germs[ku], "b": S[w].germs[kw], 0: S[e].germs[0], 1: S[e].germs[1]}

    def pos(k, i):
        return i if i < k else i + 1

    def model(v, apex, k):
        syms = [None] * 3
        syms[k] = apex
        for i in range(2):
            syms[pos(k, i)] = i
        return S[v].sign * _det2([_P2[x] for x in syms])

    lam = model(u, "a", ku)
    if lam != model(w, "b", kw):
        raise MoveError(f"flip at {e}: inconsistent orientations")
    moved = []
    new = {}
    for i in (0, 1):
        syms = sorted({"a", "b", i}, key=key.get)
        p = T.fresh("v")
        new[i] = (p, syms)
        S[p] = Stratum(p, 0, tuple(ball[x] for x in syms), sign=lam * _det2([_P2[x] for x in syms]))
        # the side {a, i} came from u omitting the other e-germ
        moved.append((T.vends[u][pos(ku, 1 - i)], p, syms.index("b")))
        moved.append((T.vends[w][pos(kw, 1 - i)], p, syms.index("a")))
    n = T.fresh("e")
    ab = sorted(("a", "b"), key=key.get)
    S[n] = Stratum(n, 1, tuple(ball[x] for x in ab), chi=1)
    for end, i in enumerate((0, 1)):
        p, syms = new[i]
        T.set_end(n, end, p, syms.index(i))
    for (oe, oend), p, k in moved:
        T.set_end(oe, oend, p, k)
    for x in (e, u, w):
        S.pop(x)
        T.eends.pop(x, None)
        T.vends.pop(x, None)


def _s_flip_sites(T: SurfaceTables):
    out = []
    for e in sorted((x for x, s in T.strata.items() if s is not None and s.dim == 1), key=repr):
        ends = T.eends.get(e, {})
        if T.strata[e].circle or len(ends) != 2 or ends[0][0] == ends[1][0]:
            continue
        out.append(((e,), 0))
        if ends[0][1] == ends[1][1]:
            out.append(((e,), 1))
    return out


_S_SITES = {"b": _s_bubble_sites, "b-": _s_unbubble_sites, "l": _s_flip_sites}


def surface_moves(ss: SurfaceSkeleton, kind: str) -> list[MoveApplication]:
    if kind not in _S_SITES:
        raise MoveError(f"unknown surface move {kind!r}; known: {SURFACE_KINDS}")
    T = SurfaceTables.of(ss)
    return [MoveApplication(kind, site, v) for site, v in _S_SITES[kind](T)]


def surface_apply(ss: SurfaceSkeleton, app: MoveApplication) -> SurfaceSkeleton:
    T = SurfaceTables.of(ss).copy()
    if (tuple(app.site), app.variant) not in _S_SITES[app.kind](T):
        raise StaleSiteError(f"surface site {app.to_doc()} is not available")
    site = app.site[0]
    if app.kind == "b":
        _s_bubble(T, site, app.variant)
    elif app.kind == "b-":
        _s_unbubble(T, site)
    else:
        _s_flip(T, site, app.variant)
    if not T.consistent():
        raise MoveError(f"surface move {app.to_doc()} broke the orientation")
    return T.to_skeleton()


def surface_signature(ss: SurfaceSkeleton) -> tuple:
    """Refinement hash of a surface skeleton, invariant under renaming."""
    T = SurfaceTables.of(ss)
    S = {k: v for k, v in T.strata.items() if v is not None}
    nbrs: dict = {x: [] for x in S}
    for v, ends in T.vends.items():
        for k, (e, end) in ends.items():
            nbrs[v].append(("end", e, k))
            nbrs[e].append(("at", v, k))
    for x, s in S.items():
        if s.dim < 2:
            for i, g in enumerate(s.germs):
                nbrs[x].append(("germ", g, i))
                nbrs[g].append(("in", x, i))
    color = {x: hash((s.dim, s.circle, s.sign)) for x, s in S.items()}
    for _ in range(6):
        color = {x: hash((color[x], tuple(sorted((t, color[y], i) for t, y, i in nbrs[x])))) for x in S}
    return tuple(sorted(color.values()))


def surface_isomorphic(a: SurfaceSkeleton, b: SurfaceSkeleton) -> bool:
    return a.counts() == b.counts() and surface_signature(a) == surface_signature(b)


def connect_surfaces(a: SurfaceSkeleton, b: SurfaceSkeleton, max_depth: int = 20, max_states: int = 20000):
    """Breadth-first search for a sequence of b/l moves from ``a`` to a skeleton
    isomorphic to ``b``; returns the move list or None."""
    target = surface_signature(b)
    size = sum(b.counts()) + 6
    start = surface_signature(a)
    seen = {start}
    queue = deque([(a, [])])
    while queue:
        cur, path = queue.popleft()
        if surface_signature(cur) == target and cur.counts() == b.counts():
            return path
        if len(path) >= max_depth:
            continue
        for kind in SURFACE_KINDS:
            for app in surface_moves(cur, kind):
                if kind == "b" and sum(cur.counts()) >= size:
                    continue
                nxt = surface_apply(cur, app)
                sig = surface_signature(nxt)
                if sig in seen:
                    continue
                seen.add(sig)
                if len(seen) > max_states:
                    return None
                queue.append((nxt, path + [app]))
    return None


def s2_equator() -> SurfaceSkeleton:
    """The 2-sphere cut by one circle into two discs."""
    return SurfaceSkeleton(
        [Stratum("N", 2, ("N",)), Stratum("S", 2, ("S",)), Stratum("eq", 1, ("N", "S"), circle=True)],
        [], canonical=True, name="s2_equator",
    )
