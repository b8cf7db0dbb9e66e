"""Wilson lines: crossing data, their defining identities, and ribbon diagrams.

A Wilson line runs inside the 2-skeleton.  Across the line the 2-stratum label
changes from the left label ``l`` to the right label ``r`` subject to the 0/1
matrix ``M[l, r]``.  Where the line passes through a 1-stratum from wing ``a``
to wing ``b`` (third wing ``c``) it carries a switch tensor

    tau[a_L, a_R, b_L, b_R, c]

with ``L``/``R`` the faces left and right of the strand.  The line may only pass
between coherently oriented wings, so in local germ terms the four switch kinds
are ``01 -> 02`` (t1), ``12 -> 02`` (t2) and their reverses (t1b, t2b).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from .evaluator import TensorNetwork, contract
from .orbifold_datum import EDGE_PAIRS, WING_PAIRS, OrbifoldDatum
from .skeleton import TRIPLES

SWITCH_KINDS = ("t1", "t2", "t1b", "t2b")
SWITCH_OF = {
    ((0, 1), (0, 2)): "t1",
    ((1, 2), (0, 2)): "t2",
    ((0, 2), (0, 1)): "t1b",
    ((0, 2), (1, 2)): "t2b",
}
REVERSE = {"t1": "t1b", "t1b": "t1", "t2": "t2b", "t2b": "t2"}
_SENSE = {(0, 1): 1, (1, 2): 1, (0, 2): -1}
T_AXIOMS = tuple(f"Tpsi{i}" for i in range(1, 8))


class WilsonError(ValueError):
    pass


@dataclass(frozen=True)
class WilsonObject:
    label: str
    matrix: np.ndarray  # [left, right], entries 0/1
    tau1: np.ndarray  # [a_L, a_R, b_L, b_R, c]
    tau2: np.ndarray
    tau1_bar: np.ndarray
    tau2_bar: np.ndarray
    pointed: tuple | None = None  # (g, character values) for pointed centre objects
    meta: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.matrix.shape[0]

    def tau(self, kind: str) -> np.ndarray:
        return {"t1": self.tau1, "t2": self.tau2, "t1b": self.tau1_bar, "t2b": self.tau2_bar}[kind]

    def to_doc(self) -> dict:
        def flat(a):
            a = np.asarray(a, dtype=complex)
            return {"shape": list(a.shape), "re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist()}

        doc = {"label": self.label, "matrix": flat(self.matrix)}
        for k in SWITCH_KINDS:
            doc[k] = flat(self.tau(k))
        if self.pointed is not None:
            g, chi = self.pointed
            doc["pointed"] = {"g": g, "chi_re": [complex(x).real for x in chi], "chi_im": [complex(x).imag for x in chi]}
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "WilsonObject":
        def arr(d):
            return (np.asarray(d["re"]) + 1j * np.asarray(d["im"])).reshape(d["shape"])

        pointed = None
        if "pointed" in doc:
            p = doc["pointed"]
            pointed = (int(p["g"]), tuple(complex(a, b) for a, b in zip(p["chi_re"], p["chi_im"])))
        return cls(doc["label"], arr(doc["matrix"]).real.round().astype(int), arr(doc["t1"]), arr(doc["t2"]),
                   arr(doc["t1b"]), arr(doc["t2b"]), pointed)


def _support(M: np.ndarray) -> np.ndarray:
    """Indicator of label tuples consistent with the strand on both wings."""
    return np.einsum("ab,cd->abcd", M, M)


def unit_object(datum: OrbifoldDatum) -> WilsonObject:
    """The tensor unit: invisible strand, crossings weighted by 1/(psi_a psi_b)."""
    n = datum.rank
    M = np.eye(n, dtype=int)
    ip = 1 / datum.psi.astype(complex)
    t = np.einsum("ab,cd,a,c->abcd", np.eye(n), np.eye(n), ip, ip)
    t = np.repeat(t[..., None], n, axis=4)
    return WilsonObject("1", M, t, t.copy(), t.copy(), t.copy(), (0, (1.0,) * n) if _is_pointed(datum) else None,
                        {"unit": True})


def _is_pointed(datum: OrbifoldDatum) -> bool:
    N = datum.category.N
    return bool(np.all(N.sum(axis=2) == 1) and np.allclose(datum.category.qdim, 1))


def _group_law(datum: OrbifoldDatum):
    """For a pointed category: the addition table ``a + b`` read off the fusion rules."""
    N = datum.category.N
    return np.argmax(N, axis=2)


def pointed_object(datum: OrbifoldDatum, g: int, chi, label: str | None = None, split=(1, 0)) -> WilsonObject:
    """Strand shifting labels by ``g`` with switch phase ``chi(c)`` on the third wing.

    ``split = (s1, s2)`` puts ``chi ** s1`` on t1 and ``chi ** s2`` on t2.
    """
    n = datum.rank
    add = _group_law(datum)
    chi = np.asarray(chi, dtype=complex)
    M = np.zeros((n, n), dtype=int)
    for x in range(n):
        M[x, add[x, g]] = 1
    sup = _support(M)
    s1, s2 = split
    t1 = np.einsum("abcd,e->abcde", sup, chi ** s1)
    t2 = np.einsum("abcd,e->abcde", sup, chi ** s2)
    t1b = np.einsum("abcd,e->abcde", sup, chi ** -s1)
    t2b = np.einsum("abcd,e->abcde", sup, chi ** -s2)
    return WilsonObject(label or f"({g},{_char_name(chi)})", M, t1, t2, t1b, t2b, (g, tuple(chi)))


def _char_name(chi) -> str:
    n = len(chi)
    out = []
    for x in chi:
        k = int(round(np.angle(x) / (2 * np.pi) * n)) % n
        out.append(str(k))
    return "".join(out)


# ---------------------------------------------------------------------------------
# local identities


class _Local:
    """A small defect-ball network: faces with boundary-arc counts plus nodes."""

    def __init__(self, datum: OrbifoldDatum):
        self.datum = datum
        self.faces: dict[str, int] = {}
        self.arcs: dict[str, str] = {}
        self.nodes: list[tuple[np.ndarray, tuple]] = []

    def face(self, name: str, *arcs: str) -> str:
        self.faces[name] = self.faces.get(name, 0) + len(arcs)
        for a in arcs:
            self.arcs[a] = name
        return name

    def node(self, array, *vars) -> None:
        self.nodes.append((np.asarray(array, dtype=complex), tuple(vars)))

    def network(self, open_arcs: list[str]) -> TensorNetwork:
        n = self.datum.rank
        tn = TensorNetwork()
        for f, k in sorted(self.faces.items()):
            tn.add(self.datum.region_weight(2 - k), (f,), f"face {f}")
        for arr, vars in self.nodes:
            tn.add(arr, vars)
        for a in open_arcs:
            tn.add(np.eye(n), (self.arcs[a], ("arc", a)), f"arc {a}")
        tn.open_vars = [("arc", a) for a in open_arcs]
        return tn


def _a1(loc: _Local, faces: dict) -> None:
    """Fusion node of a 1-stratum piece given its wing faces by local pair."""
    loc.node(loc.datum.a1, *(faces[p] for p in EDGE_PAIRS))


def bigon_identity(datum: OrbifoldDatum, obj: WilsonObject, home: tuple, away: tuple, s: int):
    """Strand in wing ``home`` pushed through the 1-stratum into wing ``away`` and back.

    The home wing is drawn below a horizontal 1-stratum, the strand runs in
    direction ``s`` (+1 = +x).  Returns (lhs, rhs) networks with matching open legs.
    """
    (third,) = [p for p in EDGE_PAIRS if p not in (home, away)]
    M = obj.matrix
    lhs = _Local(datum)
    S1 = lhs.face("S1", "sl")
    S2 = lhs.face("S2", "sr")
    O = lhs.face("O", "o")
    D = lhs.face("D")
    W = lhs.face("W", "w")
    C = lhs.face("C", "c")
    home_face = [S1, O, S2]
    away_face = [W, D, W]
    for k in range(3):
        _a1(lhs, {home: home_face[k], away: away_face[k], third: C})

    def switch(pos: int, up: bool):
        # faces on the -x and +x side of the crossing point pos in {1, 2}
        hm, hp = home_face[pos - 1], home_face[pos]
        am, ap = away_face[pos - 1], away_face[pos]
        if up:  # home -> away, left is -x
            kind = SWITCH_OF[(home, away)]
            lhs.node(obj.tau(kind), hm, hp, am, ap, C)
        else:  # away -> home, left is +x
            kind = SWITCH_OF[(away, home)]
            lhs.node(obj.tau(kind), ap, am, hp, hm, C)

    if s > 0:
        lhs.node(M, S1, O)
        lhs.node(M, W, D)
        lhs.node(M, S2, O)
        switch(1, True)
        switch(2, False)
    else:
        lhs.node(M, O, S1)
        lhs.node(M, D, W)
        lhs.node(M, O, S2)
        switch(2, True)
        switch(1, False)
    rhs = _Local(datum)
    S = rhs.face("S", "sl", "sr")
    O = rhs.face("O", "o")
    W = rhs.face("W", "w")
    C = rhs.face("C", "c")
    rhs.node(M, S, O) if s > 0 else rhs.node(M, O, S)
    _a1(rhs, {home: S, away: W, third: C})
    legs = ["sl", "sr", "o", "w", "c"]
    return lhs.network(legs), rhs.network(legs)


def _into(sign: int, k: int) -> bool:
    return sign * (-1) ** k == -1


def _local_pair(k: int, w: tuple) -> tuple:
    t = TRIPLES[k]
    return (t.index(w[0]), t.index(w[1]))


def coherent_cycles() -> list[list[tuple]]:
    """Cycles of wings around a 0-stratum that glue to a coherently oriented disc."""
    return [list(c) for c in _coherent_cycles()]


@functools.lru_cache(maxsize=None)
def _coherent_cycles() -> tuple:
    out = []
    seen = set()
    for size in (3, 4):
        for seq in itertools.permutations(WING_PAIRS, size):
            rays = []
            for i in range(size):
                a, b = seq[i], seq[(i + 1) % size]
                common = [k for k in range(4) if set(a) | set(b) <= set(TRIPLES[k])]
                if len(common) != 1:
                    break
                k = common[0]
                pa, pb = _local_pair(k, a), _local_pair(k, b)
                if (0, 2) not in (pa, pb):
                    break
                rays.append(k)
            else:
                if len(set(rays)) == size and frozenset(seq) not in seen:
                    seen.add(frozenset(seq))
                    out.append(list(seq))
    return tuple(tuple(c) for c in sorted(out, key=lambda c: (len(c), sorted(c))))


def _ccw(cycle: list, sign: int) -> tuple[list, list]:
    """Order ``cycle`` counterclockwise; returns (sectors, rays) with ray i before sector i."""
    for seq in (cycle, cycle[::-1]):
        m = len(seq)
        rays = []
        for i in range(m):
            a, b = seq[i - 1], seq[i]
            (k,) = [k for k in range(4) if set(a) | set(b) <= set(TRIPLES[k])]
            rays.append(k)
        ok = True
        for i in range(m):
            w = seq[i]
            for k, want in ((rays[i], 1), (rays[(i + 1) % m], -1)):
                out = -1 if _into(sign, k) else 1
                if _SENSE[_local_pair(k, w)] * out != want:
                    ok = False
        if ok:
            return list(seq), rays
    raise WilsonError(f"wing cycle {cycle} is not coherently oriented")


def vertex_identity(datum: OrbifoldDatum, obj: WilsonObject, sign: int, cycle: list, entry: int, exit_: int):
    """Strand passing a 0-stratum of ``sign`` inside the disc of ``cycle``.

    The strand enters in sector ``entry`` and leaves in sector ``exit_`` (indices
    into the counterclockwise order).  The left side passes counterclockwise
    (strand left = vertex side), the right side clockwise.
    """
    sectors, rays = _ccw(cycle, sign)
    m = len(sectors)
    if entry == exit_:
        raise WilsonError("entry and exit sectors must differ")
    outside = [w for w in WING_PAIRS if w not in sectors]
    M = obj.matrix
    legs: list[str] = []
    for i in range(m):
        legs += [f"x{i}cw", f"x{i}ccw"] if i in (entry, exit_) else [f"x{i}"]
    legs += [f"c{w[0]}{w[1]}" for w in outside]

    def build(ccw: bool) -> _Local:
        loc = _Local(datum)
        step = 1 if ccw else -1
        path = [entry]
        while path[-1] != exit_:
            path.append((path[-1] + step) % m)
        near, far = {}, {}
        for w in outside:
            near[w] = loc.face(f"c{w[0]}{w[1]}", f"c{w[0]}{w[1]}")
        sector_face = {}
        for i in range(m):
            if i not in path:
                sector_face[i] = loc.face(f"s{i}", f"x{i}")
        for j, i in enumerate(path):
            if i == entry:
                # counterclockwise travel leaves through the ccw ray: the far piece holds the ccw arc
                far[i] = loc.face(f"f{i}", f"x{i}ccw" if ccw else f"x{i}cw")
                near[i] = loc.face(f"n{i}", f"x{i}cw" if ccw else f"x{i}ccw")
            elif i == exit_:
                far[i] = loc.face(f"f{i}", f"x{i}cw" if ccw else f"x{i}ccw")
                near[i] = loc.face(f"n{i}", f"x{i}ccw" if ccw else f"x{i}cw")
            else:
                far[i] = loc.face(f"f{i}", f"x{i}")
                near[i] = loc.face(f"n{i}")
        for i in path:
            # counterclockwise: left is the vertex side
            loc.node(M, near[i], far[i]) if ccw else loc.node(M, far[i], near[i])

        def at_vertex(i):
            return near[i] if i in path else sector_face[i]

        # rays: ray r sits between sectors r-1 and r
        crossed = {}
        for a, b in zip(path, path[1:]):
            r = b if ccw else a
            crossed[r] = (a, b)
        for r in range(m):
            k = rays[r]
            wl, wr = sectors[r - 1], sectors[r]
            (third,) = [w for w in ((TRIPLES[k][0], TRIPLES[k][1]), (TRIPLES[k][0], TRIPLES[k][2]),
                                    (TRIPLES[k][1], TRIPLES[k][2])) if w not in (wl, wr)]
            pl, pr, pt = _local_pair(k, wl), _local_pair(k, wr), _local_pair(k, third)
            C = near[third]
            if r in crossed:
                a, b = crossed[r]
                _a1(loc, {pl: near[(r - 1) % m], pr: near[r], pt: C})
                _a1(loc, {pl: far[(r - 1) % m], pr: far[r], pt: C})
                src, tgt = sectors[a], sectors[b]
                kind = SWITCH_OF[(_local_pair(k, src), _local_pair(k, tgt))]
                if ccw:
                    loc.node(obj.tau(kind), near[a], far[a], near[b], far[b], C)
                else:
                    loc.node(obj.tau(kind), far[a], near[a], far[b], near[b], C)
            else:
                _a1(loc, {pl: at_vertex((r - 1) % m), pr: at_vertex(r), pt: C})
        for k in range(4):
            if k not in rays:
                t = TRIPLES[k]
                _a1(loc, {(0, 1): near[(t[0], t[1])], (0, 2): near[(t[0], t[2])], (1, 2): near[(t[1], t[2])]})
        wing_face = {}
        for i, w in enumerate(sectors):
            wing_face[w] = at_vertex(i)
        for w in outside:
            wing_face[w] = near[w]
        loc.node(datum.vertex_tensor(sign), *(wing_face[w] for w in WING_PAIRS))
        return loc

    return build(True).network(legs), build(False).network(legs)


def _residual(pair, cap: int | None = None) -> float:
    lhs, rhs = pair
    a = contract(lhs) if cap is None else contract(lhs, cap)
    b = contract(rhs) if cap is None else contract(rhs, cap)
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def t_identities(datum: OrbifoldDatum, obj: WilsonObject):
    """Yield (family, description, (lhs, rhs)) for every defining identity."""
    for home, away in (((0, 1), (0, 2)), ((0, 2), (0, 1))):
        for s in (1, -1):
            yield "Tpsi4", f"bigon {home}->{away} s={s}", bigon_identity(datum, obj, home, away, s)
    for home, away in (((1, 2), (0, 2)), ((0, 2), (1, 2))):
        for s in (1, -1):
            yield "Tpsi5", f"bigon {home}->{away} s={s}", bigon_identity(datum, obj, home, away, s)
    cycles = coherent_cycles()
    fam_pos = {0: "Tpsi1", 1: "Tpsi2", 2: "Tpsi3"}
    for ci, cyc in enumerate(cycles):
        for sign in (1, -1):
            fam = fam_pos[ci] if sign > 0 else ("Tpsi6" if len(cyc) == 3 else "Tpsi7")
            m = len(cyc)
            for e, x in itertools.permutations(range(m), 2):
                yield fam, f"vertex {sign:+d} cycle {cyc} {e}->{x}", vertex_identity(datum, obj, sign, cyc, e, x)


@dataclass
class TAxiomReport:
    residuals: dict[str, float]
    rows: list[dict]
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def worst(self) -> str:
        return max(self.residuals, key=self.residuals.get)

    @property
    def ok(self) -> bool:
        return self.max_residual < self.tol

    def to_dict(self) -> dict:
        return {"ok": self.ok, "tol": self.tol, "residuals": dict(self.residuals), "worst": self.worst,
                "identities": list(self.rows)}


def check_T_axioms(datum: OrbifoldDatum, obj: WilsonObject, tol: float = 1e-10, stop_above: float | None = None) -> TAxiomReport:
    residuals = {a: 0.0 for a in T_AXIOMS}
    rows = []
    for fam, desc, pair in t_identities(datum, obj):
        r = _residual(pair)
        residuals[fam] = max(residuals[fam], r)
        rows.append({"axiom": fam, "identity": desc, "residual": r})
        if stop_above is not None and r > stop_above:
            break
    return TAxiomReport(residuals, rows, tol)


# ---------------------------------------------------------------------------------
# objects of the centre for pointed input, and the monoidal structure


def center_objects_pointed(datum: OrbifoldDatum, tol: float = 1e-10) -> list[WilsonObject]:
    """All one-dimensional objects: a shift ``g`` and phases ``chi(h)`` in n-th roots of unity.

    Every candidate is screened on the first failing identity, survivors get the
    full check.  The phase sits on t1 (t2 trivial); see ``pointed_object``.
    """
    if not _is_pointed(datum):
        raise WilsonError("the centre search needs a pointed category")
    n = datum.rank
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    out = []
    for g in range(n):
        for ks in itertools.product(range(n), repeat=n):
            obj = pointed_object(datum, g, roots[list(ks)])
            if not check_T_axioms(datum, obj, tol, stop_above=tol).ok:
                continue
            out.append(obj)
    return out


def _mask(M: np.ndarray) -> np.ndarray:
    return (np.asarray(M) != 0).astype(int)


def _a1_by_kind(datum: OrbifoldDatum, kind: str) -> np.ndarray:
    """a1 on the edge piece between two parallel switches, indexed [a, b, c]."""
    a1 = datum.a1
    order = {"t1": "abc", "t2": "cba", "t1b": "bac", "t2b": "cab"}[kind]
    return np.einsum(f"{order}->abc", a1)


def tensor(datum: OrbifoldDatum, X: WilsonObject, Y: WilsonObject) -> WilsonObject:
    """``X`` left of ``Y``: switches compose over the strip between the strands."""
    M = X.matrix @ Y.matrix
    if np.any(M > 1):
        raise WilsonError(f"{X.label} (x) {Y.label} is not multiplicity free")
    psi = datum.psi.astype(complex)
    taus = []
    for kind in SWITCH_KINDS:
        t = np.einsum("ambnc,mrnsc,mnc,m,n->arbsc", X.tau(kind), Y.tau(kind), _a1_by_kind(datum, kind), psi, psi)
        taus.append(t)
    pointed = None
    if X.pointed is not None and Y.pointed is not None:
        add = _group_law(datum)
        pointed = (int(add[X.pointed[0], Y.pointed[0]]), tuple(np.asarray(X.pointed[1]) * np.asarray(Y.pointed[1])))
    meta = {"unit": True} if X.meta.get("unit") and Y.meta.get("unit") else {}
    return WilsonObject(f"{X.label}*{Y.label}", M.astype(int), *taus, pointed, meta)


def dual(X: WilsonObject) -> WilsonObject:
    """Reversed strand: left and right swap and every switch runs backwards."""
    taus = [np.transpose(X.tau(REVERSE[k]), (3, 2, 1, 0, 4)) for k in SWITCH_KINDS]
    pointed = None
    if X.pointed is not None:
        g, chi = X.pointed
        n = len(chi)
        pointed = ((-g) % n, tuple(1 / np.asarray(chi)))
    return WilsonObject(f"{X.label}^", X.matrix.T.copy(), *taus, pointed, dict(X.meta))


def braiding_phase(X: WilsonObject, Y: WilsonObject) -> complex:
    """Scalar of ``c_{X,Y}`` for one-dimensional objects: ``chi_Y(g_X)``."""
    if X.meta.get("unit") or Y.meta.get("unit"):
        return 1.0
    if X.pointed is None or Y.pointed is None:
        raise WilsonError("braiding is only available for one-dimensional objects")
    return complex(Y.pointed[1][X.pointed[0]])


def coupon_support(ins: list[WilsonObject], outs: list[WilsonObject]) -> np.ndarray:
    """0/1 tensor over [L, g_1.., R, h_1..] allowed by the strand matrices."""
    if not ins and not outs:
        raise WilsonError("a coupon needs at least one strand")
    n = (ins or outs)[0].rank

    def chain(objs):
        # [left, middles..., right]
        if not objs:
            return np.eye(n, dtype=int)
        t = _mask(objs[0].matrix)
        for o in objs[1:]:
            t = np.einsum("...m,mr->...mr", t, _mask(o.matrix))
        return t

    top, bot = chain(ins), chain(outs)
    k, m = len(ins), len(outs)
    # top: [L, g_1..g_{k-1}, R], bot: [L, h_1..h_{m-1}, R]
    if k == 0:
        top = np.eye(n, dtype=int)
    if m == 0:
        bot = np.eye(n, dtype=int)
    lt = "L" + "".join(chr(ord("a") + i) for i in range(max(k - 1, 0))) + "R"
    lb = "L" + "".join(chr(ord("n") + i) for i in range(max(m - 1, 0))) + "R"
    return np.einsum(f"{lt},{lb}->{lt}{lb[1:-1]}", top, bot)


def braiding(X: WilsonObject, Y: WilsonObject, inverse: bool = False) -> np.ndarray:
    """Coupon tensor of ``c_{X,Y}: X Y -> Y X`` (or of ``c_{X,Y}^-1: Y X -> X Y``)."""
    ph = braiding_phase(X, Y)
    if inverse:
        return coupon_support([Y, X], [X, Y]) / ph
    return coupon_support([X, Y], [Y, X]) * ph


def _one_dim(objs: list[WilsonObject], datum: OrbifoldDatum):
    """Total (g, chi) of a row of strands, or None if some strand is not one-dimensional."""
    if not objs:
        return (0, (1.0,) * datum.rank)
    if all(o.meta.get("unit") for o in objs):
        return "unit"
    if any(o.pointed is None for o in objs):
        return None
    add = _group_law(datum)
    g, chi = 0, np.ones(datum.rank, dtype=complex)
    for o in objs:
        g = int(add[g, o.pointed[0]])
        chi = chi * np.asarray(o.pointed[1])
    return g, tuple(chi)


def check_intertwiner(datum: OrbifoldDatum, ins: list[WilsonObject], outs: list[WilsonObject], f,
                      tol: float = 1e-9) -> float:
    """Residual of the intertwining conditions for a coupon ``f: ins -> outs``.

    Between one-dimensional (or unit) strands the switch phases are label
    independent, so sliding a coupon through a 1-stratum forces ``f`` to be a
    constant multiple of the support tensor, and nonzero only between
    isomorphic rows.
    """
    f = np.asarray(f, dtype=complex)
    sup = coupon_support(ins, outs)
    if f.shape != sup.shape:
        raise WilsonError(f"coupon tensor has shape {f.shape}, expected {sup.shape}")
    a, b = _one_dim(ins, datum), _one_dim(outs, datum)
    if a is None or b is None:
        raise WilsonError("the intertwiner check covers one-dimensional and unit strands")
    on = sup != 0
    c = f[on].mean() if on.any() else 0.0
    res = float(np.max(np.abs(f - c * sup)))
    if abs(c) > tol and "unit" not in (a, b):
        if a[0] != b[0] or not np.allclose(a[1], b[1], atol=1e-9):
            res = max(res, float(abs(c)))
    return res


@dataclass
class RibbonDiagramDecorated:
    diagram: object
    datum: OrbifoldDatum
    psi_ledger: dict
    phi_ledger: dict


def decorate_diagram(diagram, datum: OrbifoldDatum, tol: float = 1e-9, check_colors: bool = True,
                     check_morphisms: bool = True) -> RibbonDiagramDecorated:
    """Validate a diagram against ``datum`` and attach its psi/phi ledgers."""
    from .diagram import BRAIDS
    from .skeleton import chi_sym

    diagram.check()
    if check_colors:
        for name, obj in sorted(diagram.colors.items()):
            rep = check_T_axioms(datum, obj, tol, stop_above=tol)
            if not rep.ok:
                raise WilsonError(f"color {name!r} fails {rep.worst} (residual {rep.max_residual:.3g})")
    if check_morphisms:
        for p, cp in sorted(diagram.coupons.items()):
            if cp.label in BRAIDS:
                continue
            ins = [diagram.colors[diagram.arcs[a].color] for a in cp.ins]
            outs = [diagram.colors[diagram.arcs[a].color] for a in cp.outs]
            r = check_intertwiner(datum, ins, outs, diagram.coupon_tensor(p), tol)
            if r > tol:
                raise WilsonError(f"coupon {p} ({cp.label}) is not an intertwiner (residual {r:.3g})")
    T = diagram.T
    phi = {b: chi_sym(s) for b, s in T.strata.items() if s.dim == 3}
    return RibbonDiagramDecorated(diagram, datum, diagram.face_ledger() if diagram.cells else {}, phi)


def evaluate_graph(diagram, datum: OrbifoldDatum | None = None, cap: int | None = None,
                   check: bool = True) -> complex:
    """Value of a diagram in a closed 3-manifold; undecorated input is validated first."""
    if isinstance(diagram, RibbonDiagramDecorated):
        datum = diagram.datum if datum is None else datum
        diagram = diagram.diagram
    elif datum is None:
        raise WilsonError("evaluate_graph needs a datum")
    elif check:
        decorate_diagram(diagram, datum)
    return diagram.evaluate(datum) if cap is None else diagram.evaluate(datum, cap)


def twist(datum: OrbifoldDatum, X: WilsonObject, tol: float = 1e-10) -> complex:
    """Twist scalar of ``X`` from both curl composites; raises if they disagree."""
    from .diagram import twist as _twist

    left, _ = _twist(datum, X, tol=tol)
    return left
