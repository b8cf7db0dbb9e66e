"""Decorated ribbon diagrams drawn on the 2-skeleton.

A diagram refines some 2-strata ("drawn" regions) into polygonal cells.  Points
are skeleton vertices, points on 1-strata (plain or switches), coupons and plain
interior points.  Arcs are pieces of 1-strata ("edge"), of Wilson lines
("strand") or auxiliary cuts ("cut").  A cell lists its sides counterclockwise
as ``(arc, sign, pair)``; ``sign = +1`` runs along the arc and ``pair`` is the
wing pair of the side for edge arcs.

Faces are cells glued along cuts.  A face ``F`` gets the weight
``psi ** (2 chi(F) - corners + extras)``: ``corners`` counts its corners at
coupons (each a piece of coupon boundary) and ``extras`` adds one for each
coupon where ``F`` is the leftmost or rightmost face.

Coupon arcs sit counterclockwise as ``out_m .. out_1, in_1 .. in_k``.  The
tensor of a coupon is indexed ``[L, g_1 .. g_{k-1}, R, h_1 .. h_{m-1}]`` with
``g`` the faces between inputs and ``h`` between outputs.  Crossings are
coupons labelled ``braid`` (``c_{in_1, in_2}``) or ``braid-``
(``c_{in_2, in_1}^-1``).
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field

import numpy as np

from . import moves as _moves
from .evaluator import DEFAULT_CAP, TensorNetwork, contract
from .orbifold_datum import EDGE_PAIRS, WING_PAIRS, OrbifoldDatum
from .skeleton import Skeleton, Tables, TRIPLES, chi_sym, region_cycles
from .wilson import (
    SWITCH_OF,
    WilsonError,
    WilsonObject,
    braiding,
    coherent_cycles,
)

_SENSE = {(0, 1): 1, (1, 2): 1, (0, 2): -1}
BRAIDS = ("braid", "braid-")
OMEGA_KINDS = ("w0", "w1", "w2", "w2-", "w4", "w4-", "w5")


class DiagramError(ValueError):
    pass


@dataclass
class Point:
    kind: str  # vertex | switch | coupon | plain
    vertex: int | None = None
    edge: int | None = None
    region: int | None = None
    switch: tuple | None = None  # (source pair, target pair) at the 1-stratum


@dataclass
class Arc:
    kind: str  # edge | strand | cut
    tail: int
    head: int
    edge: int | None = None
    region: int | None = None
    color: str | None = None


@dataclass
class Cell:
    region: int
    sides: list = field(default_factory=list)


@dataclass
class Coupon:
    label: str
    ins: list = field(default_factory=list)
    outs: list = field(default_factory=list)


def _local_pair(k: int, w: tuple) -> tuple:
    t = TRIPLES[k]
    return (t.index(w[0]), t.index(w[1]))


def _vertex_pair(k: int, p: tuple) -> tuple:
    t = TRIPLES[k]
    return (t[p[0]], t[p[1]])


class Diagram:
    """A knotted plexus on a closed canonical skeleton, with colors and coupon labels."""

    def __init__(self, sk: Skeleton, colors: dict | None = None, morphisms: dict | None = None):
        if not sk.canonical:
            raise DiagramError("diagrams live on locally ordered skeleta")
        self.sk = sk
        self.T = Tables.of(sk)
        self.colors: dict[str, WilsonObject] = dict(colors or {})
        self.morphisms: dict[str, np.ndarray] = dict(morphisms or {})
        self.points: dict[int, Point] = {}
        self.arcs: dict[int, Arc] = {}
        self.cells: dict[int, Cell] = {}
        self.coupons: dict[int, Coupon] = {}
        self.chains: dict[int, list[int]] = {}
        self.vpoint: dict[int, int] = {}
        self.circle_dir: dict[int, int] = {}
        self.drawn: set[int] = set()
        self._n = 0

    # -- bookkeeping -----------------------------------------------------------

    def _new(self) -> int:
        self._n += 1
        return self._n - 1

    def copy(self) -> "Diagram":
        d = Diagram.__new__(Diagram)
        d.sk, d.T = self.sk, _moves._copy(self.T)
        d.colors, d.morphisms = dict(self.colors), dict(self.morphisms)
        d.points = {k: Point(**asdict(v)) for k, v in self.points.items()}
        d.arcs = {k: Arc(**asdict(v)) for k, v in self.arcs.items()}
        d.cells = {k: Cell(v.region, list(v.sides)) for k, v in self.cells.items()}
        d.coupons = {k: Coupon(v.label, list(v.ins), list(v.outs)) for k, v in self.coupons.items()}
        d.chains = {k: list(v) for k, v in self.chains.items()}
        d.vpoint, d.circle_dir, d.drawn = dict(self.vpoint), dict(self.circle_dir), set(self.drawn)
        d._n = self._n
        return d

    def edge_dir(self, e: int) -> int:
        if self.T.strata[e].circle:
            return self.circle_dir.setdefault(e, 1)
        return _moves._arc_direction(self.T, e)

    def _start(self, side) -> int:
        a = self.arcs[side[0]]
        return a.tail if side[1] > 0 else a.head

    def _end(self, side) -> int:
        a = self.arcs[side[0]]
        return a.head if side[1] > 0 else a.tail

    def incidence(self, p: int) -> list[tuple[int, str]]:
        out = []
        for i, a in self.arcs.items():
            if a.tail == p:
                out.append((i, "tail"))
            if a.head == p:
                out.append((i, "head"))
        return out

    def strands_at(self, p: int) -> tuple[list[int], list[int]]:
        ins = [i for i, a in self.arcs.items() if a.kind == "strand" and a.head == p]
        outs = [i for i, a in self.arcs.items() if a.kind == "strand" and a.tail == p]
        return ins, outs

    def find_side(self, arc: int, sign: int | None = None, pair=None) -> tuple[int, int]:
        for cid, c in self.cells.items():
            for i, (a, s, p) in enumerate(c.sides):
                if a == arc and (sign is None or s == sign) and (pair is None or p == pair):
                    return cid, i
        raise DiagramError(f"arc {arc} has no side {sign} {pair}")

    # -- drawing ---------------------------------------------------------------

    def _vertex_point(self, v: int) -> int:
        if v not in self.vpoint:
            p = self._new()
            self.points[p] = Point("vertex", vertex=v)
            self.vpoint[v] = p
        return self.vpoint[v]

    def chain(self, e: int) -> list[int]:
        if e in self.chains:
            return self.chains[e]
        if self.T.strata[e].circle:
            p = self._new()
            self.points[p] = Point("plain", edge=e)
            a = self._new()
            self.arcs[a] = Arc("edge", p, p, edge=e)
        else:
            ends = self.T.eends[e]
            if len(ends) < 2:
                raise DiagramError(f"1-stratum {e} reaches the boundary")
            d = self.edge_dir(e)
            tail_end = 0 if d > 0 else 1
            t = self._vertex_point(ends[tail_end][0])
            h = self._vertex_point(ends[1 - tail_end][0])
            a = self._new()
            self.arcs[a] = Arc("edge", t, h, edge=e)
        self.chains[e] = [a]
        return self.chains[e]

    def innermost(self, e: int, end: int) -> int:
        """Chain arc of ``e`` touching its skeleton end ``end``."""
        ch = self.chain(e)
        tail_end = 0 if self.edge_dir(e) > 0 else 1
        return ch[0] if end == tail_end else ch[-1]

    def draw(self, r: int) -> None:
        """Refine 2-stratum ``r`` into one polygonal cell (plus cuts)."""
        if r in self.drawn:
            return
        st = self.T.strata[r]
        cycles = []
        for cyc in region_cycles(self.T, r):
            sides = []
            for e, p, exit_end in cyc:
                sides.append((e, p, exit_end))
            cycles.append(sides)
        words = []
        for cyc in cycles:
            fwd = []
            for e, p, exit_end in cyc:
                ch = self.chain(e)
                if exit_end < 0:
                    along = 1
                else:
                    along = (1 if exit_end == 1 else -1) * self.edge_dir(e)
                fwd.append(along == _SENSE[p])
            if all(fwd):
                order = cyc
            elif not any(fwd):
                order = cyc[::-1]
            else:
                raise DiagramError(f"2-stratum {r}: boundary cycle is not coherently oriented")
            word = []
            for e, p, _ in order:
                s = _SENSE[p]
                ch = self.chains[e]
                for a in (ch if s > 0 else ch[::-1]):
                    word.append((a, s, p))
            words.append(word)
        b = len(words)
        twice_g = 2 - st.chi - b
        if twice_g < 0 or twice_g % 2:
            raise DiagramError(f"2-stratum {r}: chi {st.chi} with {b} boundary cycles")
        sides: list = []
        if b:
            sides = list(words[0])
            base = self._start(sides[0])
            for w in words[1:]:
                k = self._new()
                self.arcs[k] = Arc("cut", base, self._start(w[0]), region=r)
                sides += [(k, 1, None)] + w + [(k, -1, None)]
        else:
            base = self._new()
            self.points[base] = Point("plain", region=r)
            if twice_g == 0:
                q = self._new()
                self.points[q] = Point("plain", region=r)
                k = self._new()
                self.arcs[k] = Arc("cut", base, q, region=r)
                sides = [(k, 1, None), (k, -1, None)]
        for _ in range(twice_g // 2):
            a, c = self._new(), self._new()
            self.arcs[a] = Arc("cut", base, base, region=r)
            self.arcs[c] = Arc("cut", base, base, region=r)
            sides += [(a, 1, None), (c, 1, None), (a, -1, None), (c, -1, None)]
        cid = self._new()
        self.cells[cid] = Cell(r, sides)
        self.drawn.add(r)

    # -- primitive edits -------------------------------------------------------

    def subdivide(self, arc: int) -> tuple[int, int, int]:
        """Split ``arc`` at a new point; returns (point, first piece, second piece)."""
        A = self.arcs[arc]
        p = self._new()
        if A.kind == "edge":
            self.points[p] = Point("plain", edge=A.edge)
        else:
            self.points[p] = Point("plain", region=A.region)
        a1, a2 = self._new(), self._new()
        self.arcs[a1] = Arc(A.kind, A.tail, p, A.edge, A.region, A.color)
        self.arcs[a2] = Arc(A.kind, p, A.head, A.edge, A.region, A.color)
        for c in self.cells.values():
            new = []
            for a, s, pr in c.sides:
                if a != arc:
                    new.append((a, s, pr))
                elif s > 0:
                    new += [(a1, 1, pr), (a2, 1, pr)]
                else:
                    new += [(a2, -1, pr), (a1, -1, pr)]
            c.sides = new
        if A.kind == "edge":
            ch = self.chains[A.edge]
            i = ch.index(arc)
            ch[i:i + 1] = [a1, a2]
        for cp in self.coupons.values():
            cp.ins = [a2 if x == arc else x for x in cp.ins]
            cp.outs = [a1 if x == arc else x for x in cp.outs]
        del self.arcs[arc]
        return p, a1, a2

    def split_cell(self, cid: int, i: int, j: int, tail_at_i: bool, kind: str, color=None):
        """Join the corners ``i`` and ``j`` of cell ``cid`` by a new arc.

        Returns (arc, cell holding sides i..j-1, cell holding sides j..i-1).
        """
        c = self.cells[cid]
        n = len(c.sides)
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise DiagramError("split needs two distinct corners")
        Pi, Pj = self._start(c.sides[i]), self._start(c.sides[j])
        a = self._new()
        self.arcs[a] = Arc(kind, Pi if tail_at_i else Pj, Pj if tail_at_i else Pi, region=c.region, color=color)
        x_part = [c.sides[(i + t) % n] for t in range((j - i) % n)]
        y_part = [c.sides[(j + t) % n] for t in range((i - j) % n)]
        sx = -1 if tail_at_i else 1  # X runs from P_j back to P_i
        c.sides = x_part + [(a, sx, None)]
        other = self._new()
        self.cells[other] = Cell(c.region, y_part + [(a, -sx, None)])
        return a, cid, other

    def corner(self, cid: int, point: int) -> int:
        hits = [i for i, s in enumerate(self.cells[cid].sides) if self._start(s) == point]
        if len(hits) != 1:
            raise DiagramError(f"point {point} is not a unique corner of cell {cid}")
        return hits[0]

    def side_index(self, cid: int, arc: int, sign: int | None = None, pair=None) -> int:
        for i, (a, s, p) in enumerate(self.cells[cid].sides):
            if a == arc and (sign is None or s == sign) and (pair is None or p == pair):
                return i
        raise DiagramError(f"arc {arc} is not a side of cell {cid}")

    def rotation(self, p: int) -> list[tuple[int, str]]:
        """Counterclockwise arc ends at an interior point."""
        succ = {}
        for c in self.cells.values():
            n = len(c.sides)
            for i in range(n):
                s, prev = c.sides[i], c.sides[i - 1]
                if self._start(s) != p:
                    continue
                out_end = (s[0], "tail" if s[1] > 0 else "head")
                in_end = (prev[0], "head" if prev[1] > 0 else "tail")
                succ[out_end] = in_end
        if not succ:
            return []
        start = min(succ)
        rot = [start]
        while True:
            nxt = succ[rot[-1]]
            if nxt == start:
                break
            rot.append(nxt)
            if len(rot) > len(succ):
                raise DiagramError(f"point {p} is not a disc point")
        if len(rot) != len(succ):
            raise DiagramError(f"point {p} is not a disc point")
        return rot

    def _coupon_arcs(self, p: int) -> tuple[list[int], list[int]]:
        rot = [x for x in self.rotation(p) if self.arcs[x[0]].kind == "strand"]
        n = len(rot)
        kinds = ["out" if e == "tail" else "in" for _, e in rot]
        m = kinds.count("out")
        for s in range(n):
            seq = kinds[s:] + kinds[:s]
            if seq == ["out"] * m + ["in"] * (n - m):
                r = rot[s:] + rot[:s]
                outs = [a for a, _ in r[:m]][::-1]
                ins = [a for a, _ in r[m:]]
                return ins, outs
        raise DiagramError(f"coupon at {p}: outputs are not consecutive")

    def make_coupon(self, p: int, label: str) -> None:
        self.points[p].kind = "coupon"
        ins, outs = self._coupon_arcs(p)
        self.coupons[p] = Coupon(label, ins, outs)

    # -- normal form -----------------------------------------------------------

    def normalize(self) -> None:
        changed = True
        while changed:
            changed = self._merge_once() or self._prune_once() or self._smooth_once()

    def _merge_once(self) -> bool:
        where: dict[int, list] = {}
        for cid, c in self.cells.items():
            for i, (a, s, _) in enumerate(c.sides):
                if self.arcs[a].kind == "cut":
                    where.setdefault(a, []).append((cid, i, s))
        for a, hits in sorted(where.items()):
            if len(hits) != 2 or hits[0][0] == hits[1][0]:
                continue
            (ca, ia, _), (cb, ib, _) = hits
            A, B = self.cells[ca].sides, self.cells[cb].sides
            self.cells[ca].sides = A[ia + 1:] + A[:ia] + B[ib + 1:] + B[:ib]
            del self.cells[cb]
            del self.arcs[a]
            return True
        return False

    def _prune_once(self) -> bool:
        for cid, c in self.cells.items():
            n = len(c.sides)
            if n <= 2:
                continue
            for i in range(n):
                a, s, _ = c.sides[i]
                b, t, _ = c.sides[(i + 1) % n]
                if a != b or s != -t or self.arcs[a].kind != "cut":
                    continue
                tip = self._end(c.sides[i])
                if self.points[tip].kind != "plain" or len(self.incidence(tip)) != 1:
                    continue
                keep = [c.sides[k] for k in range(n) if k not in (i, (i + 1) % n)]
                c.sides = keep
                del self.arcs[a]
                del self.points[tip]
                return True
        return False

    def _smooth_once(self) -> bool:
        for p, pt in sorted(self.points.items()):
            if pt.kind != "plain":
                continue
            inc = self.incidence(p)
            if len(inc) != 2:
                continue
            (x, ex), (y, ey) = inc
            if x == y:
                continue
            X, Y = self.arcs[x], self.arcs[y]
            if X.kind != Y.kind or X.color != Y.color or X.edge != Y.edge:
                continue
            if {ex, ey} != {"head", "tail"}:
                continue
            if ex == "tail":
                x, y, X, Y = y, x, Y, X
            # x runs into p, y runs out of p
            if X.kind == "edge":
                ch = self.chains[X.edge]
                i, j = ch.index(x), ch.index(y)
                if j != i + 1:
                    continue
            n = self._new()
            self.arcs[n] = Arc(X.kind, X.tail, Y.head, X.edge, X.region, X.color)
            for c in self.cells.values():
                c.sides = [(n, s, pr) if a == x else (a, s, pr) for a, s, pr in c.sides if a != y]
            if X.kind == "edge":
                ch = self.chains[X.edge]
                i = ch.index(x)
                ch[i:i + 2] = [n]
            for cp in self.coupons.values():
                cp.outs = [n if a == x else a for a in cp.outs]
                cp.ins = [n if a == y else a for a in cp.ins]
            del self.arcs[x], self.arcs[y], self.points[p]
            return True
        return False

    # -- faces and evaluation --------------------------------------------------

    def faces(self) -> dict[int, int]:
        """Cell -> face representative (smallest cell id of the face)."""
        parent = {c: c for c in self.cells}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        where: dict[int, list] = {}
        for cid, c in self.cells.items():
            for a, _, _ in c.sides:
                if self.arcs[a].kind == "cut":
                    where.setdefault(a, []).append(cid)
        for cs in where.values():
            ra, rb = find(cs[0]), find(cs[-1])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        return {c: find(c) for c in self.cells}

    def face_ledger(self) -> dict[int, dict]:
        """Per face: region, chi, coupon corners, extras and the psi exponent."""
        face = self.faces()
        led = {f: {"region": self.cells[f].region, "cells": 0, "cuts": 0, "points": 0, "corners": 0, "extras": 0}
               for f in set(face.values())}
        for cid, c in self.cells.items():
            led[face[cid]]["cells"] += 1
            for s in c.sides:
                if self.points[self._start(s)].kind == "coupon":
                    led[face[cid]]["corners"] += 1
        cut_face = {}
        for cid, c in self.cells.items():
            for a, _, _ in c.sides:
                if self.arcs[a].kind == "cut":
                    cut_face[a] = face[cid]
        for a, f in cut_face.items():
            led[f]["cuts"] += 1
        for p, pt in self.points.items():
            if pt.kind != "plain":
                continue
            inc = self.incidence(p)
            if inc and all(self.arcs[a].kind == "cut" for a, _ in inc):
                led[cut_face[inc[0][0]]]["points"] += 1
        for p, cp in self.coupons.items():
            L, R = self.coupon_sides(p)
            led[face[L]]["extras"] += 1
            led[face[R]]["extras"] += 1
        for f, row in led.items():
            row["chi"] = row["cells"] - row["cuts"] + row["points"]
            row["psi_exponent"] = 2 * row["chi"] - row["corners"] + row["extras"]
        return led

    def left_cell(self, arc: int) -> int:
        return self.find_side(arc, 1)[0]

    def right_cell(self, arc: int) -> int:
        return self.find_side(arc, -1)[0]

    def coupon_sides(self, p: int) -> tuple[int, int]:
        cp = self.coupons[p]
        L = self.left_cell(cp.ins[0]) if cp.ins else self.left_cell(cp.outs[0])
        R = self.right_cell(cp.ins[-1]) if cp.ins else self.right_cell(cp.outs[-1])
        return L, R

    def coupon_tensor(self, p: int) -> np.ndarray:
        cp = self.coupons[p]
        col = lambda a: self.colors[self.arcs[a].color]  # noqa: E731
        if cp.label == "braid":
            return braiding(col(cp.ins[0]), col(cp.ins[1]))
        if cp.label == "braid-":
            return braiding(col(cp.ins[1]), col(cp.ins[0]), inverse=True)
        if cp.label not in self.morphisms:
            raise DiagramError(f"coupon {p}: unknown morphism {cp.label!r}")
        return np.asarray(self.morphisms[cp.label], dtype=complex)

    def network(self, datum: OrbifoldDatum) -> TensorNetwork:
        if not self.sk.is_closed:
            raise DiagramError("graph evaluation is implemented for closed skeleta")
        T = self.T
        face = self.faces()
        led = self.face_ledger() if self.cells else {}
        fv = lambda cid: ("face", face[cid])  # noqa: E731
        tn = TensorNetwork()
        strata = T.strata
        for b in sorted(i for i, s in strata.items() if s.dim == 3):
            tn.scalar *= datum.ball_weight(chi_sym(strata[b]))
        for r in sorted(i for i, s in strata.items() if s.dim == 2):
            if r not in self.drawn:
                tn.add(datum.region_weight(chi_sym(strata[r])), (r,), f"region {r}")
                continue
            for f in sorted(f for f, row in led.items() if row["region"] == r):
                tn.add(datum.region_weight(led[f]["psi_exponent"]), (("face", f),), f"face {f}")
        side_cell = {}
        for cid, c in self.cells.items():
            for a, s, pr in c.sides:
                if pr is not None:
                    side_cell[(a, pr)] = cid

        def wing_var(e, arc, pr):
            r = T.ewings[e][pr]
            return r if r not in self.drawn else fv(side_cell[(arc, pr)])

        for e in sorted(i for i, s in strata.items() if s.dim == 1):
            if e not in self.chains:
                w = T.ewings[e]
                tn.add(datum.a1, tuple(w[p] for p in EDGE_PAIRS), f"edge {e}")
                continue
            for arc in self.chains[e]:
                tn.add(datum.a1, tuple(wing_var(e, arc, p) for p in EDGE_PAIRS), f"edge {e} arc {arc}")
        for v in sorted(i for i, s in strata.items() if s.dim == 0):
            w = T.vwings[v]
            vars_ = []
            for P in WING_PAIRS:
                r = w[P]
                if r not in self.drawn:
                    vars_.append(r)
                    continue
                k = min(k for k in range(4) if k not in P)
                e, end = T.vends[v][k]
                vars_.append(fv(side_cell[(self.innermost(e, end), _local_pair(k, P))]))
            tn.add(datum.vertex_tensor(strata[v].sign), tuple(vars_), f"vertex {v}")
        for a in sorted(self.arcs):
            A = self.arcs[a]
            if A.kind == "strand":
                tn.add(self.colors[A.color].matrix, (fv(self.left_cell(a)), fv(self.right_cell(a))), f"strand {a}")
        for p in sorted(self.points):
            pt = self.points[p]
            if pt.kind == "switch":
                (x,), (y,) = self.strands_at(p)
                src, tgt = pt.switch
                kind = SWITCH_OF[(src, tgt)]
                e = pt.edge
                third = [q for q in EDGE_PAIRS if q not in (src, tgt)][0]
                r3 = T.ewings[e][third]
                ch = self.chains[e]
                cvar = r3
                if r3 in self.drawn:
                    nb = [a for a in ch if p in (self.arcs[a].tail, self.arcs[a].head)]
                    cvar = fv(side_cell[(nb[0], third)])
                obj = self.colors[self.arcs[x].color]
                tn.add(obj.tau(kind), (fv(self.left_cell(x)), fv(self.right_cell(x)),
                                       fv(self.left_cell(y)), fv(self.right_cell(y)), cvar), f"switch {p}")
            elif pt.kind == "coupon":
                cp = self.coupons[p]
                L, R = self.coupon_sides(p)
                g = [fv(self.right_cell(a)) for a in cp.ins[:-1]]
                h = [fv(self.right_cell(a)) for a in cp.outs[:-1]]
                tn.add(self.coupon_tensor(p), tuple([fv(L)] + g + [fv(R)] + h), f"coupon {p}")
        for v in list(tn.dims):
            tn.dims.setdefault(v, datum.rank)
        return tn

    def evaluate(self, datum: OrbifoldDatum, cap: int = DEFAULT_CAP) -> complex:
        return complex(contract(self.network(datum), cap))

    # -- validation ------------------------------------------------------------

    def check(self) -> None:
        """Structural validation; raises DiagramError on the first problem."""
        seen: dict[int, list] = {}
        for cid, c in self.cells.items():
            if c.region not in self.drawn:
                raise DiagramError(f"cell {cid} lies in an undrawn region")
            n = len(c.sides)
            for i in range(n):
                if self._end(c.sides[i]) != self._start(c.sides[(i + 1) % n]):
                    raise DiagramError(f"cell {cid} is not a closed polygon at side {i}")
            for a, s, pr in c.sides:
                seen.setdefault(a, []).append((s, pr, c.region))
        for a, A in self.arcs.items():
            got = seen.get(a, [])
            if A.kind == "edge":
                want = sorted((_SENSE[p], p) for p in EDGE_PAIRS if self.T.ewings[A.edge][p] in self.drawn)
                if sorted((s, pr) for s, pr, _ in got) != want:
                    raise DiagramError(f"edge arc {a} has sides {got}, expected {want}")
            else:
                if sorted(s for s, _, _ in got) != [-1, 1] or any(r != A.region for _, _, r in got):
                    raise DiagramError(f"{A.kind} arc {a} must bound exactly two cells of its region")
            if A.kind == "strand" and A.color not in self.colors:
                raise DiagramError(f"strand {a} has unknown color {A.color!r}")
        for p, pt in self.points.items():
            ins, outs = self.strands_at(p)
            if pt.kind == "switch":
                if len(ins) != 1 or len(outs) != 1:
                    raise DiagramError(f"switch {p} needs one incoming and one outgoing strand")
                if pt.switch not in SWITCH_OF:
                    raise DiagramError(f"switch {p} is not positive: {pt.switch}")
                src, tgt = pt.switch
                x, y = self.arcs[ins[0]], self.arcs[outs[0]]
                if x.color != y.color:
                    raise DiagramError(f"switch {p} changes color")
                if x.region != self.T.ewings[pt.edge][src] or y.region != self.T.ewings[pt.edge][tgt]:
                    raise DiagramError(f"switch {p} does not match its wings")
            elif pt.kind == "coupon":
                cp = self.coupons.get(p)
                if cp is None:
                    raise DiagramError(f"coupon {p} has no label")
                if self._coupon_arcs(p) != (cp.ins, cp.outs):
                    raise DiagramError(f"coupon {p}: stored arcs disagree with the drawing")
                if cp.label in BRAIDS:
                    if len(cp.ins) != 2 or len(cp.outs) != 2:
                        raise DiagramError(f"crossing {p} needs two inputs and two outputs")
                    c = [self.arcs[a].color for a in cp.ins + cp.outs]
                    if (c[2], c[3]) != (c[1], c[0]):
                        raise DiagramError(f"crossing {p}: outputs do not swap the inputs")
            elif pt.kind == "plain" and pt.edge is None:
                if len(ins) != len(outs) or len(ins) > 1:
                    raise DiagramError(f"point {p}: strands may not end or branch here")
                if ins and self.arcs[ins[0]].color != self.arcs[outs[0]].color:
                    raise DiagramError(f"point {p} changes color")
            elif pt.kind == "plain" and (ins or outs):
                raise DiagramError(f"point {p} on a 1-stratum carries a strand without a switch")
        for cid, c in self.cells.items():
            if not c.sides:
                raise DiagramError(f"cell {cid} is empty")

    # -- constructions ---------------------------------------------------------

    def some_cell(self, region: int) -> int:
        self.draw(region)
        return min(c for c, x in self.cells.items() if x.region == region)

    def add_loop(self, region: int, color: str, ccw: bool = True, cell: int | None = None) -> int:
        """Add a closed strand bounding a new disc; returns the loop arc."""
        cid = self.some_cell(region) if cell is None else cell
        c = self.cells[cid]
        P = self._start(c.sides[0])
        q = self._new()
        self.points[q] = Point("plain", region=region)
        k, lam = self._new(), self._new()
        self.arcs[k] = Arc("cut", P, q, region=region)
        self.arcs[lam] = Arc("strand", q, q, region=region, color=color)
        s = -1 if ccw else 1  # the outer cell sees the loop on its right when it runs counterclockwise
        c.sides = [(k, 1, None), (lam, s, None), (k, -1, None)] + c.sides
        d = self._new()
        self.cells[d] = Cell(region, [(lam, -s, None)])
        return lam

    def add_coupon(self, arc: int, label: str) -> int:
        """Put a one-in one-out coupon on a strand arc."""
        p, a1, a2 = self.subdivide(arc)
        self.points[p].kind = "coupon"
        self.coupons[p] = Coupon(label, [a1], [a2])
        return p

    def add_kink(self, arc: int, side: str, label: str = "braid") -> int:
        """Curl on a strand arc with the loop on its ``left`` or ``right``."""
        x, s1, s2 = self.subdivide(arc)
        A = self.arcs[s1]
        lam = self._new()
        self.arcs[lam] = Arc("strand", x, x, region=A.region, color=A.color)
        if side == "left":
            cid = self.left_cell(s1)
            i = self.side_index(cid, s1, 1)
            c = self.cells[cid]
            c.sides[i + 1:i + 1] = [(lam, -1, None)]
            self.cells[self._new()] = Cell(A.region, [(lam, 1, None)])
        elif side == "right":
            cid = self.right_cell(s2)
            i = self.side_index(cid, s2, -1)
            c = self.cells[cid]
            c.sides[i + 1:i + 1] = [(lam, 1, None)]
            self.cells[self._new()] = Cell(A.region, [(lam, -1, None)])
        else:
            raise DiagramError("side is 'left' or 'right'")
        self.make_coupon(x, label)
        return x

    def middle_piece(self, arc: int) -> int:
        _, _, rest = self.subdivide(arc)
        _, mid, _ = self.subdivide(rest)
        return mid

    # -- omega moves -----------------------------------------------------------

    def kink_sites(self) -> list[tuple]:
        out = []
        for p, cp in sorted(self.coupons.items()):
            if cp.label not in BRAIDS:
                continue
            loops = [a for a in cp.ins if a in cp.outs and self.arcs[a].tail == self.arcs[a].head == p]
            if len(loops) != 1:
                continue
            lam = loops[0]
            if len(set(cp.ins) | set(cp.outs)) != 3:
                continue
            for cid, c in self.cells.items():
                if c.sides in ([(lam, 1, None)], [(lam, -1, None)]):
                    out.append((p,))
        return out

    def flip_kink(self, p: int) -> int:
        """Move a curl to the other side of its strand (same crossing type)."""
        cp = self.coupons[p]
        (lam,) = [a for a in cp.ins if a in cp.outs]
        (s1,) = [a for a in cp.ins if a != lam]
        (s2,) = [a for a in cp.outs if a != lam]
        (disc,) = [cid for cid, c in self.cells.items() if c.sides in ([(lam, 1, None)], [(lam, -1, None)])]
        left = self.cells[disc].sides[0][1] > 0
        del self.cells[disc]
        cid, i = self.find_side(lam)
        del self.cells[cid].sides[i]
        del self.arcs[lam]
        del self.coupons[p]
        self.points[p].kind = "plain"
        # rejoin the strand through p
        A1 = self.arcs[s1]
        n = self._new()
        self.arcs[n] = Arc("strand", A1.tail, self.arcs[s2].head, region=A1.region, color=A1.color)
        for c in self.cells.values():
            new = []
            for a, s, pr in c.sides:
                if a == s1 and s > 0:
                    new.append((n, 1, None))
                elif a == s2 and s > 0:
                    continue
                elif a == s2 and s < 0:
                    new.append((n, -1, None))
                elif a == s1 and s < 0:
                    continue
                else:
                    new.append((a, s, pr))
            c.sides = new
        for q in self.coupons.values():
            q.outs = [n if a == s1 else a for a in q.outs]
            q.ins = [n if a == s2 else a for a in q.ins]
        del self.arcs[s1], self.arcs[s2], self.points[p]
        x = self.add_kink(n, "right" if left else "left", cp.label)
        self.normalize()
        return x

    def r2_sites(self) -> list[tuple]:
        out = []
        for cid in sorted(self.cells):
            c = self.cells[cid]
            strands = [a for a, _, _ in c.sides if self.arcs[a].kind == "strand"]
            once = [a for a in strands if strands.count(a) == 1]
            for a in once:
                for b in once:
                    if a == b or self.left_cell(b) == self.right_cell(b):
                        continue
                    for over in (True, False):
                        out.append((cid, a, b, over))
        return out

    def r2(self, cid: int, a: int, b: int, over: bool) -> tuple[int, int]:
        """Push strand arc ``a`` of cell ``cid`` across strand arc ``b``; ``a`` passes over if ``over``."""
        sa = self.cells[cid].sides[self.side_index(cid, a)][1]
        sb = self.cells[cid].sides[self.side_index(cid, b)][1]
        m = self.middle_piece(a)
        t = self.middle_piece(b)
        route, (xa, xb) = self._push(cid, m, sa, t, sb, None)
        for x in (xa, xb):
            ins, _ = self._coupon_arcs(x)
            self.make_coupon(x, "braid" if (ins[0] in route) == over else "braid-")
        self.normalize()
        return xa, xb

    def _push(self, cid: int, m: int, sa: int, t: int, sb: int, far_pair) -> tuple[set, tuple]:
        """Reroute the strand piece ``m`` (side sign ``sa``) around the far side of ``t``.

        ``t`` is a side of ``cid`` with sign ``sb``; for an edge arc the far
        side is the wing ``far_pair``.  Returns (new arcs, (x_a, x_b)) with
        ``x_a -> x_b`` the direction in which ``cid`` runs along ``t``.
        """
        color = self.arcs[m].color
        fwd = sa > 0
        sides = self.cells[cid].sides
        n = len(sides)
        im = self.side_index(cid, m, sa)
        it = self.side_index(cid, t, sb)
        q1 = self._start(sides[im])
        xa, xb = self._start(sides[it]), self._end(sides[it])
        u1, _, Y = self.split_cell(cid, (im + 1) % n, it, not fwd, "strand", color)
        ym = self.side_index(Y, m, sa)
        if self._start(self.cells[Y].sides[1]) != xb or self._start(self.cells[Y].sides[ym]) != q1:
            raise DiagramError("push: unexpected cell shape")
        u2, _, _ = self.split_cell(Y, 1, ym, not fwd, "strand", color)
        if far_pair is None:
            cL, iL = self.find_side(t, -sb)
        else:
            cL, iL = self.find_side(t, _SENSE[far_pair], far_pair)
        w, _, _ = self.split_cell(cL, iL, (iL + 1) % len(self.cells[cL].sides), fwd, "strand", color)
        self.arcs[m].kind, self.arcs[m].color = "cut", None
        return {u1, u2, w}, (xa, xb)

    def r2_inverse_sites(self) -> list[tuple]:
        out = []
        for cid in sorted(self.cells):
            c = self.cells[cid]
            if len(c.sides) != 2:
                continue
            (w, _, _), (t, _, _) = c.sides
            if w == t or {self.arcs[w].kind, self.arcs[t].kind} != {"strand"}:
                continue
            ends = {self.arcs[w].tail, self.arcs[w].head}
            if len(ends) != 2 or ends != {self.arcs[t].tail, self.arcs[t].head}:
                continue
            if not all(p in self.coupons and self.coupons[p].label in BRAIDS for p in ends):
                continue
            for pull in (w, t):
                if self._over_both(pull) is not None:
                    out.append((cid, pull))
        return out

    def _over_both(self, arc: int):
        A = self.arcs[arc]
        flags = []
        for p, is_head in ((A.tail, False), (A.head, True)):
            cp = self.coupons[p]
            lst = cp.ins if is_head else cp.outs
            if arc not in lst:
                return None
            if is_head:
                pos = cp.ins.index(arc)
            else:
                pos = 1 - cp.outs.index(arc)  # the input feeding this output
            over_pos = 0 if cp.label == "braid" else 1
            flags.append(pos == over_pos)
        return flags[0] if flags[0] == flags[1] else None

    def r2_inverse(self, lens: int, pull: int) -> None:
        """Pull strand arc ``pull`` back across the other side of the lens cell."""
        W = self.arcs[pull]
        x, y = W.tail, W.head
        (t,) = [a for a, _, _ in self.cells[lens].sides if a != pull]
        cin, cout = self.coupons[x], self.coupons[y]
        u_in = cin.ins[1 - cin.outs.index(pull)]
        u_out = cout.outs[1 - cout.ins.index(pull)]
        st = [s for a, s, _ in self.cells[lens].sides if a == t][0]
        kmid = self.find_side(t, -st)[0]
        self._unpush(kmid, u_in, u_out, [pull])
        for p in (x, y):
            del self.coupons[p]
            self.points[p].kind = "plain"
        self.normalize()

    def _unpush(self, kmid: int, u_in: int, u_out: int, middle: list) -> None:
        color = self.arcs[u_in].color
        q_in, a, b = self.subdivide(u_in)
        if u_out == u_in:
            u_out = a
        q_out, a1, _ = self.subdivide(u_out)
        kmid = self._cell_with(b, q_in, q_out, self.arcs[b].region)
        self.split_cell(kmid, self.corner(kmid, q_in), self.corner(kmid, q_out), True, "strand", color)
        for a in [b, *middle, a1]:
            self.arcs[a].kind, self.arcs[a].color = "cut", None

    def _cell_with(self, arc: int, p: int, q: int, region: int) -> int:
        hits = []
        for cid, c in self.cells.items():
            if c.region != region or not any(a == arc for a, _, _ in c.sides):
                continue
            starts = [self._start(s) for s in c.sides]
            if starts.count(p) == 1 and starts.count(q) == 1:
                hits.append(cid)
        if len(hits) != 1:
            raise DiagramError("no unique cell holds both corners")
        return hits[0]

    def bigon_sites(self) -> list[tuple]:
        out = []
        for cid in sorted(self.cells):
            c = self.cells[cid]
            strands = [a for a, _, _ in c.sides if self.arcs[a].kind == "strand"]
            once = [a for a in strands if strands.count(a) == 1]
            for a in once:
                for e_arc, s, pA in c.sides:
                    if pA is None:
                        continue
                    for pB in EDGE_PAIRS:
                        if (pA, pB) in SWITCH_OF:
                            out.append((cid, a, e_arc, pA, pB))
        return out

    def bigon(self, cid: int, a: int, e_arc: int, pA, pB) -> tuple[int, int]:
        """Push strand arc ``a`` through the edge arc into the wing ``pB``."""
        e = self.arcs[e_arc].edge
        self.draw(self.T.ewings[e][pB])
        sa = self.cells[cid].sides[self.side_index(cid, a)][1]
        m = self.middle_piece(a)
        em = self.middle_piece(e_arc)
        route, (xa, xb) = self._push(cid, m, sa, em, _SENSE[pA], pB)
        (w,) = [r for r in route if self.arcs[r].region == self.T.ewings[e][pB] and
                {self.arcs[r].tail, self.arcs[r].head} == {xa, xb}]
        for x in (xa, xb):
            (i,), (o,) = self.strands_at(x)
            self.points[x].kind = "switch"
            self.points[x].switch = (pB if i == w else pA, pB if o == w else pA)
        self.normalize()
        return xa, xb

    def bigon_inverse_sites(self) -> list[tuple]:
        out = []
        for cid in sorted(self.cells):
            c = self.cells[cid]
            if len(c.sides) != 2:
                continue
            kinds = {self.arcs[a].kind for a, _, _ in c.sides}
            if kinds != {"strand", "edge"}:
                continue
            (w,) = [a for a, _, _ in c.sides if self.arcs[a].kind == "strand"]
            (em, _, pB) = [x for x in c.sides if self.arcs[x[0]].kind == "edge"][0]
            W, E = self.arcs[w], self.arcs[em]
            if {W.tail, W.head} != {E.tail, E.head} or W.tail == W.head:
                continue
            if any(self.points[p].kind != "switch" for p in (W.tail, W.head)):
                continue
            out.append((cid, w, em, pB))
        return out

    def bigon_inverse(self, lens: int, w: int, em: int, pB) -> None:
        W = self.arcs[w]
        x, y = W.tail, W.head
        pA = self.points[x].switch[0]
        (u_in,), _ = self.strands_at(x)
        _, (u_out,) = self.strands_at(y)
        kmid = self.find_side(em, _SENSE[pA], pA)[0]
        self._unpush(kmid, u_in, u_out, [w])
        for p in (x, y):
            self.points[p].kind, self.points[p].switch = "plain", None
        self.normalize()

    # vertex slides

    def _inner_switches(self, v: int) -> dict:
        P = self.vpoint[v]
        out = {}
        for k in range(4):
            e, end = self.T.vends[v][k]
            if e not in self.chains:
                continue
            arc = self.innermost(e, end)
            A = self.arcs[arc]
            if A.tail == A.head or P not in (A.tail, A.head):
                continue
            q = A.head if A.tail == P else A.tail
            if self.points[q].kind == "switch":
                out[q] = (k, e, end, arc)
        return out

    def slide_sites(self) -> list[tuple]:
        out = []
        cycles = coherent_cycles()
        for v in sorted(self.vpoint):
            inner = self._inner_switches(v)
            for p1 in sorted(inner):
                seq = [p1]
                while True:
                    for ci in range(len(cycles)):
                        if self._slide_plan(v, tuple(seq), ci) is not None:
                            out.append((v, tuple(seq), ci))
                    _, (o,) = self.strands_at(seq[-1])
                    nxt = self.arcs[o].head
                    if nxt not in inner or nxt in seq:
                        break
                    seq.append(nxt)
        return out

    def _slide_plan(self, v: int, seq: tuple, ci: int):
        inner = self._inner_switches(v)
        if any(p not in inner for p in seq):
            return None
        cyc = coherent_cycles()[ci]
        sectors = []
        for i, p in enumerate(seq):
            k = inner[p][0]
            src, tgt = self.points[p].switch
            a, b = _vertex_pair(k, src), _vertex_pair(k, tgt)
            if i == 0:
                sectors.append(a)
            elif sectors[-1] != a:
                return None
            sectors.append(b)
        if len(set(sectors)) != len(sectors) or any(w not in cyc for w in sectors):
            return None
        n = len(cyc)
        j = cyc.index(sectors[0])
        if all(cyc[(j + i) % n] == w for i, w in enumerate(sectors)):
            step = -1
        elif all(cyc[(j - i) % n] == w for i, w in enumerate(sectors)):
            step = 1
        else:
            return None
        path = [sectors[0]]
        while path[-1] != sectors[-1]:
            path.append(cyc[(cyc.index(path[-1]) + step) % n])
        for i, p in enumerate(seq):
            k = inner[p][0]
            if not set(sectors[i]) | set(sectors[i + 1]) <= set(TRIPLES[k]):
                return None
        if any(self.T.vwings[v][w] not in self.drawn for w in path):
            return None
        rays = []
        for x, y in zip(path, path[1:]):
            (k,) = [k for k in range(4) if set(x) | set(y) <= set(TRIPLES[k])]
            e, end = self.T.vends[v][k]
            if e not in self.chains:
                return None
            rays.append((k, e, end))
        # the strand pieces hugging v must bound empty triangles
        for i in range(len(seq) - 1):
            k, e, end, arc = inner[seq[i]]
            k2, e2, end2, arc2 = inner[seq[i + 1]]
            cid, _ = self.find_side(arc, pair=_local_pair(k, sectors[i + 1]))
            arcs = sorted(a for a, _, _ in self.cells[cid].sides)
            _, (o,) = self.strands_at(seq[i])
            if arcs != sorted([arc, arc2, o]):
                return None
        return sectors, path, rays

    def slide(self, v: int, seq: tuple, ci: int) -> None:
        """Slide the strand piece through ``seq`` across the 0-stratum ``v``."""
        plan = self._slide_plan(v, seq, ci)
        if plan is None:
            raise DiagramError("not a slide site")
        sectors, path, rays = plan
        (u0,), _ = self.strands_at(seq[0])
        color = self.arcs[u0].color
        old = [self.strands_at(p)[1][0] for p in seq[:-1]]
        q0, _, u0b = self.subdivide(u0)
        _, (um,) = self.strands_at(seq[-1])
        qm, uma, _ = self.subdivide(um)
        rs = []
        for k, e, end in rays:
            r, _, _ = self.subdivide(self.innermost(e, end))
            rs.append(r)
        pts = [q0] + rs + [qm]
        for x, P, Q in zip(path, pts, pts[1:]):
            region = self.T.vwings[v][x]
            hits = []
            for cid, c in self.cells.items():
                if c.region != region:
                    continue
                starts = [self._start(s) for s in c.sides]
                if starts.count(P) == 1 and starts.count(Q) == 1:
                    hits.append(cid)
            if len(hits) != 1:
                raise DiagramError("slide: no unique cell for the new strand piece")
            cid = hits[0]
            self.split_cell(cid, self.corner(cid, P), self.corner(cid, Q), True, "strand", color)
        for a in [u0b, *old, uma]:
            self.arcs[a].kind, self.arcs[a].color = "cut", None
        for p in seq:
            self.points[p].kind, self.points[p].switch = "plain", None
        for (k, e, end), r, x, y in zip(rays, rs, path, path[1:]):
            self.points[r].kind = "switch"
            self.points[r].switch = (_local_pair(k, x), _local_pair(k, y))
        self.normalize()

    # BLT moves on the part of the skeleton the plexus does not touch

    def _frozen(self, T: Tables) -> tuple:
        def region(r):
            return (T.strata.get(r), sorted((e, p) for e, w in T.ewings.items() for p, x in w.items() if x == r))

        return (
            {r: region(r) for r in sorted(self.drawn)},
            {e: (T.strata.get(e), T.ewings.get(e), T.eends.get(e)) for e in sorted(self.chains)},
            {v: (T.strata.get(v), T.vwings.get(v), T.vends.get(v)) for v in sorted(self.vpoint)},
        )

    def blt_sites(self, kinds=_moves.KINDS) -> list:
        sk = self.T.to_skeleton()
        return [app for k in kinds for app in _moves.find_sites(sk, k)]

    def blt(self, app) -> None:
        sk = self.T.to_skeleton()
        new = _moves.apply(sk, app)
        T = Tables.of(new)
        if self._frozen(T) != self._frozen(self.T):
            raise DiagramError("move touches the drawn part of the skeleton")
        self.sk, self.T = new, T

    # random moves

    def sites(self, kind: str) -> list:
        """Candidate sites of a move kind; ``apply`` may still decline one (raising DiagramError)."""
        return {
            "w0": lambda: [(a,) for a in self.blt_sites()],
            "w1": self.kink_sites,
            "w2": self.r2_sites,
            "w2-": self.r2_inverse_sites,
            "w4": self.bigon_sites,
            "w4-": self.bigon_inverse_sites,
            "w5": self.slide_sites,
        }[kind]()

    def apply(self, kind: str, site: tuple) -> None:
        {
            "w0": self.blt,
            "w1": self.flip_kink,
            "w2": self.r2,
            "w2-": self.r2_inverse,
            "w4": self.bigon,
            "w4-": self.bigon_inverse,
            "w5": self.slide,
        }[kind](*site)


def random_moves(d: Diagram, n: int, seed: int = 0, kinds=OMEGA_KINDS, max_cells: int = 40,
                 max_tries: int = 200) -> tuple[Diagram, list]:
    """Apply ``n`` random moves; every step is validated structurally."""
    rng = random.Random(seed)
    log = []
    cur = d
    tries = 0
    while len(log) < n and tries < max_tries:
        tries += 1
        options = {}
        for k in kinds:
            if k in ("w2", "w4") and len(cur.cells) >= max_cells:
                continue
            s = cur.sites(k)
            if s:
                options[k] = s
        if not options:
            break
        k = rng.choice(sorted(options))
        site = rng.choice(options[k])
        nxt = cur.copy()
        try:
            nxt.apply(k, site)
            nxt.check()
        except (DiagramError, _moves.MoveError, WilsonError):
            continue
        cur = nxt
        log.append((k, site))
    return cur, log


# ---------------------------------------------------------------------------------
# standard diagrams


def first_sphere(sk: Skeleton) -> int:
    """A 2-stratum of ``sk`` to host small diagrams (a sphere if there is one)."""
    regs = sorted((s for s in sk.of_dim(2)), key=lambda s: (-s.chi, s.id))
    return regs[0].id


def unknot(sk: Skeleton, X: WilsonObject, region: int | None = None) -> Diagram:
    d = Diagram(sk, {"X": X})
    d.add_loop(first_sphere(sk) if region is None else region, "X")
    d.normalize()
    return d


def hopf(sk: Skeleton, X: WilsonObject, Y: WilsonObject, region: int | None = None) -> Diagram:
    """Positive Hopf link: both crossings are ``braid`` coupons."""
    d = Diagram(sk, {"X": X, "Y": Y})
    r = first_sphere(sk) if region is None else region
    a = d.add_loop(r, "X")
    b = d.add_loop(r, "Y")
    outer = d.right_cell(a)
    xa, xb = d.r2(outer, a, b, True)
    for p in (xa, xb):
        d.coupons[p].label = "braid"
    d.check()
    return d


def kinked(sk: Skeleton, X: WilsonObject, side: str, label: str = "braid", region: int | None = None) -> Diagram:
    d = unknot(sk, X, region)
    (lam,) = [a for a, A in d.arcs.items() if A.kind == "strand"]
    d.add_kink(lam, side, label)
    d.normalize()
    d.check()
    return d


def stacked_coupons(sk: Skeleton, X: WilsonObject, Y: WilsonObject, Z: WilsonObject, f, g,
                    region: int | None = None) -> Diagram:
    """Theta graph: ``f: X -> Y Z`` followed by ``g: Y Z -> X`` on a loop."""
    d = Diagram(sk, {"X": X, "Y": Y, "Z": Z}, {"f": f, "g": g})
    lam = d.add_loop(first_sphere(sk) if region is None else region, "X")
    pf = d.add_coupon(lam, "f")
    (rest,) = d.coupons[pf].outs
    pg = d.add_coupon(rest, "g")
    # split the piece between f and g into Y (left) and Z (right)
    (mid,) = d.coupons[pf].outs
    A = d.arcs[mid]
    A.color = "Y"
    L = d.left_cell(mid)
    z, _, _ = d.split_cell(L, d.corner(L, pf), d.corner(L, pg), True, "strand", "Z")
    # the new arc lies left of mid; make it the left strand Y and mid the right strand Z
    d.arcs[z].color, A.color = "Y", "Z"
    d.coupons[pf].outs = list(d._coupon_arcs(pf)[1])
    d.coupons[pg].ins = list(d._coupon_arcs(pg)[0])
    d.normalize()
    d.check()
    return d


def composite_coupon(sk: Skeleton, X: WilsonObject, h, region: int | None = None) -> Diagram:
    d = Diagram(sk, {"X": X}, {"h": h})
    lam = d.add_loop(first_sphere(sk) if region is None else region, "X")
    d.add_coupon(lam, "h")
    d.normalize()
    d.check()
    return d


def compose(f: np.ndarray, g: np.ndarray, k: int, m: int, l: int) -> np.ndarray:
    """Coupon tensor of ``g . f`` for ``f`` with k inputs, m outputs and ``g`` with m inputs, l outputs.

    The faces between the middle strands are summed with no weight.
    """
    fi = ["L"] + [f"g{i}" for i in range(k - 1)] + ["R"] + [f"m{i}" for i in range(m - 1)]
    gi = ["L"] + [f"m{i}" for i in range(m - 1)] + ["R"] + [f"h{i}" for i in range(l - 1)]
    out = ["L"] + [f"g{i}" for i in range(k - 1)] + ["R"] + [f"h{i}" for i in range(l - 1)]
    names = {x: chr(ord("a") + i) for i, x in enumerate(dict.fromkeys(fi + gi + out))}
    spec = "".join(names[x] for x in fi) + "," + "".join(names[x] for x in gi) + "->" + "".join(names[x] for x in out)
    return np.einsum(spec, f, g)


def twist(datum: OrbifoldDatum, X: WilsonObject, sk: Skeleton | None = None, tol: float = 1e-10) -> tuple[complex, complex]:
    """(left, right) twist scalars: curl diagrams divided by the unknot."""
    if sk is None:
        from .library import get

        sk = get("s3_two_balls")
    base = unknot(sk, X).evaluate(datum)
    if abs(base) < 1e-300:
        raise WilsonError(f"{X.label}: the unknot evaluates to zero")
    left = kinked(sk, X, "left").evaluate(datum) / base
    right = kinked(sk, X, "right").evaluate(datum) / base
    if abs(left - right) > tol:
        raise WilsonError(f"{X.label}: left twist {left} and right twist {right} disagree")
    return left, right


# ---------------------------------------------------------------------------------
# serialization


def color_from_doc(doc: dict, datum: OrbifoldDatum) -> WilsonObject:
    from .wilson import pointed_object, unit_object

    if doc.get("unit"):
        return unit_object(datum)
    if "pointed" in doc:
        p = doc["pointed"]
        n = datum.rank
        chi = np.exp(2j * np.pi * np.asarray(p["chi"]) / n)
        return pointed_object(datum, int(p["g"]) % n, chi, doc.get("label"))
    return WilsonObject.from_doc(doc["object"])


def to_doc(d: Diagram, manifold: str = "", color_docs: dict | None = None) -> dict:
    strands = {a: {"tail": A.tail, "head": A.head, "color": A.color}
               for a, A in d.arcs.items() if A.kind == "strand"}
    return {
        "manifold": manifold or d.sk.name,
        "skeleton": d.T.to_skeleton().to_doc(),
        "colors": color_docs if color_docs is not None else {k: {"object": v.to_doc()} for k, v in d.colors.items()},
        "morphisms": {k: {"shape": list(np.shape(v)), "re": np.real(v).ravel().tolist(),
                          "im": np.imag(v).ravel().tolist()} for k, v in d.morphisms.items()},
        "strands": {str(k): v for k, v in strands.items()},
        "coupons": {str(p): {"label": c.label, "ins": c.ins, "outs": c.outs,
                             "over": {"braid": "left", "braid-": "right"}.get(c.label)}
                    for p, c in d.coupons.items()},
        "switches": {str(p): {"edge": pt.edge, "source": list(pt.switch[0]), "target": list(pt.switch[1])}
                     for p, pt in d.points.items() if pt.kind == "switch"},
        "points": {str(k): asdict(v) for k, v in d.points.items()},
        "arcs": {str(k): asdict(v) for k, v in d.arcs.items()},
        "cells": {str(k): {"region": c.region, "sides": [[a, s, list(p) if p else None] for a, s, p in c.sides]}
                  for k, c in d.cells.items()},
        "chains": {str(k): v for k, v in d.chains.items()},
        "vertex_points": {str(k): v for k, v in d.vpoint.items()},
        "circle_dir": {str(k): v for k, v in d.circle_dir.items()},
        "drawn": sorted(d.drawn),
    }


def from_doc(doc: dict | str, datum: OrbifoldDatum) -> Diagram:
    if isinstance(doc, str):
        doc = json.loads(doc)
    sk = Skeleton.from_doc(doc["skeleton"])
    sk.name = doc.get("manifold", sk.name)
    colors = {k: color_from_doc(v, datum) for k, v in doc["colors"].items()}
    morph = {}
    for k, v in doc.get("morphisms", {}).items():
        morph[k] = (np.asarray(v["re"]) + 1j * np.asarray(v["im"])).reshape(v["shape"])
    d = Diagram(sk, colors, morph)

    def pt(x):
        x = dict(x)
        if x.get("switch") is not None:
            x["switch"] = tuple(tuple(p) for p in x["switch"])
        return Point(**x)

    d.points = {int(k): pt(v) for k, v in doc["points"].items()}
    d.arcs = {int(k): Arc(**v) for k, v in doc["arcs"].items()}
    d.cells = {int(k): Cell(v["region"], [(a, s, tuple(p) if p else None) for a, s, p in v["sides"]])
               for k, v in doc["cells"].items()}
    d.coupons = {int(k): Coupon(v["label"], list(v["ins"]), list(v["outs"])) for k, v in doc["coupons"].items()}
    d.chains = {int(k): list(v) for k, v in doc["chains"].items()}
    d.vpoint = {int(k): v for k, v in doc["vertex_points"].items()}
    d.circle_dir = {int(k): v for k, v in doc["circle_dir"].items()}
    d.drawn = set(doc["drawn"])
    d._n = 1 + max([*d.points, *d.arcs, *d.cells, 0])
    d.check()
    return d
