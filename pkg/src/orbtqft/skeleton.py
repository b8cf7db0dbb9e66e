"""Combinatorial skeleta of 3-manifolds and surfaces.

A skeleton is a list of strata plus flags.  Every stratum of dimension ``k``
carries ``4 - k`` germs, each naming the 3-stratum it belongs to.  A flag
records an incidence of a lower stratum ``t`` with a higher stratum ``s`` and
the injection ``S_3(s) -> S_3(t)`` of germ sets, written as a tuple whose
``i``-th entry is the germ index in ``t`` of germ ``i`` of ``s``.

Flags come in three kinds: end of a 1-stratum at a 0-stratum (``end`` is 0 or
1), wing of a 2-stratum at a 1-stratum, and wing of a 2-stratum at a
0-stratum.  Incidences with 3-strata are implicit in the germ lists.

A local order is stored as a *canonical form*: germ lists are sorted by the
order, so every flag injection is increasing.  ``apply_order`` converts an
unordered skeleton into canonical form.

0-strata carry a chirality ``sign`` relative to the listed germ order.  In
canonical form the end of a 1-stratum omitting germ ``k`` at a 0-stratum of
sign ``s`` points into the 0-stratum iff ``s * (-1)**k == -1``; every arc must
have one incoming and one outgoing end.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

Side = str  # "in" or "out"


class SkeletonError(ValueError):
    pass


@dataclass(frozen=True)
class Stratum:
    id: int
    dim: int
    germs: tuple[int, ...]
    chi: int = 1
    boundary_chi: int = 0
    ball_certified: bool = False
    sign: int = 0
    circle: bool = False
    # components of the stratum's intersection with the boundary:
    # 3- and 2-strata: (side, key); 1-strata: (side, key, end)
    bnd: tuple[tuple, ...] = ()

    @property
    def germ_count(self) -> int:
        return len(self.germs)

    @property
    def sides(self) -> set[str]:
        return {b[0] for b in self.bnd}


@dataclass(frozen=True)
class Flag:
    lower: int
    higher: int
    injection: tuple[int, ...]
    end: int | None = None


def chi_sym(st: Stratum) -> int:
    """Symmetric Euler characteristic ``2 chi - chi(boundary)``."""
    return 2 * st.chi - st.boundary_chi


def _perm_sign(p: Sequence[int]) -> int:
    s = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, msg: str) -> None:
        self.violations.append(msg)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations)}


class Skeleton:
    """Skeleton of a compact oriented 3-manifold (possibly with boundary)."""

    def __init__(
        self,
        strata: Iterable[Stratum],
        flags: Iterable[Flag],
        canonical: bool = False,
        name: str = "",
    ):
        self.strata: dict[int, Stratum] = {s.id: s for s in strata}
        self.flags: tuple[Flag, ...] = tuple(flags)
        self.canonical = canonical
        self.name = name

    # -- indexes -----------------------------------------------------------------
    def of_dim(self, d: int) -> list[Stratum]:
        return [s for s in self.strata.values() if s.dim == d]

    def ids(self, d: int) -> list[int]:
        return sorted(s.id for s in self.strata.values() if s.dim == d)

    @cached_property
    def flags_by_lower(self) -> dict[int, list[Flag]]:
        out: dict[int, list[Flag]] = {}
        for f in self.flags:
            out.setdefault(f.lower, []).append(f)
        return out

    @cached_property
    def flags_by_higher(self) -> dict[int, list[Flag]]:
        out: dict[int, list[Flag]] = {}
        for f in self.flags:
            out.setdefault(f.higher, []).append(f)
        return out

    def wings(self, t: int) -> dict[tuple[int, ...], int]:
        """Map from (sorted) germ pair of ``t`` to the incident 2-stratum."""
        out = {}
        for f in self.flags_by_lower.get(t, []):
            if self.strata[f.higher].dim == 2:
                out[tuple(sorted(f.injection))] = f.higher
        return out

    def ends_at(self, v: int) -> dict[int, tuple[int, int]]:
        """For a 0-stratum: omitted germ index -> (1-stratum, end)."""
        out = {}
        for f in self.flags_by_lower.get(v, []):
            if self.strata[f.higher].dim == 1:
                (k,) = set(range(4)) - set(f.injection)
                out[k] = (f.higher, f.end)
        return out

    def ends_of(self, e: int) -> dict[int, tuple[int, int]]:
        """For a 1-stratum: end -> (0-stratum, omitted germ index)."""
        out = {}
        for f in self.flags_by_higher.get(e, []):
            if self.strata[f.lower].dim == 0:
                (k,) = set(range(4)) - set(f.injection)
                out[f.end] = (f.lower, k)
        return out

    @property
    def is_closed(self) -> bool:
        return not any(s.bnd for s in self.strata.values())

    def counts(self) -> tuple[int, int, int, int]:
        c = [0, 0, 0, 0]
        for s in self.strata.values():
            c[s.dim] += 1
        return tuple(c)

    def euler_characteristic(self) -> int:
        return sum((-1) ** s.dim * s.chi for s in self.strata.values())

    def relabel(self) -> "Skeleton":
        """Renumber strata consecutively by (dim, id)."""
        order = sorted(self.strata.values(), key=lambda s: (s.dim, s.id))
        m = {s.id: i for i, s in enumerate(order)}
        strata = [replace(s, id=m[s.id], germs=tuple(m[g] for g in s.germs)) for s in order]
        flags = [Flag(m[f.lower], m[f.higher], f.injection, f.end) for f in self.flags]
        return Skeleton(strata, flags, self.canonical, self.name)

    # -- serialization -----------------------------------------------------------
    def to_doc(self) -> dict:
        return {
            "name": self.name,
            "canonical": self.canonical,
            "strata": [
                {
                    "id": s.id, "dim": s.dim, "germs": list(s.germs), "chi": s.chi,
                    "boundary_chi": s.boundary_chi, "ball": s.ball_certified,
                    "sign": s.sign, "circle": s.circle,
                    "bnd": [list(_jsonable(x) for x in b) for b in s.bnd],
                }
                for s in sorted(self.strata.values(), key=lambda s: s.id)
            ],
            "flags": [
                {"lower": f.lower, "higher": f.higher, "injection": list(f.injection), "end": f.end}
                for f in self.flags
            ],
        }

    @classmethod
    def from_doc(cls, doc: dict | str) -> "Skeleton":
        if isinstance(doc, str):
            doc = json.loads(doc)
        strata = [
            Stratum(
                id=int(s["id"]), dim=int(s["dim"]), germs=tuple(int(g) for g in s["germs"]),
                chi=int(s.get("chi", 1)), boundary_chi=int(s.get("boundary_chi", 0)),
                ball_certified=bool(s.get("ball", False)), sign=int(s.get("sign", 0)),
                circle=bool(s.get("circle", False)),
                bnd=tuple(tuple(_hashable(x) for x in b) for b in s.get("bnd", [])),
            )
            for s in doc["strata"]
        ]
        flags = [
            Flag(int(f["lower"]), int(f["higher"]), tuple(int(i) for i in f["injection"]),
                 None if f.get("end") is None else int(f["end"]))
            for f in doc["flags"]
        ]
        return cls(strata, flags, bool(doc.get("canonical", False)), doc.get("name", ""))

    def signature(self) -> tuple:
        """Isomorphism-invariant fingerprint (used as a cheap identity check)."""
        return canonical_signature(self)

    def __repr__(self) -> str:
        c = self.counts()
        return f"Skeleton({self.name!r}, v={c[0]}, e={c[1]}, r={c[2]}, b={c[3]})"


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


def _hashable(x):
    if isinstance(x, list):
        return tuple(_hashable(y) for y in x)
    return x


# ---------------------------------------------------------------------------------
# validation


def validate(sk: Skeleton) -> ValidationReport:
    rep = ValidationReport()
    S = sk.strata
    for s in S.values():
        if s.dim not in (0, 1, 2, 3):
            rep.add(f"stratum {s.id}: bad dimension {s.dim}")
            continue
        if len(s.germs) != 4 - s.dim:
            rep.add(f"stratum {s.id}: dim {s.dim} needs {4 - s.dim} germs, has {len(s.germs)}")
            continue
        for g in s.germs:
            if g not in S or S[g].dim != 3:
                rep.add(f"stratum {s.id}: germ target {g} is not a 3-stratum")
        if s.dim == 3:
            if s.germs != (s.id,):
                rep.add(f"3-stratum {s.id}: germ must target itself")
            if not s.ball_certified:
                rep.add(f"3-stratum {s.id}: not certified as a ball")
            elif s.chi != 1:
                rep.add(f"3-stratum {s.id}: ball must have chi = 1")
            if {"in", "out"} <= s.sides:
                rep.add(f"3-stratum {s.id}: meets both in- and out-boundary")
        if s.dim == 2 and s.chi > 2:
            rep.add(f"2-stratum {s.id}: chi {s.chi} > 2")
        if s.dim == 0 and s.sign not in (1, -1):
            rep.add(f"0-stratum {s.id}: chirality sign must be +-1")
        if s.dim == 1 and s.circle and s.chi != 0:
            rep.add(f"1-stratum {s.id}: circle must have chi = 0")
    if not rep.ok:
        return rep

    for f in sk.flags:
        if f.lower not in S or f.higher not in S:
            rep.add(f"flag {f}: unknown stratum")
            continue
        lo, hi = S[f.lower], S[f.higher]
        if not lo.dim < hi.dim < 3:
            rep.add(f"flag {f}: bad dimensions {lo.dim} -> {hi.dim}")
            continue
        if len(f.injection) != len(hi.germs) or len(set(f.injection)) != len(f.injection):
            rep.add(f"flag {f}: injection has wrong size or repeats")
            continue
        if any(not 0 <= i < len(lo.germs) for i in f.injection):
            rep.add(f"flag {f}: injection out of range")
            continue
        for i, j in enumerate(f.injection):
            if hi.germs[i] != lo.germs[j]:
                rep.add(f"flag {f}: germ {i} of {hi.id} targets {hi.germs[i]}, image targets {lo.germs[j]}")
        if (lo.dim == 0) != (f.end is not None and hi.dim == 1):
            if lo.dim == 0 and hi.dim == 1:
                rep.add(f"flag {f}: end flag needs an end index")
        if sk.canonical and list(f.injection) != sorted(f.injection):
            rep.add(f"flag {f}: injection is not order preserving")
    if not rep.ok:
        return rep

    for e in sk.of_dim(1):
        wf = [f for f in sk.flags_by_lower.get(e.id, [])]
        pairs = sorted(tuple(sorted(f.injection)) for f in wf)
        if pairs != [(0, 1), (0, 2), (1, 2)]:
            rep.add(f"1-stratum {e.id}: wings {pairs} are not the three germ pairs")
        ends = [f for f in sk.flags_by_higher.get(e.id, []) if S[f.lower].dim == 0]
        bends = [b for b in e.bnd]
        if e.circle:
            if ends or bends:
                rep.add(f"1-stratum {e.id}: circle with ends")
        else:
            idx = sorted([f.end for f in ends] + [b[2] for b in bends])
            if idx != [0, 1]:
                rep.add(f"1-stratum {e.id}: arc ends {idx} != [0, 1]")
    for v in sk.of_dim(0):
        flags = sk.flags_by_lower.get(v.id, [])
        pairs = sorted(tuple(sorted(f.injection)) for f in flags if S[f.higher].dim == 2)
        if pairs != sorted(itertools.combinations(range(4), 2)):
            rep.add(f"0-stratum {v.id}: wings {pairs} are not the six germ pairs")
        triples = sorted(tuple(sorted(f.injection)) for f in flags if S[f.higher].dim == 1)
        if triples != sorted(itertools.combinations(range(4), 3)):
            rep.add(f"0-stratum {v.id}: ends {triples} are not the four germ triples")
    if not rep.ok:
        return rep

    # wing compatibility at ends
    for f in sk.flags:
        if S[f.lower].dim != 0 or S[f.higher].dim != 1:
            continue
        vw = {tuple(g.injection): g.higher for g in sk.flags_by_lower[f.lower] if S[g.higher].dim == 2}
        for g in sk.flags_by_lower[f.higher]:
            composed = tuple(f.injection[i] for i in g.injection)
            if vw.get(composed) != g.higher:
                rep.add(
                    f"0-stratum {f.lower}, 1-stratum {f.higher}: wing {g.higher} at {g.injection} "
                    f"does not match the 0-stratum wing at {composed}"
                )
    if sk.canonical:
        for e in sk.of_dim(1):
            if e.circle:
                continue
            dirs = []
            for end, (v, k) in sk.ends_of(e.id).items():
                dirs.append(S[v].sign * (-1) ** k)
            if len(dirs) == 2 and dirs[0] == dirs[1]:
                rep.add(f"1-stratum {e.id}: both ends point the same way")
    return rep


# ---------------------------------------------------------------------------------
# local orders


LocalOrder = dict[int, tuple[int, ...]]  # stratum id -> rank of each listed germ


def _comparisons(sk: Skeleton):
    """Triples constraints: for each stratum and germ triple, the three pair relations.

    A relation is (region, flip) meaning: for the lower pair (i, j) with i < j
    in the listing, ``i`` precedes ``j`` iff ``bit(region) == flip``.
    """
    rel: dict[int, dict[tuple[int, int], tuple[int, int]]] = {}
    for f in sk.flags:
        lo, hi = sk.strata[f.lower], sk.strata[f.higher]
        if hi.dim != 2:
            continue
        i, j = f.injection
        # bit 0: region germ 0 < germ 1
        if i < j:
            rel.setdefault(lo.id, {})[(i, j)] = (hi.id, 0)
        else:
            rel.setdefault(lo.id, {})[(j, i)] = (hi.id, 1)
    return rel


def solve_local_order(
    sk: Skeleton,
    fixed: Mapping[int, int] | None = None,
    cap: int = 10_000,
    first: bool = False,
) -> list[LocalOrder]:
    """All local orders of ``sk`` (as germ ranks per stratum), up to ``cap``.

    ``fixed`` pins the orientation bit of some 2-strata: 0 means the listed
    germ order, 1 the reverse.
    """
    rel = _comparisons(sk)
    regions = sk.ids(2)
    fixed = dict(fixed or {})
    # constraints: for each lower stratum and each germ triple i<j<k, the regions involved
    cons: list[tuple[tuple[int, int], tuple[int, int], tuple[int, int]]] = []
    for t, r in rel.items():
        n = len(sk.strata[t].germs)
        for i, j, k in itertools.combinations(range(n), 3):
            cons.append((r[(i, j)], r[(j, k)], r[(i, k)]))
    by_region: dict[int, list[int]] = {}
    for ci, c in enumerate(cons):
        for reg, _ in c:
            by_region.setdefault(reg, []).append(ci)

    # order variables so that constrained regions are adjacent
    order: list[int] = []
    seen: set[int] = set()
    for reg in sorted(regions, key=lambda r: (r not in fixed, r)):
        stack = [reg]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            order.append(x)
            for ci in by_region.get(x, []):
                for y, _ in cons[ci]:
                    if y not in seen:
                        stack.append(y)

    bits: dict[int, int] = {}
    out: list[LocalOrder] = []

    def ok(ci: int) -> bool:
        (a, fa), (b, fb), (c, fc) = cons[ci]
        if a not in bits or b not in bits or c not in bits:
            return True
        ij = bits[a] == fa
        jk = bits[b] == fb
        ik = bits[c] == fc
        # cyclic iff i<j, j<k, k<i or the reverse
        return not ((ij and jk and not ik) or (not ij and not jk and ik))

    def rec(pos: int) -> bool:
        if pos == len(order):
            out.append(_ranks_from_bits(sk, rel, bits))
            return first or len(out) >= cap
        reg = order[pos]
        choices = (fixed[reg],) if reg in fixed else (0, 1)
        for b in choices:
            bits[reg] = b
            if all(ok(ci) for ci in by_region.get(reg, [])):
                if rec(pos + 1):
                    return True
            del bits[reg]
        return False

    rec(0)
    return out


def _ranks_from_bits(sk: Skeleton, rel, bits: Mapping[int, int]) -> LocalOrder:
    ranks: LocalOrder = {}
    for s in sk.strata.values():
        if s.dim == 3:
            ranks[s.id] = (0,)
        elif s.dim == 2:
            ranks[s.id] = (0, 1) if bits.get(s.id, 0) == 0 else (1, 0)
        else:
            n = len(s.germs)
            wins = [0] * n
            for (i, j), (reg, flip) in rel[s.id].items():
                if bits.get(reg, 0) == flip:
                    wins[j] += 1
                else:
                    wins[i] += 1
            ranks[s.id] = tuple(wins)
    return ranks


def apply_order(sk: Skeleton, order: LocalOrder) -> Skeleton:
    """Canonical form of ``sk`` with germ lists sorted by ``order``."""
    perm: dict[int, list[int]] = {}
    rank: dict[int, tuple[int, ...]] = {}
    for s in sk.strata.values():
        r = tuple(order[s.id])
        if sorted(r) != list(range(len(s.germs))):
            raise SkeletonError(f"order at stratum {s.id} is not a permutation: {r}")
        rank[s.id] = r
        p = [0] * len(r)
        for i, x in enumerate(r):
            p[x] = i
        perm[s.id] = p  # new position -> old index
    strata = []
    for s in sk.strata.values():
        p = perm[s.id]
        germs = tuple(s.germs[i] for i in p)
        sign = s.sign * _perm_sign(p) if s.dim == 0 else s.sign
        strata.append(replace(s, germs=germs, sign=sign))
    flags = []
    for f in sk.flags:
        ph = perm[f.higher]
        rl = rank[f.lower]
        inj = tuple(rl[f.injection[ph[j]]] for j in range(len(ph)))
        if list(inj) != sorted(inj):
            raise SkeletonError(f"order is not compatible at flag {f}")
        flags.append(Flag(f.lower, f.higher, inj, f.end))
    return Skeleton(strata, flags, canonical=True, name=sk.name)


def identity_order(sk: Skeleton) -> LocalOrder:
    return {s.id: tuple(range(len(s.germs))) for s in sk.strata.values()}


def induces_global_order(sk: Skeleton, order: LocalOrder, among: Iterable[int] | None = None) -> bool:
    """True iff some total order on 3-strata restricts to ``order`` on every 2-stratum
    whose two germs lie in ``among`` (all 3-strata by default)."""
    among = set(sk.ids(3) if among is None else among)
    edges: set[tuple[int, int]] = set()
    for r in sk.of_dim(2):
        a, b = r.germs
        if a not in among or b not in among:
            continue
        lo, hi = (a, b) if order[r.id] == (0, 1) else (b, a)
        if lo == hi:
            return False
        edges.add((lo, hi))
    # acyclicity check
    succ: dict[int, set[int]] = {}
    for a, b in edges:
        succ.setdefault(a, set()).add(b)
    state: dict[int, int] = {}

    def dfs(x: int) -> bool:
        state[x] = 1
        for y in succ.get(x, ()):
            if state.get(y) == 1 or (state.get(y) is None and not dfs(y)):
                return False
        state[x] = 2
        return True

    return all(state.get(x) == 2 or dfs(x) for x in among)


@dataclass(frozen=True)
class OrientedSkeleton:
    """Orientations of all strata of ``base`` relative to its listed germ orders.

    ``region``: +1 if the 2-stratum normal points from listed germ 0 to germ 1;
    ``edge``: +1 if the 1-stratum runs from end 0 to end 1, 0 if undetermined;
    ``vertex``: chirality of the ordered frame.
    """

    base: Skeleton
    region: Mapping[int, int]
    edge: Mapping[int, int]
    vertex: Mapping[int, int]


def orient_from_order(sk: Skeleton, order: LocalOrder) -> OrientedSkeleton:
    can = apply_order(sk, order)  # raises if incompatible
    region = {r.id: 1 if order[r.id] == (0, 1) else -1 for r in sk.of_dim(2)}
    vertex = {v.id: can.strata[v.id].sign for v in sk.of_dim(0)}
    edge = {}
    for e in can.of_dim(1):
        d = 0
        for end, (v, k) in can.ends_of(e.id).items():
            incoming = can.strata[v].sign * (-1) ** k == -1
            # incoming at end 1 means running from end 0 to end 1
            d = (1 if incoming else -1) * (1 if end == 1 else -1)
            break
        edge[e.id] = d
    return OrientedSkeleton(sk, region, edge, vertex)


def recover_order(osk: OrientedSkeleton) -> LocalOrder:
    """Local order from the orientations of 2-strata alone."""
    sk = osk.base
    bits = {r: 0 if o == 1 else 1 for r, o in osk.region.items()}
    return _ranks_from_bits(sk, _comparisons(sk), bits)


# ---------------------------------------------------------------------------------
# boundary and surface skeleta


class SurfaceSkeleton:
    """Skeleton of a closed surface: 2-strata (faces), 1-strata with 2 germs,
    0-strata with 3 germs; flags are ends of 1-strata at 0-strata."""

    def __init__(self, strata: Iterable[Stratum], flags: Iterable[Flag], canonical: bool = False, name: str = ""):
        self.strata: dict[Hashable, Stratum] = {s.id: s for s in strata}
        self.flags = tuple(flags)
        self.canonical = canonical
        self.name = name

    def of_dim(self, d: int) -> list[Stratum]:
        return [s for s in self.strata.values() if s.dim == d]

    def edge_keys(self) -> list:
        return sorted((s.id for s in self.of_dim(1)), key=repr)

    def vertex_triples(self) -> list[tuple]:
        """For each 0-stratum the (e01, e12, e02) edge ids by germ pair."""
        out = []
        for v in self.of_dim(0):
            m = {}
            for f in self.flags:
                if f.lower == v.id:
                    m[tuple(f.injection)] = f.higher
            out.append((m.get((0, 1)), m.get((1, 2)), m.get((0, 2))))
        return out

    def counts(self) -> tuple[int, int, int]:
        c = [0, 0, 0]
        for s in self.strata.values():
            c[s.dim] += 1
        return tuple(c)

    def euler_characteristic(self) -> int:
        return sum((-1) ** s.dim * s.chi for s in self.strata.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SurfaceSkeleton):
            return NotImplemented
        return self.strata == other.strata and sorted(self.flags, key=repr) == sorted(other.flags, key=repr)

    def __repr__(self) -> str:
        return f"SurfaceSkeleton({self.name!r}, counts={self.counts()})"


def validate_surface(ss: SurfaceSkeleton) -> ValidationReport:
    rep = ValidationReport()
    S = ss.strata
    for s in S.values():
        if len(s.germs) != 3 - s.dim:
            rep.add(f"surface stratum {s.id}: dim {s.dim} needs {3 - s.dim} germs")
        if s.dim == 2 and s.chi != 1:
            rep.add(f"surface 2-stratum {s.id}: not a disc")
    for f in ss.flags:
        lo, hi = S.get(f.lower), S.get(f.higher)
        if lo is None or hi is None or lo.dim != 0 or hi.dim != 1:
            rep.add(f"surface flag {f}: bad incidence")
            continue
        for i, j in enumerate(f.injection):
            if hi.germs[i] != lo.germs[j]:
                rep.add(f"surface flag {f}: germ mismatch")
        if ss.canonical and list(f.injection) != sorted(f.injection):
            rep.add(f"surface flag {f}: not order preserving")
    for v in ss.of_dim(0):
        pairs = sorted(tuple(sorted(f.injection)) for f in ss.flags if f.lower == v.id)
        if pairs != [(0, 1), (0, 2), (1, 2)]:
            rep.add(f"surface 0-stratum {v.id}: ends {pairs}")
    for e in ss.of_dim(1):
        n = sum(1 for f in ss.flags if f.higher == e.id)
        if not e.circle and n != 2:
            rep.add(f"surface 1-stratum {e.id}: {n} ends")
    return rep


def boundary_skeleton(sk: Skeleton) -> tuple[SurfaceSkeleton, SurfaceSkeleton]:
    """In- and out-boundary surface skeleta induced by ``sk``.

    Surface strata are keyed by the boundary keys recorded on the 3-, 2- and
    1-strata; germ lists and orders are inherited.
    """
    result = []
    for side in ("in", "out"):
        faces: dict[int, Hashable] = {}
        strata: list[Stratum] = []
        for b in sk.of_dim(3):
            for bb in b.bnd:
                if bb[0] == side:
                    faces[b.id] = bb[1]
                    strata.append(Stratum(bb[1], 2, (bb[1],), chi=1))
        arc_of: dict[int, Hashable] = {}
        for r in sk.of_dim(2):
            for bb in r.bnd:
                if bb[0] == side:
                    arc_of[r.id] = bb[1]
                    strata.append(
                        Stratum(bb[1], 1, tuple(faces[g] for g in r.germs), chi=1, circle=r.boundary_chi == 0)
                    )
        flags = []
        for e in sk.of_dim(1):
            for bb in e.bnd:
                if bb[0] != side:
                    continue
                key = bb[1]
                strata.append(Stratum(key, 0, tuple(faces[g] for g in e.germs), chi=1))
                for f in sk.flags_by_lower.get(e.id, []):
                    flags.append(Flag(key, arc_of[f.higher], f.injection))
        result.append(SurfaceSkeleton(strata, flags, canonical=sk.canonical, name=f"{sk.name}:{side}"))
    return result[0], result[1]


# ---------------------------------------------------------------------------------
# table view for canonical skeleta (used by moves and the evaluator)


@dataclass
class Tables:
    """Mutable view of a canonical skeleton keyed by germ positions."""

    strata: dict[int, Stratum]
    ewings: dict[int, dict[tuple[int, int], int]]
    vwings: dict[int, dict[tuple[int, int], int]]
    vends: dict[int, dict[int, tuple[int, int]]]  # vertex -> omitted k -> (edge, end)
    eends: dict[int, dict[int, tuple[int, int]]]  # edge -> end -> (vertex, k)
    name: str = ""

    @classmethod
    def of(cls, sk: Skeleton) -> "Tables":
        if not sk.canonical:
            raise SkeletonError("table view needs a canonical (locally ordered) skeleton")
        ew: dict[int, dict] = {e: {} for e in sk.ids(1)}
        vw: dict[int, dict] = {v: {} for v in sk.ids(0)}
        ve: dict[int, dict] = {v: {} for v in sk.ids(0)}
        ee: dict[int, dict] = {e: {} for e in sk.ids(1)}
        for f in sk.flags:
            lo = sk.strata[f.lower]
            hi = sk.strata[f.higher]
            if hi.dim == 2 and lo.dim == 1:
                ew[lo.id][tuple(f.injection)] = hi.id
            elif hi.dim == 2 and lo.dim == 0:
                vw[lo.id][tuple(f.injection)] = hi.id
            else:
                (k,) = set(range(4)) - set(f.injection)
                ve[lo.id][k] = (hi.id, f.end)
                ee[hi.id][f.end] = (lo.id, k)
        return cls(dict(sk.strata), ew, vw, ve, ee, sk.name)

    def next_id(self) -> int:
        return max(self.strata, default=-1) + 1

    def to_skeleton(self) -> Skeleton:
        flags = []
        for e, w in self.ewings.items():
            for p, r in w.items():
                flags.append(Flag(e, r, p))
        for v, w in self.vwings.items():
            for p, r in w.items():
                flags.append(Flag(v, r, p))
        for v, ends in self.vends.items():
            for k, (e, end) in ends.items():
                flags.append(Flag(v, e, tuple(i for i in range(4) if i != k), end))
        return Skeleton(self.strata.values(), flags, canonical=True, name=self.name)


TRIPLES = {k: tuple(i for i in range(4) if i != k) for k in range(4)}


def region_sides(T: Tables, r: int) -> list[tuple[int, tuple[int, int]]]:
    return [(e, p) for e, w in T.ewings.items() for p, x in w.items() if x == r]


def region_cycles(T: Tables, r: int) -> list[list[tuple[int, tuple[int, int], int]]]:
    """Boundary cycles of 2-stratum ``r`` as lists of (edge, wing pair, exit end).

    Each side is traversed from end ``1 - exit`` to end ``exit``; circles are
    single-side cycles with exit -1.  Sides that reach the manifold boundary
    raise an error.
    """
    sides = region_sides(T, r)
    todo = set(sides)
    cycles = []
    for start in sides:
        if start not in todo:
            continue
        e0, p0 = start
        if T.strata[e0].circle:
            todo.discard(start)
            cycles.append([(e0, p0, -1)])
            continue
        cyc = []
        e, p, exit_end = e0, p0, 1
        while True:
            todo.discard((e, p))
            cyc.append((e, p, exit_end))
            if exit_end not in T.eends[e]:
                raise SkeletonError(f"2-stratum {r} reaches the boundary")
            v, k = T.eends[e][exit_end]
            tri = TRIPLES[k]
            vp = (tri[p[0]], tri[p[1]])
            (k2,) = [x for x in range(4) if x not in vp and x != k]
            e2, end2 = T.vends[v][k2]
            tri2 = TRIPLES[k2]
            p2 = (tri2.index(vp[0]), tri2.index(vp[1]))
            e, p, exit_end = e2, p2, 1 - end2
            if (e, p) == (e0, p0):
                if exit_end != 1:
                    raise SkeletonError(f"2-stratum {r}: inconsistent traversal")
                break
        cycles.append(cyc)
    return cycles


def canonical_signature(sk: Skeleton) -> tuple:
    """Weisfeiler-Lehman style refinement hash, invariant under renumbering."""
    S = sk.strata
    nbrs: dict[int, list[tuple]] = {s: [] for s in S}
    # which end of a 1-stratum is called 0 is presentation, not structure
    for f in sk.flags:
        nbrs[f.lower].append(("up", f.higher, f.injection, None))
        nbrs[f.higher].append(("down", f.lower, f.injection, None))
    for s in S.values():
        for i, g in enumerate(s.germs):
            if s.dim < 3:
                nbrs[s.id].append(("germ", g, (i,), None))
    color = {
        s.id: hash((s.dim, s.chi, s.boundary_chi, s.sign, s.circle, len(s.bnd))) for s in S.values()
    }
    for _ in range(6):
        color = {
            x: hash((color[x], tuple(sorted((k, color[y], inj, end) for k, y, inj, end in nbrs[x]))))
            for x in S
        }
    return tuple(sorted(color.values()))


def isomorphic(a: Skeleton, b: Skeleton) -> bool:
    """Heuristic isomorphism test via refinement signatures plus counts."""
    return a.counts() == b.counts() and canonical_signature(a) == canonical_signature(b)


# ---------------------------------------------------------------------------------
# library


def library(name: str) -> Skeleton:
    """Named fixture skeleta: s3_two_balls, s3_torus_halves, s3_dual, s2xs1_product,
    lens(k), t3_dual, cylinder(S2|T2, G, G')."""
    from . import library as lib

    return lib.get(name)
