"""Tensor-network evaluation of decorated skeleta.

A skeleton is foamified into a network with one label variable per 2-stratum,
one node per 1-stratum (the fusion-space indicator), one node per 0-stratum
(the a0 tensor of its sign), a weight vector per 2-stratum and a scalar per
3-stratum.  Boundary 2-strata become open legs keyed by their boundary arc.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .orbifold_datum import EDGE_PAIRS, WING_PAIRS, OrbifoldDatum
from .skeleton import (
    Skeleton,
    SurfaceSkeleton,
    Tables,
    boundary_skeleton,
    chi_sym,
    validate,
)

DEFAULT_CAP = 10**7
RANK_TOL = 1e-6


class EvaluationError(RuntimeError):
    pass


@dataclass
class Node:
    array: np.ndarray
    vars: tuple[Hashable, ...]
    label: str = ""


@dataclass
class TensorNetwork:
    nodes: list[Node] = field(default_factory=list)
    dims: dict[Hashable, int] = field(default_factory=dict)
    open_vars: list[Hashable] = field(default_factory=list)
    scalar: complex = 1.0

    def add(self, array, vars: Sequence[Hashable], label: str = "") -> None:
        array = np.asarray(array, dtype=complex)
        vars = tuple(vars)
        if array.ndim != len(vars):
            raise EvaluationError(f"node {label}: {array.ndim} axes for {len(vars)} variables")
        for v, n in zip(vars, array.shape):
            if self.dims.setdefault(v, n) != n:
                raise EvaluationError(f"variable {v!r} has inconsistent dimensions")
        self.nodes.append(Node(array, vars, label))

    @property
    def variables(self) -> list[Hashable]:
        seen = dict.fromkeys(v for n in self.nodes for v in n.vars)
        for v in self.open_vars:
            seen.setdefault(v, None)
        return list(seen)

    def labelings(self) -> int:
        return math.prod(self.dims[v] for v in self.variables)


def _diagonalize(node: Node) -> Node:
    """Collapse repeated variables of a node onto the diagonal."""
    if len(set(node.vars)) == len(node.vars):
        return node
    uniq = list(dict.fromkeys(node.vars))
    ids = {v: i for i, v in enumerate(uniq)}
    arr = np.einsum(node.array, [ids[v] for v in node.vars], list(range(len(uniq))))
    return Node(arr, tuple(uniq), node.label)


def _absorb_vectors(nodes: list[Node]) -> list[Node]:
    """Multiply one-variable nodes into another node carrying the same variable."""
    out = [n for n in nodes if len(n.vars) != 1]
    for n in nodes:
        if len(n.vars) != 1:
            continue
        (v,) = n.vars
        host = next((k for k, m in enumerate(out) if v in m.vars), None)
        if host is None:
            out.append(n)
            continue
        m = out[host]
        ax = m.vars.index(v)
        shape = [1] * m.array.ndim
        shape[ax] = -1
        out[host] = Node(m.array * n.array.reshape(shape), m.vars, m.label)
    return out


def _sum_out(n: Node, keep: set) -> Node:
    axes = tuple(k for k, v in enumerate(n.vars) if v not in keep)
    if not axes:
        return n
    return Node(n.array.sum(axis=axes), tuple(v for v in n.vars if v in keep), n.label)


def _pair(a: Node, b: Node, keep: list) -> np.ndarray:
    """Contract two nodes via a batched matrix product; result axes follow ``keep``."""
    ks = set(keep)
    a = _sum_out(a, ks | set(b.vars))
    b = _sum_out(b, ks | set(a.vars))
    shared = [v for v in a.vars if v in b.vars]
    batch = [v for v in shared if v in ks]
    summed = [v for v in shared if v not in ks]
    a_only = [v for v in a.vars if v not in b.vars]
    b_only = [v for v in b.vars if v not in a.vars]
    dim = dict(zip(a.vars, a.array.shape)) | dict(zip(b.vars, b.array.shape))
    size = lambda vs: math.prod(dim[v] for v in vs)  # noqa: E731
    A = np.transpose(a.array, [a.vars.index(v) for v in batch + a_only + summed])
    A = A.reshape(size(batch), size(a_only), size(summed))
    B = np.transpose(b.array, [b.vars.index(v) for v in batch + summed + b_only])
    B = B.reshape(size(batch), size(summed), size(b_only))
    C = np.matmul(A, B).reshape([dim[v] for v in batch + a_only + b_only])
    order = batch + a_only + b_only
    return np.transpose(C, [order.index(v) for v in keep])


@dataclass
class Plan:
    steps: list[tuple[int, int, tuple, int]]
    max_size: int
    cost: int
    strategy: str = ""


def _greedy_plan(var_lists, dims, open_set, score: str) -> Plan:
    live = {k: tuple(v) for k, v in enumerate(var_lists)}
    size_of = lambda vs: math.prod(dims[v] for v in vs)  # noqa: E731
    where: dict[Hashable, set[int]] = {}
    for k, vs in live.items():
        for v in vs:
            where.setdefault(v, set()).add(k)
    next_id = len(live)
    steps = []
    max_size = max((size_of(vs) for vs in live.values()), default=1)
    cost = 0
    cache: dict[tuple[int, int], tuple] = {}

    def candidate(i, j):
        a, b = live[i], live[j]
        keep = tuple(v for v in dict.fromkeys(a + b) if v in open_set or len(where[v] - {i, j}) > 0)
        size = size_of(keep)
        flops = size_of(dict.fromkeys(a + b))
        if score == "growth":
            key = (size - size_of(a) - size_of(b), size, i, j)
        elif score == "flops":
            key = (flops, size, i, j)
        else:
            key = (size, flops, i, j)
        return key, keep, size, flops

    while len(live) > 1:
        pairs = {(i, j) for ks in where.values() for i in ks for j in ks if i < j}
        if not pairs:
            k = sorted(live)
            pairs = {(k[0], k[1])}
        for p in pairs:
            if p not in cache:
                cache[p] = candidate(*p)
        p = min(pairs, key=lambda q: cache[q][0])
        _, keep, size, flops = cache[p]
        i, j = p
        allv = set(live[i]) | set(live[j])
        stale = set().union(*(where[v] for v in allv)) if allv else {i, j}
        cache = {q: c for q, c in cache.items() if q[0] not in stale and q[1] not in stale}
        del live[i], live[j]
        for v in allv:
            where[v] -= {i, j}
            if not where[v]:
                del where[v]
        live[next_id] = keep
        for v in keep:
            where.setdefault(v, set()).add(next_id)
        steps.append((i, j, keep, next_id))
        next_id += 1
        max_size = max(max_size, size)
        cost += flops
    return Plan(steps, max_size, cost, score)


def _elimination_plan(var_lists, dims, open_set, rule: str) -> Plan:
    """Bucket elimination: sum out summed variables one at a time, chosen by a
    min-fill or min-size rule on the interaction graph."""
    live = {k: tuple(v) for k, v in enumerate(var_lists)}
    size_of = lambda vs: math.prod(dims[v] for v in vs)  # noqa: E731
    next_id = len(live)
    steps = []
    max_size = max((size_of(vs) for vs in live.values()), default=1)
    cost = 0
    nbr: dict[Hashable, set] = {}
    for vs in live.values():
        for v in vs:
            nbr.setdefault(v, set()).update(vs)
    for v in nbr:
        nbr[v].discard(v)
    todo = sorted((v for v in nbr if v not in open_set), key=repr)
    pos = {v: k for k, v in enumerate(todo)}
    while todo:
        def key(v):
            ns = nbr[v]
            if rule == "fill":
                fill = sum(1 for a in ns for b in ns if repr(a) < repr(b) and b not in nbr[a])
                return (fill, size_of(ns), pos[v])
            return (size_of(ns), pos[v])

        v = min(todo, key=key)
        todo.remove(v)
        ns = nbr.pop(v)
        for a in ns:
            nbr[a] |= ns - {a}
            nbr[a].discard(v)
        bucket = sorted((k for k, vs in live.items() if v in vs), key=lambda k: (size_of(live[k]), k))
        while len(bucket) > 1:
            i, j = bucket[0], bucket[1]
            a, b = live.pop(i), live.pop(j)
            others = {x for k, vs in live.items() for x in vs}
            keep = tuple(x for x in dict.fromkeys(a + b) if x in open_set or x in others or (x == v and len(bucket) > 2))
            steps.append((min(i, j), max(i, j), keep, next_id))
            size = size_of(keep)
            max_size = max(max_size, size)
            cost += size_of(dict.fromkeys(a + b))
            live[next_id] = keep
            bucket = sorted([next_id] + bucket[2:], key=lambda k: (size_of(live[k]), k))
            next_id += 1
    # join whatever remains (disconnected parts, open legs)
    while len(live) > 1:
        i, j = sorted(live)[:2]
        a, b = live.pop(i), live.pop(j)
        others = {x for vs in live.values() for x in vs}
        keep = tuple(x for x in dict.fromkeys(a + b) if x in open_set or x in others)
        steps.append((i, j, keep, next_id))
        size = size_of(keep)
        max_size = max(max_size, size)
        cost += size_of(dict.fromkeys(a + b))
        live[next_id] = keep
        next_id += 1
    return Plan(steps, max_size, cost, f"elim-{rule}")


_PLAN_CACHE: dict = {}


def best_plan(var_lists, dims, open_set) -> Plan:
    """Best of a few deterministic greedy plans (smallest peak, then cost)."""
    key = (tuple(tuple(v) for v in var_lists), tuple((v, dims[v]) for vs in var_lists for v in vs),
           tuple(sorted(open_set, key=repr)))
    hit = _PLAN_CACHE.get(key)
    if hit is not None:
        return hit
    if len(_PLAN_CACHE) > 4096:
        _PLAN_CACHE.clear()
    _PLAN_CACHE[key] = plan = _best_plan(var_lists, dims, open_set)
    return plan


def _best_plan(var_lists, dims, open_set) -> Plan:
    plans = [_greedy_plan(var_lists, dims, open_set, s) for s in ("size", "growth")]
    plans += [_elimination_plan(var_lists, dims, open_set, r) for r in ("fill", "size")]
    return min(plans, key=lambda p: (p.max_size, p.cost))


def contract(tn: TensorNetwork, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Contract ``tn`` greedily; the result is indexed by ``tn.open_vars``."""
    nodes = [_diagonalize(n) for n in tn.nodes]
    open_set = set(tn.open_vars)
    for v in tn.open_vars:
        if v not in tn.dims:
            raise EvaluationError(f"open variable {v!r} has no dimension")
    # open variables touched by no node carry an all-ones leg
    touched = {v for n in nodes for v in n.vars}
    for v in tn.open_vars:
        if v not in touched:
            nodes.append(Node(np.ones(tn.dims[v], dtype=complex), (v,), "free"))
    nodes = _absorb_vectors(nodes)
    plan = best_plan([n.vars for n in nodes], tn.dims, open_set)
    if plan.max_size > cap:
        raise EvaluationError(f"intermediate of {plan.max_size} entries exceeds cap {cap}")
    live = dict(enumerate(nodes))
    for i, j, keep, new in plan.steps:
        a, b = live.pop(i), live.pop(j)
        live[new] = Node(_pair(a, b, list(keep)), tuple(keep), "c")
    if live:
        (last,) = live.values()
        sum_out = [v for v in last.vars if v not in open_set]
        if sum_out:
            num = {v: k for k, v in enumerate(last.vars)}
            arr = np.einsum(last.array, [num[v] for v in last.vars], [num[v] for v in last.vars if v in open_set])
            last = Node(arr, tuple(v for v in last.vars if v in open_set))
        num = {v: k for k, v in enumerate(last.vars)}
        out = np.einsum(last.array, [num[v] for v in last.vars], [num[v] for v in tn.open_vars])
    else:
        out = np.ones(tuple(tn.dims[v] for v in tn.open_vars), dtype=complex)
    return tn.scalar * out


def brute_force(tn: TensorNetwork, limit: int = 10**6) -> np.ndarray:
    """Single-loop summation over all labelings (oracle for :func:`contract`)."""
    vars_ = tn.variables
    if tn.labelings() > limit:
        raise EvaluationError(f"{tn.labelings()} labelings exceed the brute-force limit {limit}")
    pos = {v: k for k, v in enumerate(vars_)}
    out = np.zeros(tuple(tn.dims[v] for v in tn.open_vars), dtype=complex)
    for lab in itertools.product(*(range(tn.dims[v]) for v in vars_)):
        val = tn.scalar
        for n in tn.nodes:
            val *= n.array[tuple(lab[pos[v]] for v in n.vars)]
            if val == 0:
                break
        if val != 0:
            out[tuple(lab[pos[v]] for v in tn.open_vars)] += val
    return out


# ---------------------------------------------------------------------------------
# foamification


@dataclass
class DecoratedSkeleton:
    skeleton: Skeleton
    datum: OrbifoldDatum
    psi_exponents: dict[int, int]
    phi_exponents: dict[int, int]

    def check(self) -> None:
        for r in self.skeleton.of_dim(2):
            if self.psi_exponents[r.id] != chi_sym(r):
                raise EvaluationError(f"2-stratum {r.id}: stored psi exponent is stale")
        for b in self.skeleton.of_dim(3):
            if self.phi_exponents[b.id] != chi_sym(b):
                raise EvaluationError(f"3-stratum {b.id}: stored phi exponent is stale")


def decorate(sk: Skeleton, datum: OrbifoldDatum, check: bool = True) -> DecoratedSkeleton:
    if check:
        rep = validate(sk)
        if not rep.ok:
            raise EvaluationError(f"skeleton is invalid: {rep.violations[0]}")
    if not sk.canonical:
        raise EvaluationError("skeleton carries no local order (apply one first)")
    return DecoratedSkeleton(
        sk, datum,
        {r.id: chi_sym(r) for r in sk.of_dim(2)},
        {b.id: chi_sym(b) for b in sk.of_dim(3)},
    )


def foamify(dsk: DecoratedSkeleton | Skeleton, datum: OrbifoldDatum | None = None) -> TensorNetwork:
    if isinstance(dsk, Skeleton):
        dsk = decorate(dsk, datum)
    dsk.check()
    sk, datum = dsk.skeleton, dsk.datum
    T = Tables.of(sk)
    n = datum.rank
    tn = TensorNetwork()
    for b in sorted(sk.of_dim(3), key=lambda s: s.id):
        tn.scalar *= datum.ball_weight(dsk.phi_exponents[b.id])
    for r in sorted(sk.of_dim(2), key=lambda s: s.id):
        tn.add(datum.region_weight(dsk.psi_exponents[r.id]), (r.id,), f"region {r.id}")
    for e in sorted(sk.of_dim(1), key=lambda s: s.id):
        w = T.ewings[e.id]
        tn.add(datum.a1, tuple(w[p] for p in EDGE_PAIRS), f"edge {e.id}")
    for v in sorted(sk.of_dim(0), key=lambda s: s.id):
        w = T.vwings[v.id]
        tn.add(datum.vertex_tensor(v.sign), tuple(w[p] for p in WING_PAIRS), f"vertex {v.id}")
    opens = []
    for r in sorted(sk.of_dim(2), key=lambda s: s.id):
        for bb in r.bnd:
            opens.append(((bb[0], bb[1]), r.id))
    opens.sort(key=lambda x: repr(x[0]))
    tn.open_vars = [rid for _, rid in opens]
    for rid in tn.open_vars:
        tn.dims.setdefault(rid, n)
    return tn


def evaluate_closed(sk: Skeleton, datum: OrbifoldDatum, cap: int = DEFAULT_CAP) -> complex:
    if not sk.is_closed:
        raise EvaluationError("evaluate_closed needs a closed skeleton")
    return complex(contract(foamify(decorate(sk, datum)), cap))


# ---------------------------------------------------------------------------------
# boundaries, cylinders, state spaces


def surface_basis(ss: SurfaceSkeleton, datum: OrbifoldDatum) -> tuple[list, list[tuple[int, ...]]]:
    """Admissible labelings of the surface 1-strata, keys sorted."""
    keys = sorted((e.id for e in ss.of_dim(1)), key=repr)
    idx = {k: i for i, k in enumerate(keys)}
    ends = {}
    for f in ss.flags:
        ends.setdefault(f.lower, {})[tuple(f.injection)] = f.higher
    N = datum.category.N
    out = []
    for lab in itertools.product(range(datum.rank), repeat=len(keys)):
        ok = True
        for v, w in ends.items():
            x01, x02, x12 = (lab[idx[w[p]]] for p in ((0, 1), (0, 2), (1, 2)))
            if not N[x01, x12, x02]:
                ok = False
                break
        if ok:
            out.append(lab)
    return keys, out


@dataclass
class CylinderIdempotent:
    source: SurfaceSkeleton
    target: SurfaceSkeleton
    matrix: np.ndarray
    source_basis: list
    target_basis: list


def bordism_tensor(sk: Skeleton, datum: OrbifoldDatum, cap: int = DEFAULT_CAP):
    """Matrix of ``sk`` from in- to out-boundary labelings (unprojected)."""
    g_in, g_out = boundary_skeleton(sk)
    tn = foamify(decorate(sk, datum))
    arr = contract(tn, cap)
    key_of = {}
    for r in sk.of_dim(2):
        for bb in r.bnd:
            key_of[r.id] = (bb[0], bb[1])
    pos = {key_of[r]: i for i, r in enumerate(tn.open_vars)}
    kin, bin_ = surface_basis(g_in, datum)
    kout, bout = surface_basis(g_out, datum)
    mat = np.zeros((len(bout), len(bin_)), dtype=complex)
    for i, lo in enumerate(bout):
        for j, li in enumerate(bin_):
            idx = [0] * len(pos)
            for k, x in zip(kout, lo):
                idx[pos[("out", k)]] = x
            for k, x in zip(kin, li):
                idx[pos[("in", k)]] = x
            mat[i, j] = arr[tuple(idx)]
    return g_in, g_out, bin_, bout, mat


def cylinder_map(G, G2=None, datum: OrbifoldDatum | None = None, cap: int = DEFAULT_CAP, steps=None) -> CylinderIdempotent:
    """Cylinder map between surface skeleta.

    ``G`` may be a cylinder skeleton (its boundaries give the source and target)
    or a surface name understood by :func:`orbtqft.library.cylinder_between`.
    """
    if isinstance(G, Skeleton):
        sk = G
    else:
        from .library import cylinder_between

        sk = cylinder_between(G, G2, steps)
    g_in, g_out, bin_, bout, mat = bordism_tensor(sk, datum, cap)
    return CylinderIdempotent(g_in, g_out, mat, bin_, bout)


def snap_rank(P: np.ndarray, tol: float = RANK_TOL) -> tuple[int, np.ndarray]:
    """Rank of an idempotent via its spectrum snapped to {0, 1}."""
    if P.size == 0:
        return 0, P
    ev = np.linalg.eigvals(P)
    far = [x for x in ev if min(abs(x), abs(x - 1)) > tol]
    if far:
        raise EvaluationError(f"eigenvalue {far[0]:.6g} is not within {tol} of 0 or 1")
    return int(sum(1 for x in ev if abs(x - 1) <= tol)), P


def state_space(G, datum: OrbifoldDatum, cap: int = DEFAULT_CAP, tol: float = RANK_TOL) -> tuple[int, np.ndarray]:
    cyl = cylinder_map(G, G, datum, cap) if not isinstance(G, Skeleton) else cylinder_map(G, datum=datum, cap=cap)
    return snap_rank(cyl.matrix, tol)


def bordism_map(sk: Skeleton, datum: OrbifoldDatum, cap: int = DEFAULT_CAP, projectors=None) -> np.ndarray:
    """Projector-compressed matrix ``Phi_out . M . Phi_in`` of a bordism skeleton."""
    g_in, g_out, bin_, bout, mat = bordism_tensor(sk, datum, cap)
    if projectors is not None:
        p_in, p_out = projectors
        mat = p_out @ mat @ p_in
    return mat
