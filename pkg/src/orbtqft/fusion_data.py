"""Spherical fusion category data: fusion rules, quantum dimensions, F-symbols.

F-symbol convention: ``F[a, b, c, d][e, f]`` is the matrix entry of the basis
change from ``((a b)_e c)_d`` to ``(a (b c)_f)_d``.  The pentagon identity reads

    F^{fcd}_e[g, l] F^{abl}_e[f, k] = sum_h F^{abc}_g[f, h] F^{ahd}_e[g, k] F^{bcd}_k[h, l]

All built-in categories are multiplicity free, so multiplicity indices are
carried in the data model but always zero.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable, Mapping

import numpy as np

DEFAULT_TOL = 1e-9

FKey = tuple[int, int, int, int, int, int]


class CategoryError(ValueError):
    """Raised when category data fails validation."""


@dataclass
class ValidationReport:
    ok: bool
    max_residual: float = 0.0
    worst: tuple | None = None
    messages: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "max_residual": self.max_residual,
            "worst": list(self.worst) if self.worst is not None else None,
            "messages": list(self.messages),
        }


@dataclass(frozen=True)
class FusionCategory:
    """Immutable multiplicity-free spherical fusion category."""

    names: tuple[str, ...]
    dual: tuple[int, ...]
    N: np.ndarray
    qdim: tuple[float, ...]
    F: Mapping[FKey, complex]
    name: str = "custom"
    F_inv: Mapping[FKey, complex] = field(default_factory=dict)

    @property
    def simples(self) -> tuple[int, ...]:
        return tuple(range(len(self.names)))

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def global_dim_sq(self) -> float:
        return float(sum(d * d for d in self.qdim))

    @property
    def multiplicity_free(self) -> bool:
        return bool(np.all(self.N <= 1))

    def fuse(self, a: int, b: int) -> list[int]:
        return [c for c in self.simples if self.N[a, b, c]]

    def admissible(self, a: int, b: int, c: int) -> bool:
        return bool(self.N[a, b, c])

    def f(self, a: int, b: int, c: int, d: int, e: int, g: int) -> complex:
        return self.F.get((a, b, c, d, e, g), 0j)

    def f_inv(self, a: int, b: int, c: int, d: int, g: int, e: int) -> complex:
        """Entry of the inverse block, mapping ``(a (b c)_g)_d`` back to ``((a b)_e c)_d``."""
        return self.F_inv.get((a, b, c, d, g, e), 0j)

    def block(self, a: int, b: int, c: int, d: int) -> tuple[list[int], list[int], np.ndarray]:
        es = [e for e in self.simples if self.N[a, b, e] and self.N[e, c, d]]
        fs = [f for f in self.simples if self.N[b, c, f] and self.N[a, f, d]]
        mat = np.array([[self.f(a, b, c, d, e, f) for f in fs] for e in es], dtype=complex)
        return es, fs, mat.reshape(len(es), len(fs))

    def blocks(self) -> Iterable[tuple[int, int, int, int]]:
        return itertools.product(self.simples, repeat=4)

    def tensor(self) -> np.ndarray:
        """Dense F array indexed ``[a, b, c, d, e, f]``."""
        n = self.rank
        out = np.zeros((n,) * 6, dtype=complex)
        for k, v in self.F.items():
            out[k] = v
        return out

    def tensor_inv(self) -> np.ndarray:
        """Dense inverse array indexed ``[a, b, c, d, f, e]``."""
        n = self.rank
        out = np.zeros((n,) * 6, dtype=complex)
        for k, v in self.F_inv.items():
            out[k] = v
        return out

    def to_doc(self) -> dict:
        entries = []
        for (a, b, c, d, e, f), v in sorted(self.F.items()):
            entries.append(
                {"a": a, "b": b, "c": c, "d": d, "e": e, "f": f,
                 "mu": 0, "nu": 0, "rho": 0, "sig": 0,
                 "re": float(v.real), "im": float(v.imag)}
            )
        return {
            "name": self.name,
            "simples": list(self.names),
            "dual": list(self.dual),
            "N": self.N.astype(int).tolist(),
            "qdim": [float(x) for x in self.qdim],
            "F": entries,
        }


def _invert_blocks(names, N, F) -> dict:
    n = len(names)
    inv: dict[FKey, complex] = {}
    for a, b, c, d in itertools.product(range(n), repeat=4):
        es = [e for e in range(n) if N[a, b, e] and N[e, c, d]]
        fs = [f for f in range(n) if N[b, c, f] and N[a, f, d]]
        if not es and not fs:
            continue
        if len(es) != len(fs):
            raise CategoryError(f"non-square F block at {(a, b, c, d)}")
        mat = np.array([[F.get((a, b, c, d, e, f), 0j) for f in fs] for e in es], dtype=complex)
        if abs(np.linalg.det(mat)) < 1e-12:
            raise CategoryError(f"singular F block at {(a, b, c, d)}")
        m_inv = np.linalg.inv(mat)
        for i, f in enumerate(fs):
            for j, e in enumerate(es):
                inv[(a, b, c, d, f, e)] = complex(m_inv[i, j])
    return inv


def build_category(
    names: Iterable[str],
    dual: Iterable[int],
    N,
    qdim: Iterable[float],
    F: Mapping[FKey, complex],
    name: str = "custom",
    fill_units: bool = True,
) -> FusionCategory:
    names = tuple(names)
    n = len(names)
    N = np.asarray(N, dtype=int).reshape(n, n, n)
    F = {tuple(int(x) for x in k): complex(v) for k, v in F.items()}
    if fill_units:
        for a, b, c, d in itertools.product(range(n), repeat=4):
            if 0 not in (a, b, c):
                continue
            for e in range(n):
                if not (N[a, b, e] and N[e, c, d]):
                    continue
                for f in range(n):
                    if N[b, c, f] and N[a, f, d]:
                        F.setdefault((a, b, c, d, e, f), 1.0 + 0j)
    F = {k: v for k, v in F.items() if v != 0}
    inv = _invert_blocks(names, N, F)
    return FusionCategory(names, tuple(int(x) for x in dual), N, tuple(float(x) for x in qdim), F, name, inv)


def check_pentagon(cat: FusionCategory) -> ValidationReport:
    """Enumerate every pentagon instance and report the worst residual."""
    n = cat.rank
    Ft = cat.tensor()
    N = cat.N
    worst = 0.0
    worst_key = None
    for a, b, c, d in itertools.product(range(n), repeat=4):
        for e in range(n):
            for f in range(n):
                if not N[a, b, f]:
                    continue
                for g in range(n):
                    if not (N[f, c, g] and N[g, d, e]):
                        continue
                    for k in range(n):
                        if not (N[a, k, e]):
                            continue
                        for l in range(n):
                            if not (N[c, d, l] and N[b, l, k]):
                                continue
                            lhs = Ft[f, c, d, e, g, l] * Ft[a, b, l, e, f, k]
                            rhs = 0j
                            for h in range(n):
                                rhs += Ft[a, b, c, g, f, h] * Ft[a, h, d, e, g, k] * Ft[b, c, d, k, h, l]
                            r = abs(lhs - rhs)
                            if r > worst:
                                worst, worst_key = r, (a, b, c, d, e, f, g, k, l)
    return ValidationReport(True, worst, worst_key)


def check_invariants(cat: FusionCategory, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Unit, duality, dimension, invertibility and pentagon checks."""
    msgs: list[str] = []
    n = cat.rank
    N = cat.N
    worst = 0.0
    worst_key = None
    if n == 0:
        msgs.append("no simple objects")
        return ValidationReport(False, 0.0, None, msgs)
    for a in range(n):
        for c in range(n):
            if N[a, 0, c] != (a == c) or N[0, a, c] != (a == c):
                msgs.append(f"unit constraint fails at ({a}, {c})")
    for a in range(n):
        da = cat.dual[a]
        if not 0 <= da < n or cat.dual[da] != a:
            msgs.append(f"dual is not an involution at {a}")
            continue
        if abs(cat.qdim[a] - cat.qdim[da]) > tol:
            msgs.append(f"qdim differs from dual at {a}")
        if N[a, da, 0] != 1:
            msgs.append(f"{a} (x) dual({a}) does not contain the unit once")
        if cat.qdim[a] == 0:
            msgs.append(f"zero quantum dimension at {a}")
    for a, b in itertools.product(range(n), repeat=2):
        r = abs(cat.qdim[a] * cat.qdim[b] - sum(N[a, b, c] * cat.qdim[c] for c in range(n)))
        if r > tol:
            msgs.append(f"dimension equation fails at ({a}, {b}): residual {r:.3g}")
        if r > worst:
            worst, worst_key = r, (a, b)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        es, fs, mat = cat.block(a, b, c, d)
        if not es:
            continue
        inv = np.array([[cat.f_inv(a, b, c, d, f, e) for e in es] for f in fs], dtype=complex)
        r = float(np.max(np.abs(mat @ inv - np.eye(len(es)))))
        if r > tol:
            msgs.append(f"F F^-1 != 1 at {(a, b, c, d)}")
    pent = check_pentagon(cat)
    if pent.max_residual > tol:
        msgs.append(f"pentagon residual {pent.max_residual:.3g} at {pent.worst}")
    if pent.max_residual > worst:
        worst, worst_key = pent.max_residual, pent.worst
    return ValidationReport(not msgs, worst, worst_key, msgs)


def validate_category(cat: FusionCategory, tol: float = DEFAULT_TOL) -> FusionCategory:
    rep = check_invariants(cat, tol)
    if not rep.ok:
        raise CategoryError("; ".join(rep.messages))
    return cat


def load_category(doc: dict | str, tol: float = DEFAULT_TOL) -> FusionCategory:
    """Build and validate a category from its JSON document (dict or JSON text)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    for key in ("simples", "dual", "N", "qdim"):
        if key not in doc:
            raise CategoryError(f"missing field {key!r}")
    names = [str(s) for s in doc["simples"]]
    n = len(names)
    try:
        N = np.asarray(doc["N"], dtype=int)
    except (TypeError, ValueError) as exc:
        raise CategoryError(f"malformed N: {exc}") from None
    if N.shape != (n, n, n):
        raise CategoryError(f"N must have shape {(n, n, n)}, got {N.shape}")
    if np.any(N < 0):
        raise CategoryError("negative fusion multiplicity")
    if len(doc["dual"]) != n or len(doc["qdim"]) != n:
        raise CategoryError("dual and qdim must list one entry per simple")
    F: dict[FKey, complex] = {}
    for ent in doc.get("F", []):
        try:
            key = tuple(int(ent[k]) for k in ("a", "b", "c", "d", "e", "f"))
        except KeyError as exc:
            raise CategoryError(f"F entry missing index {exc}") from None
        if any(ent.get(m, 0) for m in ("mu", "nu", "rho", "sig")):
            raise CategoryError("multiplicity indices are not supported by this build")
        if not all(0 <= x < n for x in key):
            raise CategoryError(f"F entry index out of range: {key}")
        F[key] = complex(float(ent.get("re", 0.0)), float(ent.get("im", 0.0)))
    if np.any(N > 1):
        raise CategoryError("fusion multiplicities above 1 are not supported by this build")
    cat = build_category(names, doc["dual"], N, doc["qdim"], F, name=doc.get("name", "custom"))
    return validate_category(cat, tol)


def dump_category(cat: FusionCategory) -> str:
    return json.dumps(cat.to_doc(), sort_keys=True)


def pointed_category(
    n: int,
    cocycle: Callable[[int, int, int], complex] | None = None,
    tol: float = DEFAULT_TOL,
    name: str | None = None,
) -> FusionCategory:
    """Vec of the cyclic group of order n, twisted by an optional 3-cocycle."""
    if n < 1:
        raise CategoryError("n must be positive")
    N = np.zeros((n, n, n), dtype=int)
    for a, b in itertools.product(range(n), repeat=2):
        N[a, b, (a + b) % n] = 1
    F: dict[FKey, complex] = {}
    for a, b, c in itertools.product(range(n), repeat=3):
        w = 1.0 + 0j if cocycle is None else complex(cocycle(a, b, c))
        F[(a, b, c, (a + b + c) % n, (a + b) % n, (b + c) % n)] = w
    if cocycle is not None:
        worst = 0.0
        for a, b, c, d in itertools.product(range(n), repeat=4):
            lhs = cocycle((a + b) % n, c, d) * cocycle(a, b, (c + d) % n)
            rhs = cocycle(a, b, c) * cocycle(a, (b + c) % n, d) * cocycle(b, c, d)
            worst = max(worst, abs(lhs - rhs))
        if worst > tol:
            raise CategoryError(f"3-cocycle condition violated (residual {worst:.3g})")
    names = [str(i) for i in range(n)]
    dual = [(-a) % n for a in range(n)]
    label = name or (f"vec_z{n}" if cocycle is None else f"vec_z{n}_twisted")
    return validate_category(build_category(names, dual, N, [1.0] * n, F, name=label, fill_units=False), tol)


def cyclic_cocycle(n: int, p: int) -> Callable[[int, int, int], complex]:
    """Standard representative of the class p in H^3(Z/n, U(1))."""

    def omega(a: int, b: int, c: int) -> complex:
        carry = b + c - (b + c) % n
        return cmath.exp(2j * math.pi * p * a * carry / (n * n))

    return omega


def fibonacci() -> FusionCategory:
    phi = (1 + math.sqrt(5)) / 2
    N = np.zeros((2, 2, 2), dtype=int)
    N[0, 0, 0] = N[0, 1, 1] = N[1, 0, 1] = N[1, 1, 0] = N[1, 1, 1] = 1
    F = {
        (1, 1, 1, 1, 0, 0): 1 / phi,
        (1, 1, 1, 1, 0, 1): phi ** -0.5,
        (1, 1, 1, 1, 1, 0): phi ** -0.5,
        (1, 1, 1, 1, 1, 1): -1 / phi,
    }
    for key in [(1, 1, 1, 0, 1, 1)]:
        F[key] = 1.0
    return validate_category(build_category(["1", "tau"], [0, 1], N, [1.0, phi], F, name="fibonacci"))


def ising() -> FusionCategory:
    # labels: 0 = 1, 1 = sigma, 2 = psi
    N = np.zeros((3, 3, 3), dtype=int)
    for a in range(3):
        N[0, a, a] = N[a, 0, a] = 1
    N[1, 1, 0] = N[1, 1, 2] = 1
    N[1, 2, 1] = N[2, 1, 1] = 1
    N[2, 2, 0] = 1
    s = 1 / math.sqrt(2)
    F = {
        (1, 1, 1, 1, 0, 0): s, (1, 1, 1, 1, 0, 2): s,
        (1, 1, 1, 1, 2, 0): s, (1, 1, 1, 1, 2, 2): -s,
        (1, 2, 1, 2, 1, 1): -1.0,
        (2, 1, 2, 1, 1, 1): -1.0,
    }
    # remaining admissible blocks are 1x1 with entry 1
    for a, b, c, d in itertools.product(range(1, 3), range(1, 3), range(1, 3), range(3)):
        for e in range(3):
            for f in range(3):
                if N[a, b, e] and N[e, c, d] and N[b, c, f] and N[a, f, d]:
                    F.setdefault((a, b, c, d, e, f), 1.0)
    return validate_category(build_category(["1", "sigma", "psi"], [0, 1, 2], N, [1.0, math.sqrt(2), 1.0], F, name="ising"))


def _fixture_doc(name: str) -> dict | None:
    try:
        path = resources.files("orbtqft").joinpath("fixtures", "categories", f"{name}.json")
        if path.is_file():
            return json.loads(path.read_text())
    except (FileNotFoundError, ModuleNotFoundError):
        return None
    return None


BUILTIN_NAMES = (
    "trivial", "vec_z2", "vec_z3", "vec_z4", "vec_z5",
    "vec_z2_omega", "vec_z3_omega", "fibonacci", "ising",
)


def builtin(name: str) -> FusionCategory:
    """Built-in categories, loaded from the shipped fixtures when present."""
    name = name.lower()
    doc = _fixture_doc(name)
    if doc is not None:
        return load_category(doc)
    return _construct(name)


def _construct(name: str) -> FusionCategory:
    if name == "trivial":
        return pointed_category(1, name="trivial")
    if name.startswith("vec_z") and name[5:].isdigit():
        return pointed_category(int(name[5:]))
    if name == "vec_z2_omega":
        return pointed_category(2, lambda a, b, c: -1.0 if (a, b, c) == (1, 1, 1) else 1.0, name=name)
    if name == "vec_z3_omega":
        return pointed_category(3, cyclic_cocycle(3, 1), name=name)
    if name == "fibonacci":
        return fibonacci()
    if name == "ising":
        return ising()
    raise KeyError(f"unknown category {name!r}")
