"""Special orbifold data built from a spherical fusion category.

Conventions.  A 2-stratum label is a simple object.  At a 1-stratum with germs
``0 < 1 < 2`` the three wings carry ``x01, x02, x12`` and the fusion space is
``Hom(x01 x12, x02)``.  At a 0-stratum with germs ``0 < 1 < 2 < 3`` the six wings
are listed in the order ``01, 02, 03, 12, 13, 23``; the positive vertex carries

    a0+ = F[x01, x12, x23; x03](x02 -> x13) / sqrt(d02 d13)

and the negative vertex the matching entry of the inverse block.  Regions carry
``psi_x ** chi_sym`` with ``psi_x = d_x ** 1/2`` and 3-strata ``phi ** chi_sym``
with ``phi = D ** -1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .fusion_data import DEFAULT_TOL, FusionCategory

WING_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_PAIRS = ((0, 1), (0, 2), (1, 2))


class DatumError(ValueError):
    pass


@dataclass(frozen=True)
class OrbifoldDatum:
    category: FusionCategory
    a1: np.ndarray  # [x01, x02, x12] -> dim Hom(x01 x12, x02)
    a0_plus: np.ndarray  # [x01, x02, x03, x12, x13, x23]
    a0_minus: np.ndarray
    psi: np.ndarray  # per simple label
    phi: complex
    meta: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.category.rank

    def region_weight(self, chi_sym: int) -> np.ndarray:
        return self.psi.astype(complex) ** chi_sym

    def ball_weight(self, chi_sym: int) -> complex:
        return complex(self.phi) ** chi_sym

    def vertex_tensor(self, sign: int) -> np.ndarray:
        return self.a0_plus if sign > 0 else self.a0_minus

    def with_psi(self, psi) -> "OrbifoldDatum":
        return replace(self, psi=np.asarray(psi, dtype=complex))

    def with_phi(self, phi: complex) -> "OrbifoldDatum":
        return replace(self, phi=phi)

    def to_doc(self) -> dict:
        def flat(a):
            a = np.asarray(a, dtype=complex)
            return {"shape": list(a.shape), "re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist()}

        return {
            "category": self.category.name,
            "index_order": {
                "a1": ["x01", "x02", "x12"],
                "a0": ["x01", "x02", "x03", "x12", "x13", "x23"],
            },
            "a1": flat(self.a1),
            "a0_plus": flat(self.a0_plus),
            "a0_minus": flat(self.a0_minus),
            "psi": flat(self.psi),
            "phi": {"re": complex(self.phi).real, "im": complex(self.phi).imag},
        }


def datum_from_spherical(
    cat: FusionCategory,
    psi_exponent: float = 0.5,
    phi_exponent: float = -1.0,
    check: bool = False,
    tol: float = DEFAULT_TOL,
) -> OrbifoldDatum:
    """Orbifold datum of ``cat`` with ``psi_i = d_i ** psi_exponent`` and ``phi = D ** phi_exponent``."""
    n = cat.rank
    d = np.asarray(cat.qdim, dtype=complex)
    a1 = np.transpose(cat.N, (0, 2, 1)).astype(complex)  # N[a, b, c] -> [a, c, b]
    F = cat.tensor()  # [a, b, c, d, e, f]
    Fi = cat.tensor_inv()  # [a, b, c, d, f, e]
    sq = np.sqrt(d)
    norm = np.einsum("e,f->ef", 1 / sq, 1 / sq)
    # a0+[x01, x02, x03, x12, x13, x23] = F[x01, x12, x23, x03, x02, x13] / sqrt(d02 d13)
    ap = np.einsum("abcdef,ef->aedbfc", F, norm)
    am = np.einsum("abcdfe,ef->aedbfc", Fi, norm)
    psi = d ** psi_exponent
    phi = complex(cat.global_dim_sq) ** (phi_exponent / 2)
    datum = OrbifoldDatum(cat, a1, ap, am, psi, phi, {"psi_exponent": psi_exponent, "phi_exponent": phi_exponent})
    if check:
        rep = check_O_axioms(datum, tol=tol)
        if not rep.ok:
            raise DatumError(f"axiom check failed: worst {rep.worst} residual {rep.max_residual:.3e}")
    assert ap.shape == (n,) * 6
    return datum


def datum_to_json(datum: OrbifoldDatum) -> str:
    return json.dumps(datum.to_doc())


# ---------------------------------------------------------------------------------
# axioms

AXIOMS = tuple(f"Opsi{i}" for i in range(1, 9))


def axiom_family(kind: str, orbit: int) -> str:
    """Triangle variants test (Opsi1), the six lune orbits (Opsi2)-(Opsi7), bubbles (Opsi8)."""
    if kind == "T":
        return "Opsi1"
    if kind == "L":
        return f"Opsi{2 + orbit}"
    return "Opsi8"


@dataclass
class AxiomReport:
    residuals: dict[str, float]
    variants: list[dict]
    insertions: dict[str, dict[str, tuple[int, int]]]
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
        return {
            "ok": self.ok,
            "tol": self.tol,
            "residuals": dict(self.residuals),
            "worst": self.worst,
            "insertions": {k: {s: list(v) for s, v in d.items()} for k, d in self.insertions.items()},
            "variants": list(self.variants),
        }


def insertion_counts(sk, interface: dict | None = None) -> tuple[int, int]:
    """Total psi and phi exponents carried by a pattern side."""
    from .skeleton import chi_sym

    return (sum(chi_sym(r) for r in sk.of_dim(2)), sum(chi_sym(b) for b in sk.of_dim(3)))


def pattern_value(sk, interface: dict, datum: OrbifoldDatum, cap: int | None = None) -> np.ndarray:
    """Evaluate a pattern side with open legs on its interface 2-strata (sorted by key)."""
    from .evaluator import DEFAULT_CAP, TensorNetwork, contract, decorate, foamify

    tn = foamify(decorate(sk, datum, check=False))
    ren = {rid: ("leg", key) for rid, key in interface.items()}
    out = TensorNetwork(scalar=tn.scalar)
    for node in tn.nodes:
        out.add(node.array, tuple(ren.get(v, v) for v in node.vars), node.label)
    out.open_vars = sorted(set(ren.values()))
    for v in out.open_vars:
        out.dims.setdefault(v, datum.rank)
    return contract(out, cap or DEFAULT_CAP)


def check_O_axioms(datum: OrbifoldDatum, tol: float = 1e-9) -> AxiomReport:
    """Evaluate both sides of every oriented bubble, lune and triangle variant."""
    from .moves import oriented_variants

    residuals = {a: 0.0 for a in AXIOMS}
    insertions: dict[str, dict[str, tuple[int, int]]] = {}
    rows = []
    for v in oriented_variants():
        fam = axiom_family(v.kind, v.orbit)
        lhs = pattern_value(v.before, v.before_interface, datum)
        rhs = pattern_value(v.after, v.after_interface, datum)
        res = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
        residuals[fam] = max(residuals[fam], res)
        insertions.setdefault(fam, {
            "lhs": insertion_counts(v.before),
            "rhs": insertion_counts(v.after),
        })
        rows.append({"kind": v.kind, "variant": v.index, "orbit": v.orbit, "axiom": fam, "residual": res})
    return AxiomReport(residuals, rows, insertions, tol)
