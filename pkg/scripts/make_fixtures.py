"""Regenerate the shipped fixtures from their constructions and check round trips."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from orbtqft import diagram as D
from orbtqft import fusion_data, library, moves
from orbtqft.evaluator import evaluate_closed
from orbtqft.orbifold_datum import datum_from_spherical
from orbtqft.skeleton import Skeleton
from orbtqft.wilson import center_objects_pointed

ROOT = Path(__file__).resolve().parents[1] / "src" / "orbtqft" / "fixtures"


def write(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def categories() -> None:
    for name in fusion_data.BUILTIN_NAMES:
        cat = fusion_data._construct(name)
        doc = json.loads(fusion_data.dump_category(cat))
        back = fusion_data.load_category(doc)
        assert np.array_equal(back.tensor(), cat.tensor()), name
        write(ROOT / "categories" / f"{name}.json", doc)


def skeleta() -> None:
    z2 = datum_from_spherical(fusion_data._construct("vec_z2"))
    for name in (*library.CLOSED_NAMES, "s3_two_tets"):
        library._get.cache_clear()
        sk = library._get(name)
        doc = sk.to_doc()
        back = Skeleton.from_doc(doc)
        assert moves.fingerprint(back) == moves.fingerprint(sk), name
        assert evaluate_closed(back, z2) == evaluate_closed(sk, z2), name
        write(ROOT / "skeleta" / f"{name}.json", doc)


def graphs() -> None:
    d = datum_from_spherical(fusion_data._construct("vec_z2"))
    objs = {o.pointed[0] * 2 + int(abs(o.pointed[1][1] + 1) < 1e-9): o for o in center_objects_pointed(d)}
    sk = library.get("s3_two_balls")
    X, Y = objs[3], objs[2]
    spec = {"X": {"pointed": {"g": 1, "chi": [0, 1]}}, "Y": {"pointed": {"g": 1, "chi": [0, 0]}}}
    write(ROOT / "graphs" / "hopf.json", D.to_doc(D.hopf(sk, X, Y), color_docs=spec))
    write(ROOT / "graphs" / "unknot.json", D.to_doc(D.unknot(sk, X), color_docs={"X": spec["X"]}))


if __name__ == "__main__":
    categories()
    skeleta()
    graphs()
