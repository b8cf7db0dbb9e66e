"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 tolerance breach, 3 I/O or schema error.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import click
import numpy as np

from . import diagram as _diagram
from . import fusion_data, library, moves, skeleton
from .evaluator import DEFAULT_CAP, EvaluationError, evaluate_closed, state_space
from .orbifold_datum import check_O_axioms, datum_from_spherical
from .wilson import WilsonError, evaluate_graph

OK, INVALID, BREACH, IO = 0, 1, 2, 3
DEFAULT_TOL = 1e-9


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    cat: str | None = None
    manifold: str | None = None
    surface: str | None = None
    graph: str | None = None
    seed: int = 0
    moves: int = 0
    tol: float = DEFAULT_TOL
    cap: int = DEFAULT_CAP
    fmt: str = "json"
    out: str | None = None
    paths: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.tol > 0:
            raise CliError(IO, "--tol must be positive")
        if self.cap <= 0:
            raise CliError(IO, "--cap must be positive")
        if self.moves < 0:
            raise CliError(IO, "--moves must be non-negative")


# ---------------------------------------------------------------------------------
# sources


def _read_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise CliError(IO, f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(IO, f"{path} is not valid JSON: {exc}") from None


def _is_file(spec: str) -> bool:
    return spec.endswith(".json") or Path(spec).is_file()


def load_cat(spec: str, tol: float = DEFAULT_TOL) -> fusion_data.FusionCategory:
    if _is_file(spec):
        try:
            return fusion_data.load_category(_read_json(Path(spec)), tol)
        except fusion_data.CategoryError as exc:
            raise CliError(INVALID, f"{spec}: {exc}") from None
    if spec.lower() not in fusion_data.BUILTIN_NAMES:
        raise CliError(IO, f"unknown category {spec!r}; builtins: {', '.join(fusion_data.BUILTIN_NAMES)}")
    return fusion_data.builtin(spec)


def load_skeleton(spec: str) -> skeleton.Skeleton:
    if _is_file(spec):
        try:
            return skeleton.Skeleton.from_doc(_read_json(Path(spec)))
        except (skeleton.SkeletonError, KeyError, TypeError, ValueError) as exc:
            raise CliError(INVALID, f"{spec}: {exc}") from None
    try:
        return library.get(spec)
    except KeyError:
        raise CliError(IO, f"unknown manifold {spec!r}; known: {', '.join(library.names())}") from None


def load_graph_doc(spec: str) -> dict:
    p = Path(spec)
    if p.is_file():
        return _read_json(p)
    fx = resources.files("orbtqft").joinpath("fixtures", "graphs", p.name if p.suffix else f"{spec}.json")
    if fx.is_file():
        return json.loads(fx.read_text())
    raise CliError(IO, f"graph file {spec!r} not found")


# ---------------------------------------------------------------------------------
# output


def _emit(cfg: RunConfig, result: dict) -> None:
    if cfg.fmt == "tsv":
        text = "\n".join(f"{k}\t{json.dumps(v) if isinstance(v, (dict, list)) else v}" for k, v in result.items())
    else:
        text = json.dumps(result, indent=1, sort_keys=True, default=_jsonable)
    if cfg.out:
        try:
            Path(cfg.out).write_text(text + "\n")
        except OSError as exc:
            raise CliError(IO, f"cannot write {cfg.out}: {exc.strerror or exc}") from None
    else:
        click.echo(text)


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not serializable: {type(x).__name__}")


def _value_record(manifold: str, category: str, value: complex, sk_id: str, log_hash: str) -> dict:
    return {
        "manifold": manifold,
        "category": category,
        "value_re": float(value.real),
        "value_im": float(value.imag),
        "skeleton_id": sk_id,
        "move_log_hash": log_hash,
    }


def _graph_id(doc: dict) -> str:
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------------
# commands


def cmd_validate(cfg: RunConfig) -> tuple[int, dict]:
    items = []
    specs = [("category", cfg.cat)] if cfg.cat else []
    specs += [("skeleton", cfg.manifold)] if cfg.manifold else []
    specs += [(None, p) for p in cfg.paths]
    if not specs:
        raise CliError(IO, "nothing to validate")
    for kind, spec in specs:
        items.append(_validate_one(kind, spec, cfg.tol))
    ok = all(it["ok"] for it in items)
    return (OK if ok else INVALID), {"ok": ok, "items": items}


def _validate_one(kind: str | None, spec: str, tol: float) -> dict:
    doc = _read_json(Path(spec)) if _is_file(spec) else None
    if kind is None:
        if doc is not None:
            kind = "category" if "simples" in doc else "skeleton" if "strata" in doc else None
            if kind is None:
                raise CliError(IO, f"{spec}: neither a category nor a skeleton document")
        elif spec.lower() in fusion_data.BUILTIN_NAMES:
            kind = "category"
        else:
            kind = "skeleton"
    if kind == "category":
        if doc is None:
            cat = load_cat(spec, tol)
        else:
            try:
                cat = _build_unchecked(doc)
            except fusion_data.CategoryError as exc:
                return {"source": spec, "kind": kind, "ok": False, "max_residual": None, "worst": None,
                        "messages": [str(exc)]}
        rep = fusion_data.check_invariants(cat, tol)
        return {"source": spec, "kind": kind, **rep.to_dict()}
    if doc is None:
        sk = load_skeleton(spec)
    else:
        try:
            sk = skeleton.Skeleton.from_doc(doc)
        except (skeleton.SkeletonError, KeyError, TypeError, ValueError) as exc:
            return {"source": spec, "kind": kind, "ok": False, "messages": [str(exc)]}
    rep = skeleton.validate(sk)
    return {"source": spec, "kind": kind, "ok": bool(rep.ok), "messages": list(rep.violations),
            "skeleton_id": moves.fingerprint(sk)}


def _build_unchecked(doc: dict) -> fusion_data.FusionCategory:
    # same schema checks as load_category, without raising on failed axioms
    try:
        return fusion_data.load_category(doc, tol=float("inf"))
    except fusion_data.CategoryError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise fusion_data.CategoryError(f"malformed category document: {exc}") from None


def cmd_invariant(cfg: RunConfig) -> tuple[int, dict]:
    cat = load_cat(cfg.cat or "trivial", cfg.tol)
    datum = datum_from_spherical(cat)
    sk = load_skeleton(cfg.manifold or "s3_two_balls")
    if not sk.is_closed:
        raise CliError(INVALID, f"{cfg.manifold} is not closed")
    value = evaluate_closed(sk, datum, cfg.cap)
    _, log = moves.random_walk(sk, cfg.moves, seed=cfg.seed, max_size=2 * len(sk.strata) + 30) if cfg.moves else (sk, [])
    drift = 0.0
    cur = sk
    for app in log:
        cur = moves.apply(cur, app)
        drift = max(drift, abs(evaluate_closed(cur, datum, cfg.cap) - value))
    rec = _value_record(sk.name or str(cfg.manifold), cat.name, value, moves.fingerprint(sk), moves.log_hash(log))
    rec.update({"moves": len(log), "max_drift": drift, "tol": cfg.tol})
    return (BREACH if drift > cfg.tol else OK), rec


def cmd_axioms(cfg: RunConfig) -> tuple[int, dict]:
    cat = load_cat(cfg.cat or "trivial", cfg.tol)
    rep = check_O_axioms(datum_from_spherical(cat), tol=cfg.tol)
    out = {"category": cat.name, "ok": rep.ok, "tol": cfg.tol, "residuals": rep.residuals, "worst": rep.worst,
           "passed": sorted(k for k, v in rep.residuals.items() if v < cfg.tol)}
    return (OK if rep.ok else BREACH), out


def cmd_statespace(cfg: RunConfig) -> tuple[int, dict]:
    cat = load_cat(cfg.cat or "trivial", cfg.tol)
    name = cfg.surface or "s2"
    if name not in library.SURFACES:
        raise CliError(IO, f"unknown surface {name!r}; known: {', '.join(sorted(library.SURFACES))}")
    try:
        dim, P = state_space(name, datum_from_spherical(cat), cfg.cap)
    except EvaluationError as exc:
        return BREACH, {"category": cat.name, "surface": name, "error": str(exc)}
    idem = float(np.max(np.abs(P @ P - P))) if P.size else 0.0
    out = {"category": cat.name, "surface": name, "dim": dim, "basis_size": int(P.shape[0]),
           "trace_re": float(np.trace(P).real), "trace_im": float(np.trace(P).imag), "idempotent_residual": idem}
    return (BREACH if idem > cfg.tol else OK), out


def cmd_graph(cfg: RunConfig) -> tuple[int, dict]:
    if not cfg.graph:
        raise CliError(IO, "--graph is required")
    cat = load_cat(cfg.cat or "vec_z2", cfg.tol)
    datum = datum_from_spherical(cat)
    doc = load_graph_doc(cfg.graph)
    if cfg.manifold:
        doc = dict(doc)
        if doc.get("manifold") not in (None, cfg.manifold):
            target = load_skeleton(cfg.manifold)
            if moves.fingerprint(target) != moves.fingerprint(skeleton.Skeleton.from_doc(doc["skeleton"])):
                raise CliError(INVALID, f"graph is drawn on {doc.get('manifold')!r}, not {cfg.manifold!r}")
        doc["manifold"] = cfg.manifold
    try:
        d = _diagram.from_doc(doc, datum)
        value = evaluate_graph(d, datum, cfg.cap)
    except (_diagram.DiagramError, WilsonError, KeyError, TypeError, ValueError) as exc:
        raise CliError(INVALID, f"{cfg.graph}: {exc}") from None
    drift = 0.0
    log = []
    if cfg.moves:
        cur, log = _diagram.random_moves(d, cfg.moves, seed=cfg.seed)
        drift = abs(evaluate_graph(cur, datum, cfg.cap) - value)
    lh = hashlib.sha256(json.dumps([[k, repr(s)] for k, s in log]).encode()).hexdigest()[:16]
    rec = _value_record(doc.get("manifold", ""), cat.name, value, _graph_id(doc), lh)
    rec.update({"moves": len(log), "max_drift": drift, "tol": cfg.tol})
    return (BREACH if drift > cfg.tol else OK), rec


COMMANDS = {
    "validate": cmd_validate,
    "invariant": cmd_invariant,
    "axioms": cmd_axioms,
    "statespace": cmd_statespace,
    "graph": cmd_graph,
}


def run(cfg: RunConfig) -> int:
    try:
        code, result = COMMANDS[cfg.command](cfg)
        _emit(cfg, result)
        return code
    except CliError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.code
    except (fusion_data.CategoryError, skeleton.SkeletonError) as exc:
        click.echo(f"error: {exc}", err=True)
        return INVALID
    except EvaluationError as exc:
        click.echo(f"error: {exc}", err=True)
        return BREACH


# ---------------------------------------------------------------------------------
# click wiring


def _common(f):
    opts = [
        click.option("--cat", default=None, help="Builtin category name or category JSON file."),
        click.option("--manifold", default=None, help="Library skeleton name or skeleton JSON file."),
        click.option("--surface", default=None, help="Surface name for state spaces."),
        click.option("--graph", default=None, help="Ribbon diagram JSON file or fixture name."),
        click.option("--seed", default=0, show_default=True, type=int),
        click.option("--moves", default=0, show_default=True, type=int, help="Random moves for stability checks."),
        click.option("--tol", default=DEFAULT_TOL, show_default=True, type=float),
        click.option("--cap", default=DEFAULT_CAP, show_default=True, type=int, help="Max entries per intermediate."),
        click.option("--format", "fmt", default="json", show_default=True, type=click.Choice(["json", "tsv"])),
        click.option("--out", default=None, help="Write the result here instead of stdout."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main() -> None:
    """Orbifold TQFT evaluation tools."""


def _command(name: str, with_paths: bool = False):
    def body(paths=(), **kw):
        try:
            cfg = RunConfig(name, paths=list(paths), **kw)
        except CliError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.code)
        sys.exit(run(cfg))

    body.__name__ = f"cmd_{name}"
    body.__doc__ = {
        "validate": "Validate categories and skeleta (files or builtin names).",
        "invariant": "Closed-manifold invariant, with optional random-move stability check.",
        "axioms": "Residuals of the eight orbifold-datum axiom families.",
        "statespace": "State-space dimension of a surface.",
        "graph": "Invariant of a ribbon diagram colored by Wilson lines.",
    }[name]
    f = _common(body)
    if with_paths:
        f = click.argument("paths", nargs=-1)(f)
    main.command(name)(f)


for _n in COMMANDS:
    _command(_n, with_paths=_n == "validate")


if __name__ == "__main__":  # pragma: no cover
    main()
