"""Command-line front end.

Every subcommand prints one JSON document to stdout (or writes it to
``--out``) and a one-line human summary to stderr.  Exit status is 0 on
success, 1 on a domain error (gap closing, symmetry violation, failed
convergence) and 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from contextlib import nullcontext
from pathlib import Path

import numpy as np

from . import __version__
from .bz_grid import BZGrid, make_grid
from .core import MatrixField, fourier, ground_state_covariance, validate
from .deform import connect_states, reconstruction_residual, state_path, trivialize_boson_state, \
    unitarize_boson_op_path, validate_path
from .disentangle import is_disentanglable
from .errors import ConfigError, DomainError
from .invariants import (chern_number, chern_simons_halfint, fu_kane_z2, pfaffian_z2, sewing_z2,
                         winding_number)
from .modelio import field_to_dict, load_model, read_document, save_model, write_json
from .models import MODEL_CLASS, build_model, random_state
from .symmetry import (AZClass, EMERGENT, SymmetrySpec, az_class, boson_op_u, check_all,
                       check_emergent, class_symmetries, extract_op, extract_state, polar_unitarize)
from .tables import dump_tables, homomorphism_info, table_one

log = logging.getLogger("gausstopo")

INVARIANTS = ("chern", "winding", "pfaffian", "sewing", "fukane", "cs")

# ASCII spellings accepted for model parameters
PARAM_ALIASES = {"μ": "mu", "Δ": "delta", "δ": "delta"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, AZClass):
        return obj.value
    return obj


# ---------------------------------------------------------------------------
# argument helpers


def parse_grid(text: str | None, dim: int, default: int) -> "BZGrid":
    if not text:
        return make_grid(dim, default)
    try:
        sizes = [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None
    if len(sizes) == 1:
        sizes = sizes * dim
    if len(sizes) != dim:
        raise ConfigError(f"grid {text!r} has {len(sizes)} axes, model has dim {dim}")
    return make_grid(dim, sizes)


def parse_params(text: str | None) -> dict:
    """``mu=1,t=1,delta=1`` (Greek names accepted) into a dict of numbers or strings."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise ConfigError(f"parameter {item!r} is not of the form name=value")
        key, val = (s.strip() for s in item.split("=", 1))
        key = PARAM_ALIASES.get(key, key)
        for conv in (int, float):
            try:
                out[key] = conv(val)
                break
            except ValueError:
                continue
        else:
            out[key] = val
    return out


def parse_spec(text: str | None) -> SymmetrySpec | None:
    if not text:
        return None
    if Path(text).is_file():
        doc = read_document(text)
    else:
        try:
            doc = json.loads(text)
        except ValueError:
            raise ConfigError(f"--spec is neither a file nor JSON: {text!r}") from None
    return SymmetrySpec.from_dict(doc.get("symmetry", doc))


def resolve_class(args, meta: dict) -> AZClass | None:
    """Class from ``--class``, ``--spec``, the model file, or the zoo registry."""
    if getattr(args, "cls", None):
        return AZClass(args.cls)
    spec = parse_spec(getattr(args, "spec", None))
    if spec is not None:
        return az_class(spec)
    if "class" in meta:
        return AZClass(meta["class"])
    if "symmetry" in meta:
        return az_class(meta["symmetry"])
    if meta.get("model") in MODEL_CLASS:
        return AZClass(MODEL_CLASS[meta["model"]])
    return None


def _load(args):
    if not args.model:
        raise ConfigError("--model is required")
    return load_model(args.model)


def _field(c, args, default: int) -> MatrixField:
    grid = parse_grid(args.grid, c.dim, default)
    f = fourier(c, grid)
    return ground_state_covariance(f) if f.role == "hamiltonian" else f


def _need_class(az, what: str) -> AZClass:
    if az is None:
        raise ConfigError(f"{what} needs a symmetry class (--class, --spec or a class in the model file)")
    return az


# ---------------------------------------------------------------------------
# invariants


def compute_invariant(name: str, f: MatrixField, az: AZClass | None) -> dict:
    """One named invariant of a state, Hamiltonian-derived state or operation."""
    if name not in INVARIANTS:
        raise ConfigError(f"unknown invariant {name!r}; choose from {INVARIANTS}")
    if name == "winding":
        if f.role == "fermion-op":
            u = extract_op(f, az or AZClass.A)
            u = u[0] if u.ndim == 4 else u
        elif f.role == "boson-op":
            W, _ = polar_unitarize(f)
            u = boson_op_u(W)
        else:
            u = extract_state(f, _need_class(az, "winding"))
        res = winding_number(MatrixField(f.grid, u),
                             refine=3 if f.grid.dim == 3 and min(f.grid.sizes) < 24 else 1)
    elif name == "chern":
        if az in (AZClass.A, AZClass.AI, AZClass.AII):
            res = chern_number(MatrixField(f.grid, extract_state(f, AZClass.A)))
        else:
            res = chern_number(f)
    elif name == "pfaffian":
        res = pfaffian_z2(f)
    elif name == "sewing":
        res = sewing_z2(f, az or AZClass.DIII)
    elif name == "fukane":
        res = fu_kane_z2(f, az or AZClass.AII)
    else:
        res = chern_simons_halfint(f, az or (AZClass.D if f.grid.dim == 1 else AZClass.AII))
    return res.to_dict()


def applicable_invariants(az: AZClass, d: int) -> list[str]:
    """Invariants reported for a state of class ``az`` in ``d`` dimensions."""
    names = []
    if d == 1:
        if az in (AZClass.AIII, AZClass.BDI, AZClass.CII):
            names.append("winding")
        if az in (AZClass.D, AZClass.BDI, AZClass.DIII):
            names.append("pfaffian")
        if az == AZClass.DIII:
            names.append("sewing")
    elif d == 2:
        if az in (AZClass.A, AZClass.D, AZClass.C):
            names.append("chern")
        if az in (AZClass.AII, AZClass.DIII):
            names.append("fukane")
    elif d == 3:
        if az in (AZClass.AIII, AZClass.DIII, AZClass.CI):
            names.append("winding")
        if az == AZClass.AII:
            names.append("cs")
    return names


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> dict:
    c, meta = _load(args)
    f = _field(c, args, 32)
    rep = validate(f, args.tol)
    out = {"model": meta.get("model", str(args.model)), "role": f.role,
           "grid": list(f.grid.sizes), "validation": rep.to_dict()}
    az = resolve_class(args, meta)
    if az is not None and f.particle == "fermion":
        checks = check_all(f, class_symmetries(az, f.n), args.tol)
        out["class"] = az.value
        out["symmetry"] = {ch.label: {"violation": ch.violation, "passed": ch.passed} for ch in checks}
        out["passed"] = rep.passed and all(ch.passed for ch in checks)
    else:
        out["passed"] = rep.passed
    if not out["passed"]:
        raise _Failed(out, "validation failed")
    return out


def cmd_classify(args) -> dict:
    spec = parse_spec(args.spec)
    out = {}
    if spec is not None:
        az = az_class(spec)
        out = {"class": az.value, "spec": spec.to_dict(),
               "emergent": dict(zip(("trs", "phs", "sls"), EMERGENT[az]))}
    if args.model:
        c, meta = load_model(args.model)
        f = _field(c, args, 16)
        if f.role != "fermion-state":
            raise ConfigError("emergent-symmetry report needs a fermionic state or Hamiltonian")
        out["emergent_report"] = check_emergent(f, args.tol)
    if not out:
        raise ConfigError("classify needs --spec and/or --model")
    return out


def cmd_invariant(args) -> dict:
    c, meta = _load(args)
    f = _field(c, args, 64 if c.dim == 1 else 24 if c.dim == 2 else 12)
    az = resolve_class(args, meta)
    return compute_invariant(args.name, f, az)


def cmd_deform(args) -> dict:
    c, meta = _load(args)
    default = 32 if c.dim == 1 else 16
    grid = parse_grid(args.grid, c.dim, default)
    if args.action == "trivialize-bstate":
        f = fourier(c, grid)
        path = trivialize_boson_state(f, args.steps)
        rep = validate_path(path, tol=args.tol)
        out = {"action": args.action, "path": rep.to_dict(),
               "endpoint_distance": float(np.abs(path.end.values - np.eye(f.size)).max())}
    elif args.action == "unitarize-bop":
        f = fourier(c, grid)
        path = unitarize_boson_op_path(f, args.steps)
        rep = validate_path(path, tol=args.tol)
        end = path.end.values
        out = {"action": args.action, "path": rep.to_dict(),
               "unitarity": float(np.abs(end @ np.conj(np.swapaxes(end, -1, -2)) - np.eye(f.size)).max())}
    else:
        if not args.target:
            raise ConfigError("connect needs --target (the end-point model)")
        c1, _ = load_model(args.target)
        if (c1.n, c1.dim, c1.kind) != (c.n, c.dim, c.kind):
            raise ConfigError("--model and --target must have the same mode count, dimension and kind")
        path = state_path(lambda lam: c.scaled(1 - lam) + c1.scaled(lam), grid, args.steps)
        rep = validate_path(path, tol=args.tol)
        op = connect_states(path)
        out = {"action": args.action, "path": rep.to_dict(),
               "residual": float(reconstruction_residual(op, path).max()),
               "op_validation": validate(op, args.tol).to_dict()}
    if args.bundle:
        write_json(_jsonable(path.to_dict()), args.bundle)
        out["bundle"] = str(args.bundle)
    return out


def cmd_disentangle(args) -> dict:
    c, meta = _load(args)
    az = _need_class(resolve_class(args, meta), "disentangle")
    f = _field(c, args, 64 if c.dim == 1 else 24 if c.dim == 2 else 12)
    if args.dim is not None and args.dim != f.grid.dim:
        raise ConfigError(f"--dim {args.dim} does not match the model dimension {f.grid.dim}")
    verdict = is_disentanglable(f, az, tol=args.tol)
    out = verdict.to_dict()
    if args.emit_op:
        if verdict.op is None:
            raise ConfigError("no explicit disentangler is available for this state")
        write_json(_jsonable(field_to_dict(verdict.op)), args.emit_op)
        out["op_file"] = str(args.emit_op)
    return out


def cmd_tables(args) -> dict:
    if args.dump:
        return dump_tables()
    if args.cls is None:
        return {"table1": table_one()}
    if args.dim is None:
        raise ConfigError("tables --class needs --dim")
    info = homomorphism_info(args.cls, args.dim)
    return {**info.to_dict(), "disentanglable": info.disentanglable, "consistency": info.consistency()}


def cmd_model(args) -> dict:
    params = parse_params(args.params)
    if args.name == "random":
        az = params.pop("class", None)
        d = params.pop("d", params.pop("dim", 1))
        if az is None:
            raise ConfigError("random model needs class=<AZ class>")
        c = random_state(az, int(d), seed=args.seed, **params)
        meta = {"model": "random", "class": str(AZClass(az).value), "seed": args.seed}
    else:
        c = build_model(args.name, **params)
        meta = {"model": args.name, "params": params}
        if args.name in MODEL_CLASS:
            meta["class"] = MODEL_CLASS[args.name]
    return save_model(c, None, **meta)


def cmd_report(args) -> dict:
    c, meta = _load(args)
    out = {"model": meta.get("model", str(args.model))}
    stage = "fourier"
    try:
        f = _field(c, args, 64 if c.dim == 1 else 24 if c.dim == 2 else 12)
        out["grid"] = list(f.grid.sizes)
        stage = "validation"
        out["validation"] = validate(f, args.tol).to_dict()
        az = resolve_class(args, meta)
        if f.role != "fermion-state":
            if f.role in ("fermion-op", "boson-op") and f.grid.dim in (1, 3):
                stage = "invariants"
                out["invariants"] = {"winding": compute_invariant("winding", f, az)}
            return out
        stage = "symmetry"
        out["emergent"] = check_emergent(f, args.tol)["holds"]
        if az is None:
            return out
        out["class"] = az.value
        checks = check_all(f, class_symmetries(az, f.n), args.tol)
        out["symmetry"] = {ch.label: ch.passed for ch in checks}
        stage = "invariants"
        out["invariants"] = {name: compute_invariant(name, f, az)
                             for name in applicable_invariants(az, f.grid.dim)}
        stage = "disentangle"
        verdict = is_disentanglable(f, az, tol=args.tol)
        out["disentanglable"] = verdict.disentanglable
        out["disentangle"] = verdict.to_dict()
    except DomainError as exc:
        raise DomainError(f"{stage}: {exc}") from exc
    return out


class _Failed(Exception):
    """Command produced a result that reports a failure (exit 1, output still printed)."""

    def __init__(self, payload: dict, message: str):
        super().__init__(message)
        self.payload = payload


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model file (JSON or TOML)")
    common.add_argument("--spec", help="symmetry spec as JSON or a file")
    common.add_argument("--class", dest="cls", choices=[c.value for c in AZClass], help="AZ class")
    common.add_argument("--grid", help="grid sizes, N or N,N[,N]")
    common.add_argument("--steps", type=int, default=200, help="path samples")
    common.add_argument("--tol", type=float, default=1e-9, help="validation tolerance")
    common.add_argument("--threads", type=int, default=None,
                        help="BLAS worker threads (default: $GAUSSTOPO_THREADS or 1)")
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="gausstopo", description="Topology of Gaussian states and operations.")
    p.add_argument("--version", action="version", version=f"gausstopo {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("validate", parents=[common], help="check algebraic constraints and symmetries")
    sub.add_parser("classify", parents=[common], help="AZ class of a symmetry spec; emergent symmetries")
    s = sub.add_parser("invariant", parents=[common], help="compute one topological invariant")
    s.add_argument("--name", required=True, choices=INVARIANTS)
    s = sub.add_parser("deform", parents=[common], help="deformation paths")
    s.add_argument("action", choices=("trivialize-bstate", "unitarize-bop", "connect"))
    s.add_argument("--target", help="end-point model for connect")
    s.add_argument("--bundle", help="write the sampled path as a JSON bundle")
    s = sub.add_parser("disentangle", parents=[common], help="disentanglability verdict and disentangler")
    s.add_argument("--dim", type=int)
    s.add_argument("--emit-op", dest="emit_op", help="write the disentangler field to this file")
    s = sub.add_parser("tables", parents=[common], help="periodic tables and homomorphism data")
    s.add_argument("--dim", type=int)
    s.add_argument("--dump", action="store_true", help="emit every table")
    s = sub.add_parser("model", parents=[common], help="emit a zoo model as a stencil file")
    s.add_argument("--name", required=True)
    s.add_argument("--params", help="name=value pairs, comma separated")
    sub.add_parser("report", parents=[common], help="validation, class, invariants and verdict")
    return p


COMMANDS = {
    "validate": cmd_validate, "classify": cmd_classify, "invariant": cmd_invariant,
    "deform": cmd_deform, "disentangle": cmd_disentangle, "tables": cmd_tables,
    "model": cmd_model, "report": cmd_report,
}


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("GAUSSTOPO_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"GAUSSTOPO_THREADS={env!r} is not an integer") from None
    return 1


def _emit(doc: dict, out: str | None) -> None:
    text = write_json(_jsonable(doc), out)
    if out is None:
        sys.stdout.write(text + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        from threadpoolctl import threadpool_limits
        limits = threadpool_limits(limits=_threads(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    with limits if limits is not None else nullcontext():
        try:
            doc = COMMANDS[args.command](args)
        except _Failed as exc:
            _emit(exc.payload, args.out)
            print(f"{args.command}: {exc}", file=sys.stderr)
            return 1
        except DomainError as exc:
            _emit({"error": type(exc).__name__, "message": str(exc)}, args.out)
            print(f"{args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
        except (ConfigError, ValueError, KeyError) as exc:
            print(f"{args.command}: error: {exc}", file=sys.stderr)
            return 2
    _emit(doc, args.out)
    print(f"{args.command}: ok", file=sys.stderr)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
