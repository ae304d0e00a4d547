"""Reading and writing stencils, fields and model descriptions as JSON or TOML.

A model file is either a named zoo entry::

    {"model": "kitaev", "params": {"mu": 1.0}, "symmetry": {"trs": "plus"}}

or an explicit stencil::

    {"couplings": {"n": 1, "particle": "fermion", "kind": "hamiltonian", "dim": 1,
                   "terms": [{"dr": [1], "re": [[...]], "im": [[...]]}, ...]}}

Complex arrays are stored as separate ``re`` / ``im`` nested lists.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .bz_grid import make_grid
from .core import MatrixField, RealSpaceCouplings
from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def encode_array(a: np.ndarray) -> dict:
    a = np.asarray(a)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def decode_array(d) -> np.ndarray:
    if isinstance(d, dict):
        re = np.asarray(d.get("re", 0.0), float)
        im = np.asarray(d.get("im", np.zeros_like(re)), float)
        return re + 1j * im
    return np.asarray(d, complex)


def couplings_to_dict(c: RealSpaceCouplings) -> dict:
    return {
        "n": c.n, "particle": c.particle, "kind": c.kind, "dim": c.dim,
        "terms": [{"dr": list(dr), **encode_array(b)} for dr, b in sorted(c.terms.items())],
    }


def couplings_from_dict(d: dict) -> RealSpaceCouplings:
    try:
        terms = {tuple(t["dr"]): decode_array(t) for t in d["terms"]}
        return RealSpaceCouplings(int(d["n"]), d["particle"], d["kind"], int(d["dim"]), terms)
    except KeyError as exc:
        raise ConfigError(f"couplings entry is missing {exc}") from None


def field_to_dict(f: MatrixField) -> dict:
    return {"grid": f.grid.to_dict(), "role": f.role, "values": encode_array(f.values)}


def field_from_dict(d: dict) -> MatrixField:
    g = d["grid"]
    return MatrixField(make_grid(g["dim"], g["sizes"]), decode_array(d["values"]), d["role"])


def read_document(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        if path.suffix.lower() == ".toml":
            return tomllib.loads(text.decode())
        return json.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None


def write_json(obj, path: str | Path | None = None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=False)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load_model(source: str | Path | dict) -> tuple[RealSpaceCouplings, dict]:
    """Couplings plus the remaining metadata (``symmetry``, ``name``, ...) of a model file."""
    from .models import build_model

    doc = read_document(source) if not isinstance(source, dict) else dict(source)
    if "couplings" in doc:
        c = couplings_from_dict(doc["couplings"])
    elif "model" in doc:
        c = build_model(doc["model"], **doc.get("params", {}))
    else:
        raise ConfigError("model file needs a 'model' or a 'couplings' entry")
    meta = {k: v for k, v in doc.items() if k != "couplings"}
    return c, meta


def save_model(c: RealSpaceCouplings, path: str | Path | None = None, **meta) -> dict:
    doc = {**meta, "couplings": couplings_to_dict(c)}
    if path is not None:
        write_json(doc, path)
    return doc
