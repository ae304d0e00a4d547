"""Explicit disentanglers and a disentanglability decision procedure.

A state is disentanglable when a symmetric, locality-preserving Gaussian
operation maps a correlation-free reference onto it.  For the chiral
classes the reduced state ``q(k)`` factors as ``u1 q0 u2^dag`` and the
choice ``u1 = q q0^dag, u2 = 1`` gives the operation directly.  For DIII and
CI a seed unitary ``u(k)`` produces both the state ``q = u q0 u(-k)^T`` and
the operation that creates it.  Everywhere else the answer comes from the
homomorphism tables, certified by the obstructing invariant when one is
implemented for the class and dimension.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import MatrixField, apply_op, inverse_fourier, validate
from .errors import ConfigError, DomainError, SymmetryError
from .invariants import (InvariantResult, chern_number, fu_kane_z2, pfaffian_z2, sewing_z2,
                         strong_index_3d, winding_number)
from .models import bdg_q_from_u
from .symmetry import (CHIRAL, AZClass, ReducedField, _dag, check_all, class_symmetries,
                       extract_state, mode_multiple, reconstruct_op, reconstruct_state, reduced)
from .tables import homomorphism_info

log = logging.getLogger(__name__)

CORRELATION_TOL = 1e-8
ROUNDTRIP_TOL = 1e-8


def reference_q(az: AZClass | str, m: int) -> np.ndarray:
    """Constant reduced form of the correlation-free reference state."""
    az = AZClass(az)
    if az == AZClass.BDI:
        # q(-k)^* = -q(k) rules out q = 1 in class BDI
        return 1j * np.eye(m)
    if az in (AZClass.AIII, AZClass.CII, AZClass.CI):
        return np.eye(m, dtype=complex)
    if az == AZClass.DIII:
        return bdg_q_from_u(np.eye(m, dtype=complex)[None], np.zeros(1, int), az)[0]
    raise ConfigError(f"no reduced q form in class {az}")


def reference_state(az: AZClass | str, grid, m: int) -> MatrixField:
    q0 = np.broadcast_to(reference_q(az, m), (grid.npoints, m, m)).copy()
    return reconstruct_state(reduced(q0, az, grid))


def offsite_ratio(field: MatrixField) -> float:
    """Largest ``dr != 0`` block relative to the ``dr = 0`` block (max-norm)."""
    vals = field.values
    onsite = np.abs(vals.mean(axis=0)).max()
    max_range = min(field.grid.sizes) // 2
    terms = inverse_fourier(field, max_range, drop_tol=0.0).terms
    off = max((np.abs(b).max() for dr, b in terms.items() if any(dr)), default=0.0)
    return float(off / onsite) if onsite > 0 else float("inf")


def is_correlation_free(field: MatrixField, tol: float = CORRELATION_TOL) -> bool:
    return offsite_ratio(field) < tol


def _symmetry_failures(field: MatrixField, az: AZClass, tol: float) -> list[str]:
    return [f"{c.label} ({c.violation:.2g})"
            for c in check_all(field, class_symmetries(az, field.n), tol) if not c.passed]


def build_disentangler_chiral(q_field: MatrixField, az: AZClass | str,
                              tol: float = 1e-8) -> MatrixField:
    """Operation ``V`` with ``V Gamma_0 V^dag = Gamma(q)`` for a chiral-class ``q``.

    Parameters
    ----------
    q_field : MatrixField
        Reduced state ``q(k)``, as returned by :func:`extract_state`.
    az : {"AIII", "BDI", "CII"}
    tol : float
        Symmetry tolerance for the input and the emitted operation.

    Returns
    -------
    MatrixField
        Fermionic operation built from ``u1 = q q0^dag`` and ``u2 = 1``, so its
        winding equals that of ``q``.  ``V^dag`` disentangles the state.

    Raises
    ------
    SymmetryError
        If ``q`` is not unitary or does not describe a state of class ``az``.
    """
    az = AZClass(az)
    if az not in CHIRAL:
        raise ConfigError(f"chiral disentangler needs AIII, BDI or CII, got {az}")
    grid, q = q_field.grid, q_field.values
    m = q.shape[-1]
    unit = np.abs(q @ _dag(q) - np.eye(m)).max()
    if unit > tol:
        raise SymmetryError(f"q is not unitary (deviation {unit:.2g})")
    target = reconstruct_state(reduced(q, az, grid))
    bad = _symmetry_failures(target, az, tol)
    bad += [f"{k} ({v:.2g})" for k, v in validate(target, tol).violations.items() if v >= tol]
    if bad:
        raise SymmetryError(f"q is inconsistent with class {az}: {', '.join(bad)}")
    u1 = q @ _dag(reference_q(az, m))
    u2 = np.broadcast_to(np.eye(m, dtype=complex), q.shape)
    op = reconstruct_op(ReducedField("u-pair", np.stack([u1, u2]), az, grid))
    bad = _symmetry_failures(op, az, tol)
    if bad:  # pragma: no cover - guaranteed by the reduced form
        raise SymmetryError(f"assembled operation breaks class {az}: {', '.join(bad)}")
    return op


def disentangle(state: MatrixField, op: MatrixField) -> MatrixField:
    """``V^dag Gamma V``: undo the operation that created ``state``."""
    return apply_op(op.dagger(), state)


@dataclass
class BdGConstruction:
    """State built from a seed ``u(k)`` together with the operation creating it."""

    state: MatrixField
    op: MatrixField
    reference: MatrixField
    residual: float

    def __iter__(self):
        return iter((self.state, self.op))


def build_disentangler_bdg(u_field: MatrixField, az: AZClass | str) -> BdGConstruction:
    """DIII / CI state with ``q = u (s_y (x) 1) u(-k)^T`` or ``u u(-k)^T``, and its operation.

    The operation is the class's reduced form evaluated at ``u``; applying it
    to the reference state reproduces the constructed state.  Unpacks as
    ``state, op``.
    """
    az = AZClass(az)
    if az not in (AZClass.DIII, AZClass.CI):
        raise ConfigError(f"BdG construction applies to DIII and CI, got {az}")
    grid, u = u_field.grid, u_field.values
    m = u.shape[-1]
    if az == AZClass.DIII and m % 2:
        raise ConfigError("class DIII needs an even-dimensional u")
    q = bdg_q_from_u(u, grid.negation, az)
    state = reconstruct_state(reduced(q, az, grid))
    op = reconstruct_op(ReducedField("u", u, az, grid))
    ref = reference_state(az, grid, m)
    residual = float(np.abs(apply_op(op, ref).values - state.values).max())
    if residual > ROUNDTRIP_TOL:
        log.warning("BdG round trip residual %.3g exceeds %.1g", residual, ROUNDTRIP_TOL)
    return BdGConstruction(state, op, ref, residual)


# ---------------------------------------------------------------------------
# decision procedure


def _q_winding(state: MatrixField, az: AZClass) -> InvariantResult:
    q = MatrixField(state.grid, extract_state(state, az))
    refine = 3 if state.grid.dim == 3 and min(state.grid.sizes) < 24 else 1
    return winding_number(q, refine=refine)


def state_invariant(state: MatrixField, az: AZClass | str) -> InvariantResult | None:
    """The invariant that detects the strong state classification, or ``None``.

    ``None`` means no numerical invariant is implemented for this class and
    dimension (or the classification is trivial).
    """
    az = AZClass(az)
    d = state.grid.dim
    if d == 1:
        if az in CHIRAL:
            return _q_winding(state, az)
        if az == AZClass.D:
            return pfaffian_z2(state)
        if az == AZClass.DIII:
            return sewing_z2(state, az)
    elif d == 2:
        if az == AZClass.A:
            return chern_number(MatrixField(state.grid, extract_state(state, az)))
        if az in (AZClass.D, AZClass.C):
            return chern_number(state)
        if az in (AZClass.AII, AZClass.DIII):
            return fu_kane_z2(state, az)
    elif d == 3:
        if az in (AZClass.AIII, AZClass.DIII, AZClass.CI):
            return _q_winding(state, az)
        if az == AZClass.AII:
            return strong_index_3d(state, az)
    return None


def _in_image(value: int, inv: InvariantResult, image, state_group) -> bool | None:
    """Whether an invariant value lies in the image subgroup, when decidable."""
    if inv.group == "Z2":
        if image.trivial:
            return value == 1
        return True
    if image.trivial:
        return value == 0
    if len(image.factors) == 1 and len(state_group.factors) == 1:
        img, st = image.factors[0], state_group.factors[0]
        if img == st:
            return True
        if img == "2Z" and st == "Z":
            return value % 2 == 0
    return None


@dataclass
class Verdict:
    """Outcome of :func:`is_disentanglable`."""

    az: AZClass
    d: int
    disentanglable: bool | None
    source: str                       # "table" or "invariant"
    table: dict
    invariant: InvariantResult | None = None
    op: MatrixField | None = None
    residual: float | None = None
    table_only: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def obstruction(self) -> int | None:
        if self.disentanglable is False and self.invariant is not None:
            return self.invariant.value
        return None

    def to_dict(self) -> dict:
        out = {
            "class": str(self.az), "d": self.d,
            "disentanglable": self.disentanglable, "source": self.source,
            "table_only": self.table_only, "homomorphism": self.table,
        }
        if self.invariant is not None:
            out["invariant"] = self.invariant.to_dict()
        if self.obstruction is not None:
            out["obstruction"] = self.obstruction
        if self.op is not None:
            out["op_available"] = True
            out["offsite_ratio"] = self.residual
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _chiral_host(state: MatrixField, az: AZClass, tol: float) -> AZClass | None:
    """Chiral class whose builder applies to ``state`` (possibly by forgetting TRS)."""
    if az in CHIRAL:
        return az
    for host in {AZClass.D: (AZClass.BDI,), AZClass.C: (AZClass.CII,),
                 AZClass.A: (AZClass.AIII,)}.get(az, ()):
        if state.n % mode_multiple(host) == 0 and not _symmetry_failures(state, host, tol):
            return host
    return None


def is_disentanglable(state: MatrixField, az: AZClass | str, d: int | None = None,
                      build: bool = True, tol: float = 1e-8) -> Verdict:
    """Decide whether ``state`` is disentanglable within class ``az``.

    The table answer is final whenever every state class lies in the image
    of the homomorphism from operations to states.  Otherwise the obstructing
    invariant is computed and tested for membership in the image.  When the
    answer is yes and a chiral builder applies (directly, or by forgetting a
    time reversal that the state happens to respect), the disentangler is
    attached and checked for correlation-freeness.
    """
    az = AZClass(az)
    d = state.grid.dim if d is None else d
    if d != state.grid.dim:
        raise ConfigError(f"state lives in d={state.grid.dim}, requested d={d}")
    bad = _symmetry_failures(state, az, tol)
    if bad:
        raise SymmetryError(f"state violates class {az}: {', '.join(bad)}")
    info = homomorphism_info(az, d)
    verdict = Verdict(az, d, None, "table", info.to_dict())
    try:
        verdict.invariant = state_invariant(state, az)
    except DomainError as exc:
        verdict.notes.append(f"invariant unavailable: {exc}")

    if info.state_group.trivial or info.disentanglable:
        verdict.disentanglable = True
    elif verdict.invariant is None:
        verdict.table_only = True
        verdict.notes.append("no numerical invariant for this class and dimension; "
                             "the table leaves the answer state dependent")
    else:
        inv = verdict.invariant
        verdict.source = "invariant"
        verdict.disentanglable = _in_image(inv.value, inv, info.image, info.state_group)
        if verdict.disentanglable is None:
            verdict.table_only = True
            verdict.notes.append("image membership not decidable from a single invariant")

    if verdict.disentanglable and build:
        host = _chiral_host(state, az, tol)
        if host is not None:
            q = MatrixField(state.grid, extract_state(state, host))
            op = build_disentangler_chiral(q, host, tol)
            verdict.op = op
            verdict.residual = offsite_ratio(disentangle(state, op))
            if host != az:
                verdict.notes.append(f"disentangler built in class {host} and read as class {az}")
        else:
            verdict.notes.append("no explicit disentangler builder for this class")
    return verdict


__all__ = [
    "reference_q", "reference_state", "offsite_ratio", "is_correlation_free",
    "build_disentangler_chiral", "build_disentangler_bdg", "BdGConstruction", "disentangle",
    "state_invariant", "Verdict", "is_disentanglable",
]
