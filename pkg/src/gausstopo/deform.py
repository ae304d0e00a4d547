"""Explicit continuous deformations of states and operations.

* :func:`trivialize_boson_state` contracts a pure bosonic state to the vacuum
  along ``Gamma(lambda) = Gamma^(1 - lambda)``.
* :func:`unitarize_boson_op_path` removes the positive polar factor of a
  bosonic operation in the same way.
* :func:`connect_states` integrates ``dV/dlambda = K V`` with
  ``K_f = Gamma dGamma / 2`` (fermions) or ``K_b = Gamma s dGamma s / 2``
  (bosons, ``s`` the symplectic form), producing the operation that carries
  the first sample of a state path onto the last one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bz_grid import BZGrid
from .core import (MatrixField, RealSpaceCouplings, decay_profile, fourier, ground_state_covariance,
                   symplectic_form, validate)
from .errors import ConfigError, ConvergenceError, DomainError
from .symmetry import SymmetryMatrix, check_all, polar_unitarize

log = logging.getLogger(__name__)

DEFAULT_STEPS = 200
PATH_TOL = 1e-6


def _dag(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


@dataclass
class FieldPath:
    """Samples ``lambda_0 = 0 < ... < lambda_M = 1`` of a one-parameter family of fields."""

    lambdas: np.ndarray
    fields: list[MatrixField]
    role: str

    def __post_init__(self):
        self.lambdas = np.asarray(self.lambdas, float)
        if len(self.lambdas) != len(self.fields) or len(self.fields) < 2:
            raise ConfigError("a path needs at least two samples, one per lambda")
        if np.any(np.diff(self.lambdas) <= 0):
            raise ConfigError("path parameters must increase strictly")
        grids = {f.grid for f in self.fields}
        if len(grids) != 1:
            raise ConfigError("all path samples must share one grid")
        if any(f.role != self.role for f in self.fields):
            raise ConfigError("all path samples must share the path role")

    def __len__(self) -> int:
        return len(self.fields)

    def __getitem__(self, i: int) -> MatrixField:
        return self.fields[i]

    @property
    def grid(self) -> BZGrid:
        return self.fields[0].grid

    @property
    def start(self) -> MatrixField:
        return self.fields[0]

    @property
    def end(self) -> MatrixField:
        return self.fields[-1]

    def stack(self) -> np.ndarray:
        """Values as one array of shape ``(samples, npoints, m, m)``."""
        return np.stack([f.values for f in self.fields])

    def to_dict(self) -> dict:
        from .modelio import field_to_dict
        return {"role": self.role, "lambdas": self.lambdas.tolist(),
                "samples": [field_to_dict(f) for f in self.fields]}

    @classmethod
    def from_dict(cls, d: dict) -> "FieldPath":
        from .modelio import field_from_dict
        return cls(np.asarray(d["lambdas"]), [field_from_dict(s) for s in d["samples"]], d["role"])


def _uniform(steps: int) -> np.ndarray:
    if steps < 1:
        raise ConfigError("steps must be positive")
    return np.linspace(0.0, 1.0, steps + 1)


# ---------------------------------------------------------------------------
# bosonic contractions


def _positive_power_family(P: np.ndarray, lambdas: np.ndarray, what: str) -> list[np.ndarray]:
    """``P^(1 - lambda)`` for Hermitian positive ``P`` by one spectral decomposition."""
    w, U = np.linalg.eigh(0.5 * (P + _dag(P)))
    if w.min() <= 0:
        raise DomainError(f"{what} is not positive definite (min eigenvalue {w.min():.3g})")
    logw = np.log(w)
    Ud = _dag(U)
    return [(U * np.exp((1.0 - lam) * logw)[..., None, :]) @ Ud for lam in lambdas]


def trivialize_boson_state(state: MatrixField, steps: int = DEFAULT_STEPS,
                           symmetries: Sequence[SymmetryMatrix] | None = None,
                           tol: float = 1e-9) -> FieldPath:
    """Path ``Gamma(k; lambda) = exp((1 - lambda) log Gamma_b(k))`` to the vacuum.

    The logarithm is unique because ``Gamma_b > 0``.  If ``symmetries`` are
    given they are verified on the input; every power of ``Gamma_b`` then
    inherits them.
    """
    if state.role != "boson-state":
        raise ConfigError("trivialize_boson_state needs a boson-state field")
    report = validate(state, tol)
    if report.violations["positivity"] > 0 or report.extras["min_eigenvalue"] <= 0:
        raise DomainError("bosonic covariance is not positive definite")
    if symmetries:
        bad = [c.label for c in check_all(state, list(symmetries), tol) if not c.passed]
        if bad:
            raise DomainError(f"input state violates symmetries {bad}")
    lambdas = _uniform(steps)
    vals = _positive_power_family(state.values, lambdas, "bosonic covariance")
    return FieldPath(lambdas, [state.with_values(v) for v in vals], "boson-state")


def unitarize_boson_op_path(op: MatrixField, steps: int = DEFAULT_STEPS) -> FieldPath:
    """Path ``V(k; lambda) = W(k) P(k)^(1 - lambda)`` from ``V = W P`` to its unitary part."""
    if op.role != "boson-op":
        raise ConfigError("unitarize_boson_op_path needs a boson-op field")
    W, P = polar_unitarize(op)
    lambdas = _uniform(steps)
    vals = _positive_power_family(P.values, lambdas, "polar factor")
    return FieldPath(lambdas, [op.with_values(W.values @ v) for v in vals], "boson-op")


# ---------------------------------------------------------------------------
# state paths and the generating operation


def state_path(builder: Callable[[float], RealSpaceCouplings | MatrixField], grid: BZGrid,
               steps: int = DEFAULT_STEPS) -> FieldPath:
    """Sample a path of states from ``builder(lambda)``.

    ``builder`` may return a fermionic Hamiltonian (stencil or field), which is
    flattened at every sample, or a state directly.
    """
    lambdas = _uniform(steps)
    fields = []
    for lam in lambdas:
        obj = builder(float(lam))
        f = fourier(obj, grid) if isinstance(obj, RealSpaceCouplings) else obj
        if f.role == "hamiltonian":
            f = ground_state_covariance(f)
        fields.append(f)
    return FieldPath(lambdas, fields, fields[0].role)


def _lambda_derivative(G: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite differences along the first axis (one-sided at the ends)."""
    M = G.shape[0]
    if M < 5:
        raise ConfigError("connect_states needs at least 5 path samples")
    d = np.empty_like(G)
    d[2:-2] = (G[:-4] - 8 * G[1:-3] + 8 * G[3:-1] - G[4:]) / (12 * h)
    fwd = np.array([-25, 48, -36, 16, -3]) / (12 * h)
    d[0] = np.tensordot(fwd, G[0:5], axes=1)
    d[1] = np.tensordot(np.array([-3, -10, 18, -6, 1]) / (12 * h), G[0:5], axes=1)
    d[-1] = -np.tensordot(fwd, G[-1:-6:-1], axes=1)
    d[-2] = -np.tensordot(np.array([-3, -10, 18, -6, 1]) / (12 * h), G[-1:-6:-1], axes=1)
    return d


def _midpoints(K: np.ndarray) -> np.ndarray:
    """Cubic (four-point) interpolation of ``K`` at ``lambda_{j + 1/2}``."""
    M = K.shape[0]
    mid = np.empty((M - 1, *K.shape[1:]), K.dtype)
    mid[1:-1] = (-K[:-3] + 9 * K[1:-2] + 9 * K[2:-1] - K[3:]) / 16
    mid[0] = (5 * K[0] + 15 * K[1] - 5 * K[2] + K[3]) / 16
    mid[-1] = (5 * K[-1] + 15 * K[-2] - 5 * K[-3] + K[-4]) / 16
    return mid


def _generator(G: np.ndarray, dG: np.ndarray, particle: str) -> np.ndarray:
    if particle == "fermion":
        return 0.5 * G @ dG
    sigma = symplectic_form(G.shape[-1] // 2)
    return 0.5 * G @ sigma @ dG @ sigma


def _project_unitary(V: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(V)
    return u @ vh


def _project_symplectic(V: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """``V Y^(-1/2)`` with ``Y = sigma^-1 V^dag sigma V``, expanded to second order around 1."""
    Y = -sigma @ _dag(V) @ sigma @ V
    E = Y - np.eye(V.shape[-1])
    return V @ (np.eye(V.shape[-1]) - 0.5 * E + 0.375 * E @ E)


def connect_states(path: FieldPath, path_tol: float = PATH_TOL, check: bool = True) -> MatrixField:
    """Operation ``V(k; 1)`` with ``Gamma(k; 1) = V Gamma(k; 0) V^dag``.

    Integrates ``dV/dlambda = K(lambda) V`` per ``k`` with fixed-step RK4 on
    the sample spacing, projecting back onto the unitary (fermion) or
    symplectic (boson) group after each step.  Samples must be equally
    spaced.
    """
    if path.role not in ("fermion-state", "boson-state"):
        raise ConfigError("connect_states needs a path of states")
    particle = path.start.particle
    lam = path.lambdas
    h = np.diff(lam)
    if not np.allclose(h, h[0], rtol=1e-9, atol=1e-12):
        raise ConfigError("connect_states needs equally spaced path samples")
    h = float(h[0])
    G = path.stack()
    K = _generator(G, _lambda_derivative(G, h), particle)
    Kmid = _midpoints(K)
    m = G.shape[-1]
    V = np.broadcast_to(np.eye(m, dtype=complex), G.shape[1:]).copy()
    sigma = symplectic_form(m // 2)
    for j in range(len(lam) - 1):
        k1 = K[j] @ V
        k2 = Kmid[j] @ (V + 0.5 * h * k1)
        k3 = Kmid[j] @ (V + 0.5 * h * k2)
        k4 = K[j + 1] @ (V + h * k3)
        V = V + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        V = _project_unitary(V) if particle == "fermion" else _project_symplectic(V, sigma)
    op = MatrixField(path.grid, V, f"{particle}-op")
    if check:
        res = reconstruction_residual(op, path)
        worst = int(np.argmax(res))
        if res[worst] > path_tol:
            k = path.grid.points[worst].tolist()
            raise ConvergenceError(f"endpoint reconstructed only to {res[worst]:.3g} (at k={k})",
                                   k=k, residual=float(res[worst]))
    return op


def reconstruction_residual(op: MatrixField, path: FieldPath) -> np.ndarray:
    """Per-k max-norm of ``V Gamma(0) V^dag - Gamma(1)``."""
    V = op.values
    diff = V @ path.start.values @ _dag(V) - path.end.values
    return np.abs(diff).max(axis=(-2, -1))


def convergence_order(build: Callable[[int], FieldPath], steps: Sequence[int] = (50, 100, 200)) -> float:
    """Observed order ``log2(|V_M - V_2M| / |V_2M - V_4M|)`` of :func:`connect_states`."""
    if len(steps) != 3 or steps[1] != 2 * steps[0] or steps[2] != 2 * steps[1]:
        raise ConfigError("steps must be (M, 2M, 4M)")
    ops = [connect_states(build(s), check=False).values for s in steps]
    e1 = np.abs(ops[0] - ops[1]).max()
    e2 = np.abs(ops[1] - ops[2]).max()
    if e2 == 0:
        return float("inf")
    return float(np.log2(e1 / e2))


# ---------------------------------------------------------------------------
# path validation


@dataclass
class PathReport:
    violations: list[float]
    symmetry_violations: list[float]
    decay_lengths: list[float]
    max_step: float
    failed: list[int]
    tol: float
    endpoint_invariants: tuple | None = None
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failed

    @property
    def invariant_jump(self) -> bool:
        if self.endpoint_invariants is None:
            return False
        a, b = self.endpoint_invariants
        return a != b

    def to_dict(self) -> dict:
        return {
            "passed": self.passed, "failed": self.failed, "tol": self.tol,
            "max_violation": max(self.violations), "max_symmetry_violation": max(self.symmetry_violations),
            "decay_lengths": self.decay_lengths, "max_step": self.max_step,
            "endpoint_invariants": list(self.endpoint_invariants) if self.endpoint_invariants else None,
            "invariant_jump": self.invariant_jump,
        }


def validate_path(path: FieldPath, symmetries: Sequence[SymmetryMatrix] | None = None,
                  tol: float = 1e-9, invariant: Callable[[MatrixField], float] | None = None,
                  locality: bool = True) -> PathReport:
    """Per-sample constraint and symmetry violations, decay lengths and a continuity proxy.

    ``invariant``, if given, is evaluated at both endpoints so that a path
    that silently crosses a phase transition can be detected.
    """
    viols, sviols, lengths, failed = [], [], [], []
    for i, f in enumerate(path.fields):
        rep = validate(f, tol)
        v = max(rep.violations.values())
        sv = max((c.violation for c in check_all(f, list(symmetries), tol)), default=0.0) if symmetries else 0.0
        viols.append(float(v))
        sviols.append(float(sv))
        if not rep.passed or sv >= tol:
            failed.append(i)
        if locality:
            est = decay_profile(f)
            lengths.append(0.0 if est.zero_range else float(est.length))
    G = path.stack()
    max_step = float(np.abs(np.diff(G, axis=0)).max()) if len(path) > 1 else 0.0
    ends = None
    if invariant is not None:
        ends = (invariant(path.start), invariant(path.end))
    return PathReport(viols, sviols, lengths, max_step, failed, tol, ends)
