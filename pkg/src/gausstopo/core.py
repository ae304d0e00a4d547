"""Translation-invariant Gaussian states and operations as matrix fields.

Conventions
-----------
Every single-particle index is a pair ``(S, s)`` with ``S = +/-`` the Majorana
(fermions) or quadrature (bosons) label and ``s = 0..n-1`` the internal mode.
Matrices are ``2n x 2n`` with the ``+`` block first, i.e. index
``S*n + s`` for ``S = 0 (+), 1 (-)``.  In this basis the symplectic form is
``sigma = i sigma_y (x) 1_n = [[0, 1], [-1, 0]] (x) 1_n``.

Real-space blocks are keyed by ``dr = r - r'`` and transformed as
``F(k) = sum_dr F_dr exp(-i k.dr)``.

A fermionic *hamiltonian* field stores the Hermitian Majorana matrix ``h(k)``
whose flattening ``sign(h(k))`` is ``i Gamma_f(k)`` of the ground state.
Real-space blocks of ``h`` are purely imaginary.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bz_grid import BZGrid, make_grid
from .errors import ConfigError, GapError

log = logging.getLogger(__name__)

PARTICLES = ("fermion", "boson")
KINDS = ("state", "operation", "hamiltonian")
ROLES = ("fermion-state", "boson-state", "fermion-op", "boson-op", "hamiltonian", "matrix")

DEFAULT_TOL = 1e-9
GAP_TOL = 1e-8


def symplectic_form(n: int) -> np.ndarray:
    """``sigma = i sigma_y (x) 1_n``; squares to ``-1``."""
    return np.kron(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.eye(n))


def role_for(particle: str, kind: str) -> str:
    if kind == "hamiltonian":
        return "hamiltonian"
    return f"{particle}-{'state' if kind == 'state' else 'op'}"


# ---------------------------------------------------------------------------
# real-space stencils


@dataclass
class RealSpaceCouplings:
    """Finite stencil ``{dr: block}`` of a translation-invariant object."""

    n: int
    particle: str
    kind: str
    dim: int
    terms: dict[tuple[int, ...], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.particle not in PARTICLES:
            raise ConfigError(f"particle must be one of {PARTICLES}, got {self.particle!r}")
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        m = 2 * self.n
        clean = {}
        for dr, block in self.terms.items():
            dr = tuple(int(x) for x in np.atleast_1d(dr))
            if len(dr) != self.dim:
                raise ConfigError(f"displacement {dr} has wrong dimension (dim={self.dim})")
            block = np.asarray(block, dtype=complex)
            if block.shape != (m, m):
                raise ConfigError(f"block at {dr} has shape {block.shape}, expected {(m, m)}")
            clean[dr] = clean.get(dr, 0) + block
        self.terms = clean

    @property
    def role(self) -> str:
        return role_for(self.particle, self.kind)

    @property
    def max_range(self) -> int:
        return max((max(abs(x) for x in dr) for dr in self.terms), default=0)

    def block(self, dr: Sequence[int]) -> np.ndarray:
        return self.terms.get(tuple(dr), np.zeros((2 * self.n, 2 * self.n), complex))

    def at(self, k: np.ndarray) -> np.ndarray:
        """Bloch matrices ``sum_dr B_dr e^{-i k.dr}`` at arbitrary momenta ``k`` of shape ``(P, dim)``."""
        k = np.atleast_2d(np.asarray(k, float))
        out = np.zeros((len(k), 2 * self.n, 2 * self.n), complex)
        for dr, b in self.terms.items():
            out += np.exp(-1j * (k @ np.asarray(dr, float)))[:, None, None] * b
        return out

    def pairing_violation(self) -> float:
        """Max deviation from the reality / Hermiticity pairing of the kind."""
        worst = 0.0
        for dr, b in self.terms.items():
            partner = self.block(tuple(-x for x in dr))
            if self.kind == "operation":
                worst = max(worst, np.abs(b.imag).max())
            elif self.particle == "fermion" and self.kind == "state":
                worst = max(worst, np.abs(b.imag).max(), np.abs(partner + b.T).max())
            elif self.particle == "fermion":
                worst = max(worst, np.abs(b.real).max(), np.abs(partner - b.conj().T).max())
            else:
                worst = max(worst, np.abs(b.imag).max(), np.abs(partner - b.T).max())
        return float(worst)

    def check(self, tol: float = 1e-10) -> "RealSpaceCouplings":
        v = self.pairing_violation()
        scale = max((np.abs(b).max() for b in self.terms.values()), default=1.0)
        if v > tol * max(scale, 1.0):
            raise ConfigError(
                f"{self.particle} {self.kind} stencil violates reality/Hermiticity pairing by {v:.3g}"
            )
        return self

    def scaled(self, factor: float) -> "RealSpaceCouplings":
        return RealSpaceCouplings(self.n, self.particle, self.kind, self.dim,
                                  {dr: factor * b for dr, b in self.terms.items()})

    def __add__(self, other: "RealSpaceCouplings") -> "RealSpaceCouplings":
        if (self.n, self.particle, self.kind, self.dim) != (other.n, other.particle, other.kind, other.dim):
            raise ConfigError("cannot add stencils of different type")
        terms = dict(self.terms)
        for dr, b in other.terms.items():
            terms[dr] = terms.get(dr, 0) + b
        return RealSpaceCouplings(self.n, self.particle, self.kind, self.dim, terms)


# ---------------------------------------------------------------------------
# matrix fields


@dataclass(frozen=True)
class MatrixField:
    """One square matrix per grid point, ``values.shape == (npoints, m, m)``."""

    grid: BZGrid
    values: np.ndarray
    role: str = "matrix"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 3 or vals.shape[0] != self.grid.npoints or vals.shape[1] != vals.shape[2]:
            raise ConfigError(f"field values of shape {vals.shape} do not fit grid {self.grid.sizes}")
        if not np.all(np.isfinite(vals)):
            raise ConfigError("field contains non-finite entries")
        if self.role not in ROLES:
            raise ConfigError(f"unknown role {self.role!r}")
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.values.shape[-1]

    @property
    def n(self) -> int:
        return self.size // 2

    @property
    def particle(self) -> str | None:
        if self.role.startswith("fermion") or self.role == "hamiltonian":
            return "fermion"
        if self.role.startswith("boson"):
            return "boson"
        return None

    def with_values(self, values: np.ndarray, role: str | None = None) -> "MatrixField":
        return MatrixField(self.grid, values, self.role if role is None else role)

    def dagger(self) -> "MatrixField":
        return self.with_values(np.conj(np.swapaxes(self.values, -1, -2)))

    def at_minus_k(self) -> np.ndarray:
        return self.values[self.grid.negation]

    def on_grid(self) -> np.ndarray:
        """Values reshaped to ``(*grid.sizes, m, m)``."""
        return self.values.reshape(*self.grid.sizes, self.size, self.size)

    def __matmul__(self, other: "MatrixField") -> "MatrixField":
        return self.with_values(self.values @ other.values, role="matrix")


def constant_field(grid: BZGrid, block: np.ndarray, role: str = "matrix") -> MatrixField:
    block = np.asarray(block, dtype=complex)
    return MatrixField(grid, np.broadcast_to(block, (grid.npoints, *block.shape)).copy(), role)


def fermion_vacuum(n: int) -> np.ndarray:
    """Covariance block of the Fock vacuum, ``-i sigma_y (x) 1_n``."""
    return -symplectic_form(n)


def vacuum_state(grid: BZGrid, n: int, particle: str = "fermion") -> MatrixField:
    if particle == "fermion":
        return constant_field(grid, fermion_vacuum(n), "fermion-state")
    return constant_field(grid, np.eye(2 * n), "boson-state")


def identity_op(grid: BZGrid, n: int, particle: str = "fermion") -> MatrixField:
    return constant_field(grid, np.eye(2 * n), f"{particle}-op")


def fourier(couplings: RealSpaceCouplings, grid: BZGrid) -> MatrixField:
    """``F(k) = sum_dr block(dr) exp(-i k.dr)`` on every grid point."""
    if grid.dim != couplings.dim:
        raise ConfigError(f"grid dim {grid.dim} does not match couplings dim {couplings.dim}")
    m = 2 * couplings.n
    vals = np.zeros((grid.npoints, m, m), complex)
    k = grid.points
    for dr, block in couplings.terms.items():
        phase = np.exp(-1j * (k @ np.asarray(dr, float)))
        vals += phase[:, None, None] * block
    return MatrixField(grid, vals, couplings.role)


def _particle_kind(role: str) -> tuple[str, str]:
    if role == "hamiltonian":
        return "fermion", "hamiltonian"
    if role == "matrix":
        return "fermion", "operation"
    particle, what = role.split("-")
    return particle, ("state" if what == "state" else "operation")


def _box(grid: BZGrid, max_range: int) -> Iterable[tuple[int, ...]]:
    ranges = [range(-max_range, max_range + 1)] * grid.dim
    return np.array(np.meshgrid(*ranges, indexing="ij")).reshape(grid.dim, -1).T


def inverse_fourier(field: MatrixField, max_range: int, drop_tol: float = 1e-14) -> RealSpaceCouplings:
    """Real-space blocks with ``|dr_mu| <= max_range`` recovered by FFT.

    Blocks whose magnitude is below ``drop_tol`` times the largest block are
    omitted, so a k-independent field returns a single ``dr = 0`` term.
    """
    if any(max_range > s // 2 for s in field.grid.sizes):
        raise ConfigError(f"max_range {max_range} exceeds half the grid {field.grid.sizes}")
    axes = tuple(range(field.grid.dim))
    real = np.fft.ifftn(field.on_grid(), axes=axes)
    scale = np.abs(real).max()
    terms = {}
    for dr in _box(field.grid, max_range):
        block = real[tuple(np.mod(dr, field.grid.sizes))]
        if np.abs(block).max() > drop_tol * scale:
            terms[tuple(int(x) for x in dr)] = block
    particle, kind = _particle_kind(field.role)
    return RealSpaceCouplings(field.n, particle, kind, field.grid.dim, terms)


def truncation_residual(field: MatrixField, max_range: int) -> float:
    """Max-norm error of ``fourier(inverse_fourier(field, max_range))``."""
    back = fourier(inverse_fourier(field, max_range, drop_tol=0.0), field.grid)
    return float(np.abs(back.values - field.values).max())


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    role: str
    violations: dict[str, float]
    tol: float = DEFAULT_TOL
    extras: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v < self.tol for v in self.violations.values())

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "passed": self.passed,
            "tol": self.tol,
            "violations": {k: float(v) for k, v in self.violations.items()},
            **({"extras": {k: float(v) for k, v in self.extras.items()}} if self.extras else {}),
        }


def _maxabs(a) -> float:
    return float(np.abs(a).max()) if np.size(a) else 0.0


def _reality(field: MatrixField) -> float:
    return _maxabs(np.conj(field.values) - field.at_minus_k())


def validate_fermion_state(field: MatrixField, tol: float = DEFAULT_TOL) -> ValidationReport:
    G = field.values
    eye = np.eye(field.size)
    return ValidationReport("fermion-state", {
        "anti_hermiticity": _maxabs(np.conj(np.swapaxes(G, -1, -2)) + G),
        "flatness": _maxabs(G @ G + eye),
        "reality": _reality(field),
    }, tol)


def validate_boson_state(field: MatrixField, tol: float = DEFAULT_TOL) -> ValidationReport:
    G = field.values
    sigma = symplectic_form(field.n)
    herm = _maxabs(np.conj(np.swapaxes(G, -1, -2)) - G)
    min_eig = float(np.linalg.eigvalsh(0.5 * (G + np.conj(np.swapaxes(G, -1, -2)))).min())
    return ValidationReport("boson-state", {
        "hermiticity": herm,
        "positivity": max(0.0, -min_eig) if min_eig <= 0 else 0.0,
        "symplectic_flatness": _maxabs(G @ sigma @ G - sigma),
        "reality": _reality(field),
    }, tol, {"min_eigenvalue": min_eig})


def validate_fermion_op(field: MatrixField, tol: float = DEFAULT_TOL) -> ValidationReport:
    V = field.values
    return ValidationReport("fermion-op", {
        "unitarity": _maxabs(V @ np.conj(np.swapaxes(V, -1, -2)) - np.eye(field.size)),
        "reality": _reality(field),
    }, tol)


def validate_boson_op(field: MatrixField, tol: float = DEFAULT_TOL) -> ValidationReport:
    V = field.values
    sigma = symplectic_form(field.n)
    return ValidationReport("boson-op", {
        "symplecticity": _maxabs(V @ sigma @ np.conj(np.swapaxes(V, -1, -2)) - sigma),
        "reality": _reality(field),
    }, tol)


def validate_hamiltonian(field: MatrixField, tol: float = DEFAULT_TOL) -> ValidationReport:
    h = field.values
    return ValidationReport("hamiltonian", {
        "hermiticity": _maxabs(np.conj(np.swapaxes(h, -1, -2)) - h),
        "particle_hole": _maxabs(np.conj(h) + field.at_minus_k()),
    }, tol)


_VALIDATORS = {
    "fermion-state": validate_fermion_state,
    "boson-state": validate_boson_state,
    "fermion-op": validate_fermion_op,
    "boson-op": validate_boson_op,
    "hamiltonian": validate_hamiltonian,
}


def validate(field: MatrixField, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Dispatch on the field's role."""
    try:
        return _VALIDATORS[field.role](field, tol)
    except KeyError:
        raise ConfigError(f"no validator for role {field.role!r}") from None


# ---------------------------------------------------------------------------
# constructions


def ground_state_covariance(hamiltonian: MatrixField, gap_tol: float = GAP_TOL) -> MatrixField:
    """Flatten ``h(k)`` into the covariance ``Gamma_f = -i sign(h(k))``.

    Occupied modes are the eigenvectors with negative eigenvalue, which become
    the ``-1`` eigenspace of ``i Gamma_f``.
    """
    h = hamiltonian.values
    h = 0.5 * (h + np.conj(np.swapaxes(h, -1, -2)))
    w, U = np.linalg.eigh(h)
    gap = np.abs(w).min(axis=-1)
    bad = int(np.argmin(gap))
    if gap[bad] < gap_tol:
        k = hamiltonian.grid.points[bad]
        raise GapError(f"spectrum of h(k) touches zero at k={k.tolist()} (|E|={gap[bad]:.3g})",
                       k=k.tolist(), value=float(gap[bad]))
    flat = (U * np.sign(w)[:, None, :]) @ np.conj(np.swapaxes(U, -1, -2))
    return MatrixField(hamiltonian.grid, -1j * flat, "fermion-state")


def flatten(field: MatrixField, gap_tol: float = GAP_TOL) -> MatrixField:
    """``sign`` of a Hermitian field, keeping its role."""
    out = ground_state_covariance(field.with_values(field.values, "hamiltonian"), gap_tol)
    return field.with_values(1j * out.values)


def apply_op(op: MatrixField, state: MatrixField) -> MatrixField:
    """``Gamma'(k) = V(k) Gamma(k) V(k)^dagger`` pointwise."""
    if op.grid != state.grid or op.size != state.size:
        raise ConfigError("operation and state live on different grids or mode counts")
    if op.particle != state.particle:
        raise ConfigError("operation and state are of different particle type")
    V = op.values
    return state.with_values(V @ state.values @ np.conj(np.swapaxes(V, -1, -2)))


def _majorana_permutation(na: int, nb: int) -> np.ndarray:
    return np.concatenate([
        np.arange(na), 2 * na + np.arange(nb),
        na + np.arange(na), 2 * na + nb + np.arange(nb),
    ])


def direct_sum_blocks(a: np.ndarray, b: np.ndarray, majorana: bool = True) -> np.ndarray:
    """Block-diagonal sum; with ``majorana`` the result keeps the (+, -) ordering."""
    a = np.asarray(a)
    b = np.asarray(b)
    lead = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    ma, mb = a.shape[-1], b.shape[-1]
    out = np.zeros((*lead, ma + mb, ma + mb), complex)
    out[..., :ma, :ma] = a
    out[..., ma:, ma:] = b
    if majorana:
        p = _majorana_permutation(ma // 2, mb // 2)
        out = out[..., p, :][..., :, p]
    return out


def direct_sum(a: MatrixField, b: MatrixField) -> MatrixField:
    if a.grid != b.grid:
        raise ConfigError("direct sum of fields on different grids")
    majorana = a.role != "matrix"
    return a.with_values(direct_sum_blocks(a.values, b.values, majorana))


def stack_with_ancilla(field: MatrixField, trivial_block: np.ndarray, tol: float = DEFAULT_TOL) -> MatrixField:
    """Append k-independent ancilla modes described by ``trivial_block``."""
    block = np.asarray(trivial_block, dtype=complex)
    anc = constant_field(field.grid, block, field.role)
    if field.role in _VALIDATORS and not validate(anc, tol).passed:
        raise ConfigError(f"ancilla block is not a valid {field.role}")
    return direct_sum(field, anc)


def stack_couplings(a: RealSpaceCouplings, b: RealSpaceCouplings) -> RealSpaceCouplings:
    if (a.particle, a.kind, a.dim) != (b.particle, b.kind, b.dim):
        raise ConfigError("cannot stack stencils of different type")
    zero_a = np.zeros((2 * a.n, 2 * a.n))
    zero_b = np.zeros((2 * b.n, 2 * b.n))
    terms = {}
    for dr in set(a.terms) | set(b.terms):
        terms[dr] = direct_sum_blocks(a.terms.get(dr, zero_a), b.terms.get(dr, zero_b))
    return RealSpaceCouplings(a.n + b.n, a.particle, a.kind, a.dim, terms)


# ---------------------------------------------------------------------------
# locality


@dataclass
class DecayEstimate:
    amplitude: float
    length: float
    residual: float
    zero_range: bool = False
    distances: list[float] = field(default_factory=list)
    magnitudes: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"amplitude": self.amplitude, "length": self.length,
                "residual": self.residual, "zero_range": self.zero_range}


def decay_profile(obj: RealSpaceCouplings | MatrixField, max_range: int | None = None,
                  floor: float = 1e-300) -> DecayEstimate:
    """Fit ``max|block(dr)| ~ amplitude * exp(-|dr| / length)`` over distance shells.

    Shells are grouped by Euclidean ``|dr|``; the ``dr = 0`` shell is excluded
    from the fit.  Exactly vanishing shells are clamped to ``floor`` so that
    strictly finite-range inputs produce a short ``length`` with a large
    residual rather than an undefined fit.
    """
    if isinstance(obj, MatrixField):
        if max_range is None:
            max_range = min(obj.grid.sizes) // 2
        obj = inverse_fourier(obj, max_range, drop_tol=0.0)
    shells: dict[float, float] = {}
    for dr, b in obj.terms.items():
        r = round(float(np.linalg.norm(dr)), 10)
        if max_range is not None and max(abs(x) for x in dr) > max_range:
            continue
        shells[r] = max(shells.get(r, 0.0), float(np.abs(b).max()))
    nonzero = [r for r, v in shells.items() if r > 0 and v > floor]
    if not nonzero:
        return DecayEstimate(shells.get(0.0, 0.0), 0.0, 0.0, zero_range=True)
    rs = np.array(sorted(r for r in shells if r > 0))
    mags = np.array([max(shells[r], floor) for r in rs])
    if len(rs) < 2:
        return DecayEstimate(float(mags[0]), float("nan"), float("nan"), False, rs.tolist(), mags.tolist())
    slope, icpt = np.polyfit(rs, np.log(mags), 1)
    resid = float(np.sqrt(np.mean((icpt + slope * rs - np.log(mags)) ** 2)))
    length = -1.0 / slope if slope < 0 else float("inf")
    return DecayEstimate(float(np.exp(icpt)), float(length), resid, False, rs.tolist(), mags.tolist())


__all__ = [
    "BZGrid", "make_grid", "RealSpaceCouplings", "MatrixField", "ValidationReport", "DecayEstimate",
    "symplectic_form", "fermion_vacuum", "vacuum_state", "identity_op", "constant_field",
    "fourier", "inverse_fourier", "truncation_residual",
    "validate", "validate_fermion_state", "validate_boson_state", "validate_fermion_op",
    "validate_boson_op", "validate_hamiltonian",
    "ground_state_covariance", "flatten", "apply_op", "direct_sum", "direct_sum_blocks",
    "stack_with_ancilla", "stack_couplings", "decay_profile",
]
