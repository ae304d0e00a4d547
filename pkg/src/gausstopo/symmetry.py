"""Physical symmetries, Altland-Zirnbauer classes and canonical reduced forms.

Index layout.  A fermionic Majorana vector is ordered as
``(S, spin, pseudospin, rest)`` where only the factors required by the class
are present: spin-1/2 classes split ``n = 2 * n_tilde`` as ``spin (x) rest``,
and class CII further splits ``n_tilde = 2 * (n_tilde / 2)`` as
``pseudospin (x) rest``.

Reduced forms.  Each class admits a canonical parameterisation of
``i Gamma_f(k)`` (states) and ``V_f(k)`` (operations) by a smaller matrix field:
a flat Hermitian ``h`` (A, AI, AII, C, D), a unitary ``q`` (AIII, BDI, CII,
DIII, CI), a unitary ``u`` (A, AI, AII, C, D, DIII, CI ops) or a pair
``(u1, u2)`` (AIII, BDI, CII ops).  :func:`reconstruct` builds the full matrix
from the reduced one and :func:`extract_reduced` inverts it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .core import DEFAULT_TOL, MatrixField, symplectic_form
from .errors import ConfigError, SymmetryError

S0 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
ISY = np.array([[0.0, 1.0], [-1.0, 0.0]])
PAULI = (S0, SX, SY, SZ)

P_MINUS = (S0 - SY) / 2
P_PLUS = (S0 + SY) / 2
V_MINUS = np.array([1.0, -1j]) / np.sqrt(2)  # sigma_y eigenvector, eigenvalue -1


def kron(*mats) -> np.ndarray:
    out = np.eye(1)
    for m in mats:
        out = np.kron(out, m)
    return out


def _dag(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def _T(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2)


class AZClass(str, enum.Enum):
    A = "A"
    AIII = "AIII"
    AI = "AI"
    BDI = "BDI"
    D = "D"
    DIII = "DIII"
    AII = "AII"
    CII = "CII"
    C = "C"
    CI = "CI"

    @property
    def order(self) -> int:
        return list(AZClass).index(self)

    def __str__(self) -> str:
        return self.value


CHIRAL = (AZClass.AIII, AZClass.BDI, AZClass.CII)
WIGNER_DYSON = (AZClass.A, AZClass.AI, AZClass.AII)
BDG = (AZClass.D, AZClass.DIII, AZClass.C, AZClass.CI)

TRS_VALUES = ("none", "plus", "minus")
SU2_VALUES = ("none", "z", "full", "other")

# (trs, u1, su2) -> class; one row per class
_TABLE = {
    ("none", True, "none"): AZClass.A,
    ("minus", False, "z"): AZClass.AIII,
    ("plus", True, "none"): AZClass.AI,
    ("plus", False, "none"): AZClass.BDI,
    ("none", False, "none"): AZClass.D,
    ("minus", False, "none"): AZClass.DIII,
    ("minus", True, "none"): AZClass.AII,
    ("minus", False, "other"): AZClass.CII,
    ("none", False, "full"): AZClass.C,
    ("minus", False, "full"): AZClass.CI,
}
_INVERSE = {c: k for k, c in _TABLE.items()}

# emergent (TRS, PHS, SLS) of i Gamma_f for each class
EMERGENT = {
    AZClass.A: (0, 0, 0), AZClass.AIII: (0, 0, 1), AZClass.AI: (1, 0, 0),
    AZClass.BDI: (1, 1, 1), AZClass.D: (0, 1, 0), AZClass.DIII: (-1, 1, 1),
    AZClass.AII: (-1, 0, 0), AZClass.CII: (-1, -1, 1), AZClass.C: (0, -1, 0),
    AZClass.CI: (1, -1, 1),
}


@dataclass(frozen=True)
class SymmetrySpec:
    trs: str = "none"
    u1: bool = False
    su2: str = "none"

    def __post_init__(self):
        if self.trs not in TRS_VALUES:
            raise ConfigError(f"trs must be one of {TRS_VALUES}, got {self.trs!r}")
        if self.su2 not in SU2_VALUES:
            raise ConfigError(f"su2 must be one of {SU2_VALUES}, got {self.su2!r}")
        object.__setattr__(self, "u1", bool(self.u1))
        if self.key not in _TABLE:
            raise ConfigError(f"symmetry combination {self.key} does not correspond to an AZ class")

    @property
    def key(self) -> tuple[str, bool, str]:
        return (self.trs, self.u1, self.su2)

    @classmethod
    def from_dict(cls, d: dict) -> "SymmetrySpec":
        extra = set(d) - {"trs", "u1", "su2"}
        if extra:
            raise ConfigError(f"unknown symmetry keys {sorted(extra)}")
        return cls(d.get("trs", "none"), bool(d.get("u1", False)), d.get("su2", "none"))

    @classmethod
    def for_class(cls, az: AZClass | str) -> "SymmetrySpec":
        return cls(*_INVERSE[AZClass(az)])

    def to_dict(self) -> dict:
        return {"trs": self.trs, "u1": self.u1, "su2": self.su2}


def az_class(spec: SymmetrySpec | dict) -> AZClass:
    if isinstance(spec, dict):
        spec = SymmetrySpec.from_dict(spec)
    return _TABLE[spec.key]


def mode_multiple(az: AZClass | str) -> int:
    """Smallest unit of ``n`` compatible with the class's index structure."""
    az = AZClass(az)
    if az == AZClass.CII:
        return 4
    if az in (AZClass.AIII, AZClass.DIII, AZClass.AII, AZClass.C, AZClass.CI):
        return 2
    return 1


@dataclass(frozen=True)
class SymmetryMatrix:
    label: str
    matrix: np.ndarray
    antiunitary: bool

    @property
    def square_sign(self) -> int:
        sq = self.matrix @ self.matrix
        return 1 if np.allclose(sq, np.eye(len(sq))) else -1


def symmetry_matrices(spec: SymmetrySpec, n: int) -> list[SymmetryMatrix]:
    """Real orthogonal Majorana-space matrices of the physical symmetries."""
    az = az_class(spec)
    if n % mode_multiple(az):
        raise ConfigError(f"class {az} needs n divisible by {mode_multiple(az)}, got n={n}")
    out = []
    if spec.u1:
        out.append(SymmetryMatrix("Phi", kron(ISY, np.eye(n)), False))
    if spec.su2 in ("z", "full"):
        nt = n // 2
        if spec.su2 == "full":
            out.append(SymmetryMatrix("R_x", kron(ISY, SX.real, np.eye(nt)), False))
        out.append(SymmetryMatrix("R_z", kron(ISY, SZ.real, np.eye(nt)), False))
    elif spec.su2 == "other":
        q = n // 4
        out.append(SymmetryMatrix("R_x", kron(ISY, np.eye(2), SX.real, np.eye(q)), False))
        out.append(SymmetryMatrix("R_z", kron(ISY, np.eye(2), SZ.real, np.eye(q)), False))
    if spec.trs == "plus":
        out.append(SymmetryMatrix("Theta_spinless", kron(SZ.real, np.eye(n)), True))
    elif spec.trs == "minus":
        out.append(SymmetryMatrix("Theta_spinhalf", kron(SZ.real, ISY, np.eye(n // 2)), True))
    return out


def class_symmetries(az: AZClass | str, n: int) -> list[SymmetryMatrix]:
    return symmetry_matrices(SymmetrySpec.for_class(az), n)


# ---------------------------------------------------------------------------
# checks


@dataclass
class SymmetryCheck:
    label: str
    passed: bool
    violation: float

    def to_dict(self) -> dict:
        return {"label": self.label, "passed": self.passed, "violation": self.violation}


def check_state_symmetry(state: MatrixField, sym: SymmetryMatrix, tol: float = DEFAULT_TOL) -> SymmetryCheck:
    """``V Gamma V^T = +Gamma`` (unitary or boson) or ``-Gamma`` (fermion, antiunitary)."""
    V = sym.matrix
    sign = -1.0 if (sym.antiunitary and state.particle == "fermion") else 1.0
    viol = float(np.abs(V @ state.values @ V.T - sign * state.values).max())
    return SymmetryCheck(sym.label, viol < tol, viol)


def check_op_symmetry(op: MatrixField, sym: SymmetryMatrix, tol: float = DEFAULT_TOL) -> SymmetryCheck:
    """``[V(k), V_s] = 0`` pointwise."""
    V = sym.matrix
    viol = float(np.abs(op.values @ V - V @ op.values).max())
    return SymmetryCheck(sym.label, viol < tol, viol)


def check_all(field: MatrixField, syms: list[SymmetryMatrix], tol: float = DEFAULT_TOL) -> list[SymmetryCheck]:
    check = check_op_symmetry if field.role.endswith("op") else check_state_symmetry
    return [check(field, s, tol) for s in syms]


def check_emergent(state: MatrixField, tol: float = DEFAULT_TOL) -> dict:
    """Emergent Hamiltonian-formalism symmetries of ``i Gamma_f(k)``.

    Reports the particle-hole relation forced by reality, and for every
    physical symmetry that holds the corresponding emergent relation.
    """
    H = 1j * state.values
    Hm = H[state.grid.negation]
    n = state.n
    report = {"phs": float(np.abs(np.conj(H) + Hm).max())}
    theta_l = kron(SZ.real, np.eye(n))
    report["sls_spinless"] = float(np.abs(theta_l @ H + H @ theta_l).max())
    report["trs_spinless"] = float(np.abs(theta_l @ np.conj(H) @ theta_l.T - Hm).max())
    if n % 2 == 0:
        theta_h = kron(SZ.real, ISY, np.eye(n // 2))
        report["sls_spinhalf"] = float(np.abs(theta_h @ H + H @ theta_h).max())
        report["trs_spinhalf"] = float(np.abs(theta_h @ np.conj(H) @ theta_h.T - Hm).max())
        rz = kron(SY, SZ, np.eye(n // 2))
        rx = kron(SY, SX, np.eye(n // 2))
        report["su2_z"] = float(np.abs(rz @ H - H @ rz).max())
        report["su2_x"] = float(np.abs(rx @ H - H @ rx).max())
    phi = kron(ISY, np.eye(n))
    report["u1"] = float(np.abs(phi @ state.values - state.values @ phi).max())
    holds = {k: v < tol for k, v in report.items()}
    return {"violations": report, "holds": holds}


def infer_class(state: MatrixField, n_other: bool = False, tol: float = 1e-8) -> AZClass:
    """Largest AZ class whose physical symmetries the state satisfies."""
    best = AZClass.D
    best_count = 0
    for az in AZClass:
        if az == AZClass.CII and not n_other:
            continue
        if state.n % mode_multiple(az):
            continue
        syms = class_symmetries(az, state.n)
        if all(c.passed for c in check_all(state, syms, tol)) and len(syms) > best_count:
            best, best_count = az, len(syms)
    return best


# ---------------------------------------------------------------------------
# canonical-form helpers


@lru_cache(maxsize=None)
def swap_matrix(nt: int) -> np.ndarray:
    """Permutation exchanging the Majorana and spin factors, ``(sum_mu s_mu (x) s_mu)/2 (x) 1``."""
    return kron(sum(np.kron(p, p) for p in PAULI).real / 2, np.eye(nt))


def _embed_minus(m: int) -> np.ndarray:
    """Isometry ``v_- (x) 1_m`` onto the ``sigma_y = -1`` subspace of a 2m space."""
    return np.kron(V_MINUS[:, None], np.eye(m))


def _z_twist(n: int, inner: np.ndarray) -> np.ndarray:
    """``diag(1_n, inner)``."""
    return scipy.linalg.block_diag(np.eye(n), inner)


def _kron_field(small: np.ndarray, field: np.ndarray) -> np.ndarray:
    return np.einsum("ij,kab->kiajb", small, field).reshape(
        field.shape[0], small.shape[0] * field.shape[1], small.shape[1] * field.shape[2])


def _pm_form(a: np.ndarray, amc: np.ndarray, sign: float) -> np.ndarray:
    return _kron_field(P_MINUS, a) + sign * _kron_field(P_PLUS, amc)


@dataclass
class ReducedField:
    """Reduced matrix field; ``values`` has a leading axis of length 2 for u-pairs."""

    kind: str
    values: np.ndarray
    az: AZClass
    grid: object

    def part(self, i: int = 0) -> MatrixField:
        vals = self.values[i] if self.kind == "u-pair" else self.values
        return MatrixField(self.grid, vals, "matrix")

    @property
    def size(self) -> int:
        return self.values.shape[-1]


STATE_KIND = {
    AZClass.A: "h", AZClass.AI: "h", AZClass.AII: "h", AZClass.D: "h", AZClass.C: "h",
    AZClass.BDI: "q", AZClass.AIII: "q", AZClass.CII: "q", AZClass.DIII: "q", AZClass.CI: "q",
}
OP_KIND = {
    AZClass.A: "u", AZClass.AI: "u", AZClass.AII: "u", AZClass.D: "u", AZClass.C: "u",
    AZClass.DIII: "u", AZClass.CI: "u",
    AZClass.BDI: "u-pair", AZClass.AIII: "u-pair", AZClass.CII: "u-pair",
}


def _neg(grid, a: np.ndarray) -> np.ndarray:
    return a[grid.negation]


# --- states ------------------------------------------------------------------


def _state_from_h_u1(h, hmc):
    return _pm_form(h, hmc, -1.0)


def _c_twist(n: int, cii: bool) -> np.ndarray:
    if cii:
        return _z_twist(n, kron(S0, SZ, np.eye(n // 4)))
    return _z_twist(n, kron(SZ, np.eye(n // 2)))


def _h_from_q_ci(q: np.ndarray) -> np.ndarray:
    qd = _dag(q)
    return 0.5 * np.block([[q + qd, 1j * (q - qd)], [1j * (q - qd), -q - qd]])


def _h_from_q_cii(q: np.ndarray) -> np.ndarray:
    m = q.shape[-1]
    sy = kron(SY, np.eye(m // 2))
    qd = _dag(q)
    return 0.5 * np.block([
        [1j * (q - qd), -(q + qd) @ sy],
        [-sy @ (q + qd), -1j * sy @ (q - qd) @ sy],
    ])


def _diii_state(q: np.ndarray) -> np.ndarray:
    m = q.shape[-1]
    sz = kron(SZ, np.eye(m // 2))
    qd = _dag(q)
    inner = 0.5 * np.block([
        [1j * (q - qd), (q + qd) @ sz],
        [sz @ (q + qd), -1j * sz @ (q - qd) @ sz],
    ])
    S = swap_matrix(m // 2)
    return S @ inner @ S


def reconstruct_state(reduced: ReducedField) -> MatrixField:
    """Covariance field ``Gamma_f(k)`` from its reduced form."""
    az, g, r = reduced.az, reduced.grid, reduced.values
    if az == AZClass.D:
        iG = r
    elif az in WIGNER_DYSON:
        iG = _state_from_h_u1(r, np.conj(_neg(g, r)))
    elif az == AZClass.BDI:
        z = np.zeros_like(r)
        iG = np.block([[z, r], [_dag(r), z]])
    elif az in (AZClass.C, AZClass.CI, AZClass.CII):
        h = r
        if az == AZClass.CI:
            h = _h_from_q_ci(r)
        elif az == AZClass.CII:
            h = _h_from_q_cii(r)
        Z = _c_twist(h.shape[-1], az == AZClass.CII)
        iG = Z @ _state_from_h_u1(h, np.conj(_neg(g, h))) @ Z
    elif az == AZClass.DIII:
        iG = _diii_state(r)
    elif az == AZClass.AIII:
        q = _pm_form(r, _T(_neg(g, r)), -1.0)
        iG = _diii_state(q)
    else:  # pragma: no cover
        raise ConfigError(f"unknown class {az}")
    return MatrixField(g, -1j * iG, "fermion-state")


def _q_from_diii(iG: np.ndarray) -> np.ndarray:
    n = iG.shape[-1] // 2
    S = swap_matrix(n // 2)
    M = S @ iG @ S
    sz = kron(SZ, np.eye(n // 2))
    return M[:, :n, n:] @ sz - 1j * M[:, :n, :n]


def extract_state(state: MatrixField, az: AZClass | str) -> np.ndarray:
    az = AZClass(az)
    iG = 1j * state.values
    n = state.n
    if az == AZClass.D:
        return iG
    if az in WIGNER_DYSON:
        E = _embed_minus(n)
        return _dag(E) @ iG @ E
    if az == AZClass.BDI:
        return iG[:, :n, n:]
    if az in (AZClass.C, AZClass.CI, AZClass.CII):
        Z = _c_twist(n, az == AZClass.CII)
        E = _embed_minus(n)
        h = _dag(E) @ (Z @ iG @ Z) @ E
        if az == AZClass.C:
            return h
        m = n // 2
        h11, h12 = h[:, :m, :m], h[:, :m, m:]
        if az == AZClass.CI:
            return h11 - 1j * h12
        sy = kron(SY, np.eye(m // 2))
        return -h12 @ sy - 1j * h11
    q = _q_from_diii(iG)
    if az == AZClass.DIII:
        return q
    E = _embed_minus(n // 2)
    return _dag(E) @ q @ E


# --- operations ----------------------------------------------------------------


def _rank1_vector(P: np.ndarray) -> np.ndarray:
    w, U = np.linalg.eigh(P)
    return U[:, -1]


def _aiii_terms():
    A = np.kron(SY, SZ)
    B = np.kron(SZ, SY)
    C = np.kron(SX, SX)
    I = np.eye(4)
    return ((I + A + B + C) / 4, (I - A - B + C) / 4, (I - A + B - C) / 4, (I + A - B - C) / 4)


def _u_form(u, umc, Z=None):
    V = _pm_form(u, umc, 1.0)
    if Z is not None:
        V = Z @ V @ Z
    return V


def _u_from_pair_cii(u1, u2):
    m = u1.shape[-1]
    sy = kron(SY, np.eye(m // 2))
    s, d = u1 + u2, u1 - u2
    return 0.5 * np.block([[s, 1j * d @ sy], [-1j * sy @ d, sy @ s @ sy]])


def reconstruct_op(reduced: ReducedField) -> MatrixField:
    """Representation field ``V_f(k)`` from its reduced form."""
    az, g, r = reduced.az, reduced.grid, reduced.values
    if az == AZClass.D:
        V = r
    elif az in WIGNER_DYSON:
        V = _u_form(r, np.conj(_neg(g, r)))
    elif az == AZClass.BDI:
        z = np.zeros_like(r[0])
        V = np.block([[r[0], z], [z, r[1]]])
    elif az == AZClass.C:
        V = _u_form(r, np.conj(_neg(g, r)), _c_twist(r.shape[-1], False))
    elif az == AZClass.CII:
        u = _u_from_pair_cii(_dag(r[0]), _dag(r[1]))
        V = _u_form(u, np.conj(_neg(g, u)), _c_twist(u.shape[-1], True))
    elif az == AZClass.DIII:
        m = r.shape[-1]
        S = swap_matrix(m // 2)
        V = S @ _u_form(r, np.conj(_neg(g, r)), _c_twist(m, False)) @ S
    elif az == AZClass.CI:
        B = np.kron(SZ, SY)
        Pm, Pp = (np.eye(4) - B) / 2, (np.eye(4) + B) / 2
        w = np.conj(_neg(g, r))
        V = _kron_field(Pm, w) + _kron_field(Pp, r)
    elif az == AZClass.AIII:
        t1, t2, t3, t4 = _aiii_terms()
        u1, u2 = _dag(r[1]), _dag(r[0])
        V = (_kron_field(t1, u1) + _kron_field(t2, np.conj(_neg(g, u1)))
             + _kron_field(t3, u2) + _kron_field(t4, np.conj(_neg(g, u2))))
    else:  # pragma: no cover
        raise ConfigError(f"unknown class {az}")
    return MatrixField(g, V, "fermion-op")


def extract_op(op: MatrixField, az: AZClass | str) -> np.ndarray:
    az = AZClass(az)
    V = op.values
    n = op.n
    if az == AZClass.D:
        return V
    if az in WIGNER_DYSON:
        E = _embed_minus(n)
        return _dag(E) @ V @ E
    if az == AZClass.BDI:
        return np.stack([V[:, :n, :n], V[:, n:, n:]])
    if az in (AZClass.C, AZClass.CII):
        Z = _c_twist(n, az == AZClass.CII)
        E = _embed_minus(n)
        u = _dag(E) @ (Z @ V @ Z) @ E
        if az == AZClass.C:
            return u
        m = n // 2
        sy = kron(SY, np.eye(m // 2))
        u11, u12 = u[:, :m, :m], u[:, :m, m:]
        return _dag(np.stack([u11 - 1j * u12 @ sy, u11 + 1j * u12 @ sy]))
    if az == AZClass.DIII:
        S = swap_matrix(n // 2)
        Z = _c_twist(n, False)
        E = _embed_minus(n)
        return _dag(E) @ (Z @ S @ V @ S @ Z) @ E
    nt = n // 2
    if az == AZClass.CI:
        e = _rank1_vector((np.eye(4) - np.kron(SZ, SY)) / 2)
        E = np.kron(e[:, None], np.eye(nt))
        return np.conj(_neg(op.grid, _dag(E) @ V @ E))
    t1, _, t3, _ = _aiii_terms()
    E1 = np.kron(_rank1_vector(t1)[:, None], np.eye(nt))
    E2 = np.kron(_rank1_vector(t3)[:, None], np.eye(nt))
    return _dag(np.stack([_dag(E2) @ V @ E2, _dag(E1) @ V @ E1]))


def extract_reduced(field: MatrixField, az: AZClass | str, check: bool = True,
                    tol: float = 1e-8) -> ReducedField:
    """Canonical reduced field of a fermionic state or operation in class ``az``.

    Raises :class:`SymmetryError` if ``check`` and the physical symmetries of
    the class are violated beyond ``tol``.
    """
    az = AZClass(az)
    if field.n % mode_multiple(az):
        raise ConfigError(f"class {az} needs n divisible by {mode_multiple(az)}")
    is_op = field.role.endswith("op")
    if field.particle != "fermion":
        raise ConfigError("reduced forms are defined for fermionic fields")
    if check:
        bad = [c for c in check_all(field, class_symmetries(az, field.n), tol) if not c.passed]
        if bad:
            names = ", ".join(f"{c.label} ({c.violation:.2g})" for c in bad)
            raise SymmetryError(f"field violates class {az} symmetries: {names}")
    if is_op:
        return ReducedField(OP_KIND[az], extract_op(field, az), az, field.grid)
    return ReducedField(STATE_KIND[az], extract_state(field, az), az, field.grid)


def reconstruct(reduced: ReducedField, is_op: bool | None = None) -> MatrixField:
    if is_op is None:
        is_op = reduced.kind.startswith("u")
    return reconstruct_op(reduced) if is_op else reconstruct_state(reduced)


def reduced(values: np.ndarray, az: AZClass | str, grid, kind: str | None = None) -> ReducedField:
    """Wrap raw reduced values (convenience constructor)."""
    az = AZClass(az)
    if kind is None:
        kind = STATE_KIND[az]
    return ReducedField(kind, np.asarray(values, dtype=complex), az, grid)


# ---------------------------------------------------------------------------
# Hermitianization and polar decomposition


def hermitianize(op: MatrixField) -> MatrixField:
    """``X(k) = sigma_+ (x) V(k) + sigma_- (x) V(k)^dagger``."""
    V = op.values
    z = np.zeros_like(V)
    X = np.block([[z, V], [_dag(V), z]])
    return MatrixField(op.grid, X, "matrix")


def hermitianize_report(X: MatrixField) -> dict:
    vals = X.values
    m = X.size
    sz = kron(SZ, np.eye(m // 2))
    Xm = vals[X.grid.negation]
    return {
        "hermiticity": float(np.abs(vals - _dag(vals)).max()),
        "involution": float(np.abs(vals @ vals - np.eye(m)).max()),
        "reality": float(np.abs(np.conj(vals) - Xm).max()),
        "phs": float(np.abs(sz @ np.conj(vals) @ sz + Xm).max()),
    }


def polar_unitarize(op: MatrixField) -> tuple[MatrixField, MatrixField]:
    """Pointwise polar decomposition ``V = W P`` of a bosonic operation field."""
    V = op.values
    U, s, Wh = np.linalg.svd(V)
    if s.min() < 1e-300:
        raise SymmetryError("singular representation matrix")
    W = U @ Wh
    P = _dag(Wh) @ (s[..., :, None] * Wh)
    P = 0.5 * (P + _dag(P))
    return op.with_values(W), op.with_values(P)


def polar_report(op: MatrixField, W: MatrixField, P: MatrixField) -> dict:
    sigma = symplectic_form(op.n)
    w, p = W.values, P.values
    eye = np.eye(op.size)
    return {
        "unitarity": float(np.abs(_dag(w) @ w - eye).max()),
        "w_symplectic": float(np.abs(w @ sigma @ _dag(w) - sigma).max()),
        "w_commutes_sigma": float(np.abs(w @ sigma - sigma @ w).max()),
        "p_min_eigenvalue": float(np.linalg.eigvalsh(p).min()),
        "p_symplectic": float(np.abs(p @ sigma @ p - sigma).max()),
        "factorization": float(np.abs(w @ p - op.values).max()),
    }


def boson_op_u(W: MatrixField) -> np.ndarray:
    """Reduced unitary ``u(k)`` of a unitary symplectic boson operation."""
    E = _embed_minus(W.n)
    return _dag(E) @ W.values @ E


def boson_op_from_u(grid, u: np.ndarray) -> MatrixField:
    return MatrixField(grid, _u_form(u, np.conj(u[grid.negation])), "boson-op")
