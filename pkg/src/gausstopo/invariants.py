"""Topological invariants of matrix fields for ``d <= 3``.

Sign conventions
----------------
* Winding numbers count the phase of ``det q`` counterclockwise, so
  ``q(k) = exp(i k)`` has winding ``+1``; in three dimensions
  ``w = 1/(24 pi^2) int eps^{abc} Tr[(q^dag d_a q)(q^dag d_b q)(q^dag d_c q)]``.
* Chern numbers use occupied (eigenvalue ``< 0``) bands and
  ``Ch = (1/2 pi) int d(i <psi|d psi>)``.
* ``Z2`` results are reported as ``+1`` (trivial) or ``-1`` (nontrivial).
"""

from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bz_grid import BZGrid
from .core import GAP_TOL, MatrixField, fermion_vacuum
from .errors import ConfigError, DegenerateError, GapError, SymmetryError
from .symmetry import (AZClass, ISY, SY, SZ, _dag, _embed_minus, extract_state, kron)

log = logging.getLogger(__name__)

ROUND_TOL = 1e-2


class NonQuantizedWarning(UserWarning):
    """Raw invariant lies farther than ``round_tol`` from the nearest allowed value."""


@dataclass
class InvariantResult:
    name: str
    raw: float
    value: int
    quantization_gap: float
    grid: tuple[int, ...]
    group: str = "Z"
    quantized: bool = True
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name, "raw": float(self.raw), "value": int(self.value),
            "gap": float(self.quantization_gap), "group": self.group,
            "quantized": self.quantized, "grid": list(self.grid),
            **({"diagnostics": self.diagnostics} if self.diagnostics else {}),
        }

    @property
    def nontrivial(self) -> bool:
        return self.value == -1 if self.group == "Z2" else self.value != 0


def _integer_result(name, raw, grid, round_tol=ROUND_TOL, **diag) -> InvariantResult:
    value = int(np.rint(raw))
    gap = abs(raw - value)
    ok = gap <= round_tol
    if not ok:
        warnings.warn(f"{name}: raw value {raw:.4f} is not quantized (gap {gap:.3g})", NonQuantizedWarning)
    return InvariantResult(name, float(raw), value, float(gap), tuple(grid.sizes), "Z", ok, dict(diag))


def _z2_from_half(name, raw, grid, round_tol=0.1, **diag) -> InvariantResult:
    """Map a raw value near 0 (mod 1) or 1/2 (mod 1) to +1 / -1."""
    frac = raw % 1.0
    d0 = min(frac, 1 - frac)
    dh = abs(frac - 0.5)
    value = 1 if d0 <= dh else -1
    gap = min(d0, dh)
    ok = gap <= round_tol
    if not ok:
        warnings.warn(f"{name}: raw value {raw:.4f} is far from 0 and 1/2", NonQuantizedWarning)
    return InvariantResult(name, float(raw), value, float(gap), tuple(grid.sizes), "Z2", ok, dict(diag))


# ---------------------------------------------------------------------------
# Pfaffian


def _householder(x: np.ndarray):
    """Reflection ``1 - 2 v v^dag`` mapping ``x`` onto ``alpha e_1``; returns ``(v, alpha, reflected)``."""
    sigma = np.vdot(x[1:], x[1:]).real
    if sigma == 0:
        return None, x[0], False
    norm = np.sqrt(abs(x[0]) ** 2 + sigma)
    phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
    v = x.copy()
    v[0] += phase * norm
    v /= np.linalg.norm(v)
    return v, -phase * norm, True


def pfaffian(A: np.ndarray, tol: float = 1e-10) -> complex | float:
    """Pfaffian by Householder skew-tridiagonalisation.

    Works for real or complex antisymmetric matrices; returns a float for real
    input.
    """
    A = np.array(A, dtype=complex if np.iscomplexobj(A) else float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape != (n, n):
        raise ConfigError("pfaffian needs a square matrix")
    scale = max(1.0, np.abs(A).max())
    if np.abs(A + A.T).max() > tol * scale:
        raise ConfigError("pfaffian input is not antisymmetric")
    if n % 2:
        return 0.0
    if n == 0:
        return 1.0
    pf = 1.0
    for i in range(n - 2):
        v, alpha, reflected = _householder(A[i + 1:, i])
        if reflected:
            A[i + 1, i], A[i, i + 1] = alpha, -alpha
            A[i + 2:, i] = 0
            A[i, i + 2:] = 0
            w = 2 * A[i + 1:, i + 1:] @ np.conj(v)
            A[i + 1:, i + 1:] += np.outer(v, w) - np.outer(w, v)
            pf = -pf  # det of a reflection
        if i % 2 == 0:
            pf = pf * -A[i + 1, i]
    return pf * A[n - 2, n - 1]


def pfaffian_bruteforce(A: np.ndarray):
    """Recursive expansion along the first row (small matrices only)."""
    A = np.asarray(A)
    n = A.shape[0]
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0
    total = 0.0
    for j in range(1, n):
        keep = [i for i in range(n) if i not in (0, j)]
        total += (-1) ** (j + 1) * A[0, j] * pfaffian_bruteforce(A[np.ix_(keep, keep)])
    return total


# ---------------------------------------------------------------------------
# helpers


def _as_hermitian(field: MatrixField) -> np.ndarray:
    """Hermitian matrix whose negative eigenspace is the occupied band space."""
    if field.role == "fermion-state":
        return 1j * field.values
    return field.values


def occupied_frames(H: np.ndarray, gap_tol: float = GAP_TOL, grid: BZGrid | None = None,
                    n_occ: int | None = None) -> np.ndarray:
    w, U = np.linalg.eigh(0.5 * (H + _dag(H)))
    gap = np.abs(w).min(axis=-1)
    bad = int(np.argmin(gap))
    if gap[bad] < gap_tol:
        k = grid.points[bad].tolist() if grid is not None else bad
        raise GapError(f"spectrum touches zero at k={k}", k=k, value=float(gap[bad]))
    counts = (w < 0).sum(axis=-1)
    if counts.min() != counts.max():
        raise GapError("number of occupied bands varies across the Brillouin zone")
    m = int(counts[0]) if n_occ is None else n_occ
    return U[..., :m]


def _link(psi: np.ndarray, shift: np.ndarray) -> np.ndarray:
    """``det(psi(k)^dag psi(k + e))`` for every grid point."""
    M = _dag(psi) @ psi[shift]
    return np.linalg.det(M)


def spectral_derivative(values: np.ndarray, grid: BZGrid, axis: int) -> np.ndarray:
    """Exact derivative of the trigonometric interpolant along ``axis`` (Nyquist mode dropped)."""
    shaped = values.reshape(*grid.sizes, *values.shape[1:])
    N = grid.sizes[axis]
    coef = np.fft.fft(shaped, axis=axis)
    freq = np.fft.fftfreq(N, d=1.0 / N)
    freq[N // 2] = 0.0
    shape = [1] * shaped.ndim
    shape[axis] = N
    out = np.fft.ifft(coef * (1j * freq).reshape(shape), axis=axis)
    return out.reshape(values.shape)


def central_derivative(values: np.ndarray, grid: BZGrid, axis: int) -> np.ndarray:
    """Fourth-order central difference on the periodic grid."""
    h = 2 * np.pi / grid.sizes[axis]
    p1, m1 = grid.shift(axis, 1), grid.shift(axis, -1)
    p2, m2 = grid.shift(axis, 2), grid.shift(axis, -2)
    return (8 * (values[p1] - values[m1]) - (values[p2] - values[m2])) / (12 * h)


# ---------------------------------------------------------------------------
# Chern number


def chern_number(h: MatrixField, axes: tuple[int, int] = (0, 1), gap_tol: float = GAP_TOL) -> InvariantResult:
    """First Chern number of the occupied bands by the plaquette (link-variable) method.

    ``h`` may be a Hermitian field, a Hamiltonian or a fermion state (then
    ``i Gamma`` is used).  For ``d = 3`` the Chern number of the ``axes``
    plane summed over the remaining axis is divided by its length, i.e. the
    layer-averaged value.
    """
    grid = h.grid
    if grid.dim < 2:
        raise ConfigError("Chern number needs d >= 2")
    psi = occupied_frames(_as_hermitian(h), gap_tol, grid)
    mu, nu = axes
    smu, snu = grid.shift(mu), grid.shift(nu)
    U1 = _link(psi, smu)
    U2 = _link(psi, snu)
    if np.abs(U1).min() < 1e-12 or np.abs(U2).min() < 1e-12:
        raise GapError("vanishing link variable; refine the grid")
    U1, U2 = U1 / np.abs(U1), U2 / np.abs(U2)
    F = np.angle(U1 * U2[smu] * np.conj(U1[snu]) * np.conj(U2))
    layers = grid.npoints // (grid.sizes[mu] * grid.sizes[nu])
    raw = -F.sum() / (2 * np.pi) / layers
    return _integer_result("chern", raw, grid, max_plaquette_flux=float(np.abs(F).max()))


def chern_number_from_h(h: MatrixField, derivative: str = "spectral") -> float:
    """Chern number from ``-(i/16 pi) int Tr[h (d_x h d_y h - d_y h d_x h)]`` for flat ``h``.

    Used as an independent check of :func:`chern_number`; ``h`` is flattened first.
    """
    grid = h.grid
    H = _as_hermitian(h)
    w, U = np.linalg.eigh(0.5 * (H + _dag(H)))
    flat = (U * np.sign(w)[:, None, :]) @ _dag(U)
    d = spectral_derivative if derivative == "spectral" else central_derivative
    dx, dy = d(flat, grid, 0), d(flat, grid, 1)
    dens = np.trace(flat @ (dx @ dy - dy @ dx), axis1=-2, axis2=-1)
    area = (2 * np.pi) ** 2 / grid.npoints
    return float((-1j / (16 * np.pi) * dens.sum() * area).real)


# ---------------------------------------------------------------------------
# winding numbers


def _check_unitary(q: np.ndarray, tol: float = 1e-8):
    err = np.abs(q @ _dag(q) - np.eye(q.shape[-1])).max()
    if err > tol:
        raise ConfigError(f"winding number needs a unitary field (violation {err:.2g})")


def refine_unitary(values: np.ndarray, grid: BZGrid, factor: int) -> tuple[np.ndarray, BZGrid]:
    """Trigonometric interpolation of a unitary field onto a ``factor``-times finer grid.

    Interpolated matrices are projected back onto the unitary group by the
    polar decomposition.
    """
    from .bz_grid import make_grid
    m = values.shape[-1]
    N = grid.sizes
    axes = tuple(range(grid.dim))
    coef = np.fft.fftn(values.reshape(*N, m, m), axes=axes)
    fine = [n * factor for n in N]
    out = np.zeros((*fine, m, m), complex)
    freqs = [np.fft.fftfreq(n, 1.0 / n).astype(int) % f for n, f in zip(N, fine)]
    out[np.ix_(*freqs)] = coef
    vals = np.fft.ifftn(out, axes=axes).reshape(-1, m, m) * factor ** grid.dim
    u, _, vh = np.linalg.svd(vals)
    return u @ vh, make_grid(grid.dim, fine)


def winding_number(q: MatrixField, d: int | None = None, method: str = "spectral",
                   round_tol: float = ROUND_TOL, refine: int = 1) -> InvariantResult:
    """Winding number of a unitary field in ``d = 1`` or ``d = 3``.

    ``d = 1`` accumulates the phase of ``det q`` along the circle (exact on any
    grid on which successive phases differ by less than ``pi``).  ``d = 3``
    integrates the winding density with spectral (default) or fourth-order
    central-difference derivatives; with ``method="richardson"`` the
    central-difference result on the grid and on its half-resolution
    subgrid are extrapolated.  ``refine > 1`` first interpolates ``q``
    onto a finer grid (see :func:`refine_unitary`), which pays off on coarse
    grids.
    """
    grid = q.grid
    d = grid.dim if d is None else d
    if d != grid.dim:
        raise ConfigError(f"field lives in d={grid.dim}, requested d={d}")
    vals = q.values
    _check_unitary(vals)
    if d == 1:
        det = np.linalg.det(vals)
        if np.abs(det).min() < 1e-12:
            raise ConfigError("singular q")
        step = np.angle(det[grid.shift(0)] / det)
        raw = step.sum() / (2 * np.pi)
        return _integer_result("winding", raw, grid, round_tol,
                               max_phase_step=float(np.abs(step).max()))
    if d != 3:
        raise ConfigError("winding number is implemented for d = 1 and d = 3")
    if refine > 1:
        vals, grid = refine_unitary(vals, grid, refine)
    if method == "richardson":
        fine = _winding3(vals, grid, central_derivative)
        if all(s % 4 == 0 for s in grid.sizes):
            from .bz_grid import make_grid
            sub = make_grid(3, [s // 2 for s in grid.sizes])
            idx = grid.index(2 * sub.labels)
            coarse = _winding3(vals[idx], sub, central_derivative)
            raw = (16 * fine - coarse) / 15
            return _integer_result("winding", raw, grid, round_tol, fine=fine, coarse=coarse)
        return _integer_result("winding", fine, grid, round_tol)
    deriv = spectral_derivative if method == "spectral" else central_derivative
    raw = _winding3(vals, grid, deriv)
    return _integer_result("winding", raw, grid, round_tol, method=method)


def _winding3(vals: np.ndarray, grid: BZGrid, deriv) -> float:
    qd = _dag(vals)
    a = [qd @ deriv(vals, grid, mu) for mu in range(3)]
    dens = 0.0
    for perm in itertools.permutations(range(3)):
        sign = np.linalg.det(np.eye(3)[list(perm)])
        prod = a[perm[0]] @ a[perm[1]] @ a[perm[2]]
        dens = dens + sign * np.trace(prod, axis1=-2, axis2=-1)
    vol = (2 * np.pi) ** 3 / grid.npoints
    return float((dens.sum() * vol / (24 * np.pi ** 2)).real)


# ---------------------------------------------------------------------------
# Pfaffian Z2


def pfaffian_z2(state: MatrixField, tol: float = 1e-10) -> InvariantResult:
    """Class-D ``Z2`` from Pfaffians of ``Gamma_f`` at the TRIM (``d = 0`` or ``1``).

    Each Pfaffian is taken relative to the vacuum so that the vacuum is ``+1``.
    """
    grid = state.grid
    if grid.dim > 1:
        raise ConfigError("Pfaffian Z2 is defined here for d <= 1")
    ref = pfaffian(fermion_vacuum(state.n))
    prod = 1.0
    pfs = []
    for K in grid.trim_points():
        G = state.values[K]
        if np.abs(G.imag).max() > 1e-8:
            raise SymmetryError("covariance is not real at a TRIM")
        p = pfaffian(G.real) / ref
        if abs(p) < tol:
            raise DegenerateError(f"vanishing Pfaffian at k={grid.points[K].tolist()}")
        pfs.append(float(p))
        prod *= p
    value = 1 if prod > 0 else -1
    return InvariantResult("pfaffian", float(prod), value, float(abs(abs(prod) - 1)),
                           tuple(grid.sizes), "Z2", True, {"pfaffians": pfs})


# ---------------------------------------------------------------------------
# time-reversal Z2 invariants


def emergent_trs(az: AZClass | str, n: int) -> tuple[np.ndarray, str]:
    """Emergent TRS ``V_T`` and the space it acts on (``"majorana"`` or ``"h"``)."""
    az = AZClass(az)
    if az == AZClass.DIII:
        return kron(SZ.real, ISY, np.eye(n // 2)), "majorana"
    if az == AZClass.CI:
        return kron(SZ.real, np.eye(n)), "majorana"
    if az == AZClass.AI:
        return np.eye(n), "h"
    if az == AZClass.AII:
        return kron(ISY, np.eye(n // 2)), "h"
    raise ConfigError(f"no emergent time-reversal symmetry in class {az}")


def class_hamiltonian(state: MatrixField, az: AZClass | str) -> np.ndarray:
    """Hermitian field whose occupied bands carry the class's TRS invariants."""
    az = AZClass(az)
    if az in (AZClass.AI, AZClass.AII, AZClass.A):
        if state.role == "fermion-state":
            return extract_state(state, AZClass.A)
        if state.role == "hamiltonian":
            E = _embed_minus(state.n)
            return _dag(E) @ state.values @ E
        return state.values
    return _as_hermitian(state)


def parallel_transport_gauge(psi: np.ndarray, grid: BZGrid) -> np.ndarray:
    """Smooth periodic frame along a 1D grid; holonomy spread evenly over the loop."""
    N = grid.sizes[0]
    out = np.empty_like(psi)
    out[0] = psi[0]
    for j in range(1, N):
        M = _dag(psi[j]) @ out[j - 1]
        u, _, vh = np.linalg.svd(M)
        out[j] = psi[j] @ (u @ vh)
    M = _dag(out[0]) @ (out[N - 1] @ _polar(_dag(out[N - 1]) @ out[0]))
    # closing link included; M is the holonomy
    w, V = np.linalg.eig(M)
    phases = np.angle(w)
    for j in range(N):
        corr = V @ np.diag(np.exp(-1j * phases * j / N)) @ np.linalg.inv(V)
        out[j] = out[j] @ corr
    return out


def _polar(M: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(M)
    return u @ vh


def _half_sqrt_det(dets: np.ndarray) -> np.ndarray:
    """Continuous branch of ``sqrt(det)`` along consecutive samples."""
    ph = np.unwrap(np.angle(dets))
    return np.sqrt(np.abs(dets)) * np.exp(0.5j * ph)


def sewing_matrix(state: MatrixField, az: AZClass | str, gap_tol: float = GAP_TOL):
    """Occupied frame in the parallel-transport gauge and ``w(k) = psi(-k)^dag V_T psi(k)^*``."""
    grid = state.grid
    if grid.dim != 1:
        raise ConfigError("sewing-matrix invariant is implemented for d = 1")
    H = class_hamiltonian(state, az)
    VT, _ = emergent_trs(az, H.shape[-1] if AZClass(az) in (AZClass.AI, AZClass.AII) else state.n)
    psi = occupied_frames(H, gap_tol, grid)
    psi = parallel_transport_gauge(psi, grid)
    w = _dag(psi[grid.negation]) @ VT @ np.conj(psi)
    err = np.abs(w @ _dag(w) - np.eye(w.shape[-1])).max()
    if err > 1e-6:
        raise SymmetryError(f"sewing matrix not unitary ({err:.2g}); TRS violated?")
    return psi, w


def sewing_z2(state: MatrixField, az: AZClass | str = "DIII", gap_tol: float = GAP_TOL) -> InvariantResult:
    """One-dimensional ``Z2`` from the sewing matrix in a smooth gauge.

    ``nu = prod_{K = 0, pi} Pf w(K) / sqrt(det w(K))`` with the square root
    continued along ``k in [0, pi]``.  ``raw`` is the accumulated phase of
    ``nu`` in units of ``pi`` (near 0 trivial, near 1 nontrivial).
    """
    az = AZClass(az)
    grid = state.grid
    psi, w = sewing_matrix(state, az, gap_tol)
    N = grid.sizes[0]
    path = list(range(0, N // 2 + 1))
    sq = _half_sqrt_det(np.linalg.det(w[path]))
    ratio = 1.0 + 0j
    for K, s in ((0, sq[0]), (N // 2, sq[-1])):
        W = w[K]
        if np.abs(W + W.T).max() > 1e-6:
            raise SymmetryError("sewing matrix is not antisymmetric at a TRIM")
        ratio *= pfaffian(0.5 * (W - W.T)) / s
    raw = float(np.angle(ratio) / np.pi) % 2.0
    res = _z2_from_half("sewing", raw / 2, grid)
    res.raw = raw
    res.diagnostics["nu"] = [float(ratio.real), float(ratio.imag)]
    det_phase = np.angle(np.linalg.det(w))
    res.diagnostics["sewing_winding"] = float(np.angle(np.exp(1j * np.diff(
        np.concatenate([det_phase, det_phase[:1]])))).sum() / (2 * np.pi))
    return res


def q_pfaffian_z2(state: MatrixField) -> InvariantResult:
    """Gauge-free class-DIII ``Z2``: ``prod_K Pf q(K) / sqrt(det q(K))`` along ``[0, pi]``."""
    grid = state.grid
    q = extract_state(state, AZClass.DIII)
    N = grid.sizes[0]
    path = list(range(0, N // 2 + 1))
    sq = _half_sqrt_det(np.linalg.det(q[path]))
    ratio = pfaffian(q[0]) / sq[0] * pfaffian(q[N // 2]) / sq[-1]
    raw = float(np.angle(ratio) / np.pi) % 2.0
    res = _z2_from_half("q_pfaffian", raw / 2, grid)
    res.raw = raw
    return res


def _kramers_frame(psi: np.ndarray, VT: np.ndarray) -> np.ndarray:
    """Columns ordered in pairs ``(a, V_T a^*)`` spanning the occupied space."""
    m = psi.shape[1]
    cols = []
    P = psi @ _dag(psi)
    basis = psi.copy()
    for j in range(m):
        if len(cols) >= m:
            break
        v = basis[:, j]
        for c in cols:
            v = v - c * (np.conj(c) @ v)
        nv = np.linalg.norm(v)
        if nv < 1e-6:
            continue
        a = v / nv
        b = VT @ np.conj(a)
        b = P @ b
        b = b - a * (np.conj(a) @ b)
        for c in cols:
            b = b - c * (np.conj(c) @ b)
        b /= np.linalg.norm(b)
        cols.extend([a, b])
    if len(cols) != m:
        raise DegenerateError("could not build a Kramers basis")
    return np.stack(cols, axis=1)


def fu_kane_z2(h: MatrixField, az: AZClass | str = "AII", axis: int = 0,
               gap_tol: float = GAP_TOL, fixed: dict | None = None) -> InvariantResult:
    """Two-dimensional time-reversal ``Z2`` (class AII) by the lattice Fu-Kane formula.

    Sums plaquette field strengths over ``k_axis in [0, pi]`` and subtracts the
    link phases on the boundary lines ``k_axis = 0, pi``, where the frame obeys
    ``psi(-k) = V_T psi(k)^* J^T`` with ``J = -i s_y`` on each Kramers pair.

    ``h`` may be a 2D field, or a 3D field with ``fixed={axis: index}``
    selecting a 2D slice.
    """
    az = AZClass(az)
    grid = h.grid
    H = class_hamiltonian(h, az) if h.role in ("fermion-state", "hamiltonian") else h.values
    if grid.dim == 3:
        if not fixed or len(fixed) != 1:
            raise ConfigError("3D input needs one fixed axis")
        (fa, fi), = fixed.items()
        from .bz_grid import make_grid
        axes2 = [a for a in range(3) if a != fa]
        sub = make_grid(2, [grid.sizes[a] for a in axes2])
        lab = np.zeros((sub.npoints, 3), int)
        lab[:, axes2] = sub.labels
        lab[:, fa] = fi
        H = H[grid.index(lab)]
        grid = sub
    elif grid.dim != 2:
        raise ConfigError("Fu-Kane index needs d = 2 (or a 2D slice of d = 3)")
    m = H.shape[-1]
    VT, _ = emergent_trs(az, m if az in (AZClass.AI, AZClass.AII) else m // 2)
    psi = occupied_frames(H, gap_tol, grid)
    nocc = psi.shape[-1]
    if nocc % 2:
        raise SymmetryError("odd number of occupied bands; no Kramers structure")
    Jd = np.kron(np.array([[0.0, -1.0], [1.0, 0.0]]), np.eye(nocc // 2))
    Jd = _pair_perm(nocc) @ Jd @ _pair_perm(nocc).T
    other = 1 - axis
    N1, N2 = grid.sizes[axis], grid.sizes[other]
    lab = grid.labels
    resid = 0.0
    for line in (0, N1 // 2):
        for j2 in range(0, N2 // 2 + 1):
            L = lab[0].copy()
            L[axis], L[other] = line, j2
            i = grid.index(L)
            if j2 in (0, N2 // 2):
                psi[i] = _kramers_frame(psi[i], VT)
            else:
                L2 = L.copy()
                L2[other] = (-j2) % N2
                psi[grid.index(L2)] = VT @ np.conj(psi[i]) @ Jd.T
        # measure the constraint along the whole line
        for j2 in range(N2):
            L = lab[0].copy()
            L[axis], L[other] = line, j2
            i = grid.index(L)
            ineg = grid.negate_index(i)
            wk = _dag(psi[ineg]) @ VT @ np.conj(psi[i])
            resid = max(resid, float(np.abs(wk - Jd).max()))
    s1, s2 = grid.shift(axis), grid.shift(other)
    U1 = _link(psi, s1)
    U2 = _link(psi, s2)
    U1, U2 = U1 / np.abs(U1), U2 / np.abs(U2)
    A2 = np.angle(U2)
    F = np.angle(U1 * U2[s1] * np.conj(U1[s2]) * np.conj(U2))
    half = lab[:, axis] < N1 // 2
    flux = F[half].sum()
    # boundary of the half cylinder: k_axis = pi upward minus k_axis = 0 upward.
    # Links on the two half-lines are equal in this gauge, so sum one half and
    # double it; a link sitting at exactly -1 then cannot spoil the parity.
    lower = lab[:, other] < N2 // 2
    on_pi = (lab[:, axis] == N1 // 2) & lower
    on_0 = (lab[:, axis] == 0) & lower
    circ = 2.0 * (A2[on_pi].sum() - A2[on_0].sum())
    raw = (flux - circ) / (2 * np.pi)
    n_int = int(np.rint(raw))
    value = -1 if n_int % 2 else 1
    gap = abs(raw - n_int)
    return InvariantResult("fukane", float(raw), value, float(gap), tuple(grid.sizes), "Z2",
                           gap < ROUND_TOL, {"gauge_residual": resid})


def _pair_perm(m: int) -> np.ndarray:
    """Permutation taking block order ``(a_1..a_p, b_1..b_p)`` to pairs ``(a_1, b_1, ...)``."""
    p = m // 2
    P = np.zeros((m, m))
    for i in range(p):
        P[2 * i, i] = 1
        P[2 * i + 1, p + i] = 1
    return P


def wilson_loop_z2(h: MatrixField, az: AZClass | str = "AII", axis: int = 0,
                   gap_tol: float = GAP_TOL) -> InvariantResult:
    """``Z2`` from the flow of Wilson-loop eigenphases (hybrid Wannier centres).

    For each ``k_axis in [0, pi]`` the Wilson loop along the other direction is
    diagonalised; the parity of crossings of the largest-gap midpoint gives the
    index.
    """
    grid = h.grid
    H = class_hamiltonian(h, az) if h.role in ("fermion-state", "hamiltonian") else h.values
    psi = occupied_frames(H, gap_tol, grid)
    other = 1 - axis
    N1, N2 = grid.sizes[axis], grid.sizes[other]
    phases = []
    for j1 in range(N1 // 2 + 1):
        W = np.eye(psi.shape[-1], dtype=complex)
        for j2 in range(N2):
            L = np.zeros(2, int)
            L[axis], L[other] = j1, j2
            L2 = L.copy()
            L2[other] = (j2 + 1) % N2
            a, b = psi[grid.index(L)], psi[grid.index(L2)]
            W = (_dag(b) @ a) @ W
        phases.append(np.sort(np.angle(np.linalg.eigvals(W))))
    crossings = 0
    def gap_mid(th):
        s = np.sort(th)
        ext = np.concatenate([s, [s[0] + 2 * np.pi]])
        i = int(np.argmax(np.diff(ext)))
        return (ext[i] + ext[i + 1]) / 2
    for a, b in zip(phases[:-1], phases[1:]):
        za, zb = gap_mid(a), gap_mid(b)
        lo, hi = sorted((za, zb))
        if hi - lo > np.pi:
            lo, hi = hi, lo + 2 * np.pi
        th = np.mod(b - lo, 2 * np.pi) + lo
        crossings += int(((th > lo) & (th < hi)).sum())
    value = -1 if crossings % 2 else 1
    return InvariantResult("wilson_loop", float(crossings), value, 0.0, tuple(grid.sizes), "Z2", True)


# ---------------------------------------------------------------------------
# Chern-Simons forms


def berry_phase(H: np.ndarray, grid: BZGrid, gap_tol: float = GAP_TOL) -> float:
    """Berry phase of the occupied bands around a 1D grid, in units of ``2 pi`` (mod 1)."""
    psi = occupied_frames(H, gap_tol, grid)
    U = _link(psi, grid.shift(0))
    return float((-np.angle(np.prod(U / np.abs(U))) / (2 * np.pi)) % 1.0)


def _flat(H: np.ndarray) -> np.ndarray:
    w, U = np.linalg.eigh(H)
    return (U * np.sign(w)[..., None, :]) @ _dag(U)


def _sign_derivatives(H: np.ndarray, dHs: list[np.ndarray], gap_tol: float):
    """``sign(H)`` and its directional derivatives by the Daleckii-Krein formula."""
    w, U = np.linalg.eigh(H)
    if np.abs(w).min() < gap_tol:
        raise GapError("interpolation path closes the gap", value=float(np.abs(w).min()))
    s = np.sign(w)
    dw = w[..., :, None] - w[..., None, :]
    ds = s[..., :, None] - s[..., None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = np.where(np.abs(ds) > 0, ds / np.where(dw == 0, 1, dw), 0.0)
    Ud = _dag(U)
    out = [U @ (kern * (Ud @ dH @ U)) @ Ud for dH in dHs]
    return (U * s[..., None, :]) @ Ud, out


def default_cs_mass(m: int) -> np.ndarray:
    """Default time-reversal-breaking mass for the 4-band spin (x) orbital Dirac layout."""
    if m != 4:
        raise ConfigError("supply a mass matrix for the Chern-Simons path (default needs 4 bands)")
    return kron(np.eye(2), SY)


def chern_simons_3d(h1: np.ndarray, grid: BZGrid, h0: np.ndarray | None = None,
                    mass: np.ndarray | None = None, nodes: int = 12, gap_tol: float = 1e-6) -> float:
    """``CS_1(h1) - CS_1(h0)`` (mod 1) by integrating the second Chern character over
    the interpolation ``(1 - l) h1 + l h0 + sin(pi l) mass``.
    """
    m = h1.shape[-1]
    if h0 is None:
        h0 = kron(np.eye(m // 2), SZ)
    if mass is None:
        mass = default_cs_mass(m)
    h1 = _flat(0.5 * (h1 + _dag(h1)))
    dk = [spectral_derivative(h1, grid, mu) for mu in range(3)]
    x, wts = np.polynomial.legendre.leggauss(nodes)
    lam = 0.5 * (x + 1)
    wts = 0.5 * wts
    perms = [(p, np.linalg.det(np.eye(4)[list(p)])) for p in itertools.permutations(range(4))]
    vol = (2 * np.pi) ** 3 / grid.npoints
    total = 0.0
    for l, wl in zip(lam, wts):
        H = (1 - l) * h1 + l * h0 + np.sin(np.pi * l) * mass
        dH = [(1 - l) * d for d in dk] + [np.broadcast_to(h0 - h1 + np.pi * np.cos(np.pi * l) * mass, h1.shape)]
        S, dS = _sign_derivatives(H, dH, gap_tol)
        dens = 0.0
        for p, sg in perms:
            dens = dens + sg * np.trace(S @ dS[p[0]] @ dS[p[1]] @ dS[p[2]] @ dS[p[3]], axis1=-2, axis2=-1)
        total += wl * dens.sum() * vol
    # Ch_2 = 1/(256 pi^2) int eps Tr[h dh dh dh dh]
    return float((total / (256 * np.pi ** 2)).real)


def chern_simons_halfint(state: MatrixField, az: AZClass | str, mass: np.ndarray | None = None,
                         nodes: int = 12) -> InvariantResult:
    """``Z2`` from whether the Chern-Simons form sits at 0 or 1/2 (mod 1).

    ``d = 1`` uses the Berry phase of the occupied bands of ``i Gamma`` (class
    D).  ``d = 3`` (class AII) uses the transgression of the second Chern
    character along a gapped time-reversal-breaking path to an atomic
    insulator.
    """
    az = AZClass(az)
    grid = state.grid
    if grid.dim == 1:
        if az != AZClass.D:
            raise ConfigError("d = 1 Chern-Simons Z2 is the class-D entry")
        raw = berry_phase(_as_hermitian(state), grid)
        return _z2_from_half("chern_simons", raw, grid)
    if grid.dim == 3:
        if az != AZClass.AII:
            raise ConfigError("d = 3 Chern-Simons Z2 is implemented for class AII")
        h1 = class_hamiltonian(state, az)
        raw = chern_simons_3d(h1, grid, mass=mass, nodes=nodes) % 1.0
        return _z2_from_half("chern_simons", raw, grid)
    raise ConfigError("Chern-Simons form needs odd d")


def hermitianized_cs(op: MatrixField) -> float:
    """First Chern-Simons content of ``X = sigma_+ V + sigma_- V^dag`` in ``d = 1``.

    Evaluated in the gauge ``psi = (phi, -V^dag phi)/sqrt 2`` by summing link
    phases without wrapping; equals half the winding of ``V``.
    """
    grid = op.grid
    if grid.dim != 1:
        raise ConfigError("hermitianized Chern-Simons form implemented for d = 1")
    V = op.values
    m = V.shape[-1]
    psi = np.concatenate([np.broadcast_to(np.eye(m), V.shape), -_dag(V)], axis=-2) / np.sqrt(2)
    U = _link(psi, grid.shift(0))
    return float(-np.angle(U).sum() / (2 * np.pi))


def strong_index_3d(h: MatrixField, az: AZClass | str = "AII") -> InvariantResult:
    """Strong 3D index as the product of Fu-Kane indices on the ``k_z = 0, pi`` planes."""
    grid = h.grid
    N = grid.sizes[2]
    a = fu_kane_z2(h, az, fixed={2: 0})
    b = fu_kane_z2(h, az, fixed={2: N // 2})
    value = a.value * b.value
    return InvariantResult("strong_z2", float(a.raw + b.raw), value, max(a.quantization_gap, b.quantization_gap),
                           tuple(grid.sizes), "Z2", True, {"kz0": a.value, "kzpi": b.value})
