"""Model zoo and random generators, all emitted as real-space stencils.

Single-particle Hamiltonians are written in BdG form,

    H = sum_{r,r'} c_r^dag t_{r-r'} c_{r'}
        + 1/2 sum_{r,r'} (c_r^dag Delta_{r-r'} c_{r'}^dag + h.c.),

and converted to the Majorana matrix ``h`` stored by ``kind="hamiltonian"``
couplings (see :mod:`gausstopo.core`).  Keys of ``hopping`` and ``pairing``
are displacements ``dr = r - r'``.
"""

from __future__ import annotations

from typing import Callable, Mapping

import numpy as np
from scipy import optimize

from .bz_grid import make_grid
from .core import (RealSpaceCouplings, fourier, inverse_fourier,
                   stack_couplings, MatrixField)
from .errors import ConfigError
from .symmetry import (AZClass, ISY, SX, SY, SZ, class_symmetries, kron, mode_multiple,
                       reconstruct_state, reduced, S0)

# (c, c^dag) = OMEGA gamma on one mode
OMEGA = 0.5 * np.array([[1, 1j], [1, -1j]])


def _key(dr, dim: int) -> tuple[int, ...]:
    dr = tuple(int(x) for x in np.atleast_1d(dr))
    if len(dr) != dim:
        raise ConfigError(f"displacement {dr} does not match dim={dim}")
    return dr


def _neg(dr: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-x for x in dr)


def bdg_to_majorana(hopping: Mapping, pairing: Mapping | None = None, dim: int = 1) -> RealSpaceCouplings:
    """Convert BdG hopping/pairing stencils to Majorana ``hamiltonian`` couplings.

    Requires ``t_{-dr} = t_dr^dag`` and ``Delta_{-dr} = -Delta_dr^T``; missing
    partners are filled in from these relations.
    """
    pairing = pairing or {}
    t = {_key(k, dim): np.atleast_2d(np.asarray(v, complex)) for k, v in hopping.items()}
    D = {_key(k, dim): np.atleast_2d(np.asarray(v, complex)) for k, v in pairing.items()}
    shapes = {v.shape for v in list(t.values()) + list(D.values())}
    if len(shapes) != 1:
        raise ConfigError(f"inconsistent block shapes {shapes}")
    n = shapes.pop()[0]
    for dr, v in list(t.items()):
        partner = v.conj().T
        if _neg(dr) in t:
            if not np.allclose(t[_neg(dr)], partner):
                raise ConfigError(f"hopping at {dr} and {_neg(dr)} is not Hermitian-paired")
        else:
            t[_neg(dr)] = partner
    for dr, v in list(D.items()):
        partner = -v.T
        if _neg(dr) in D:
            if not np.allclose(D[_neg(dr)], partner):
                raise ConfigError(f"pairing at {dr} and {_neg(dr)} is not antisymmetric")
        else:
            D[_neg(dr)] = partner
    zero = np.zeros((n, n), complex)
    om = np.kron(OMEGA, np.eye(n))
    G = {}
    for dr in set(t) | set(D):
        tb, db = t.get(dr, zero), D.get(dr, zero)
        B = np.block([[tb, db], [-db.conj(), -tb.conj()]])
        G[dr] = om.conj().T @ B @ om
    terms = {}
    for dr in G:
        h = -(G[dr] - G.get(_neg(dr), np.zeros_like(G[dr])).T)
        h = 1j * h.imag  # real part cancels identically
        if np.abs(h).max() > 0:
            terms[dr] = h
    return RealSpaceCouplings(n, "fermion", "hamiltonian", dim, terms).check()


def _unit(dim: int, axis: int, step: int = 1) -> tuple[int, ...]:
    e = [0] * dim
    e[axis] = step
    return tuple(e)


# ---------------------------------------------------------------------------
# named models


def kitaev_chain(mu: float = 1.0, t: float = 1.0, delta: float = 1.0) -> RealSpaceCouplings:
    """Kitaev chain; topological for ``|mu| < 2|t|`` with winding +1 at ``t = delta > 0``."""
    hopping = {(0,): [[-mu]], (1,): [[-t]]}
    pairing = {(1,): [[-delta]]}
    return bdg_to_majorana(hopping, pairing, dim=1)


def chiral_pip(mu: float = 1.0, t: float = 1.0, delta: float = 1.0, chirality: int = 1) -> RealSpaceCouplings:
    """Spinless chiral superconductor with ``Delta (sin kx + i c sin ky)``, ``c = chirality``.

    Topological for ``0 < |mu| < 4|t|``; Chern number ``+1`` for ``0 < mu < 4t``
    and ``chirality = +1``.
    """
    if chirality not in (1, -1):
        raise ConfigError("chirality must be +1 or -1")
    hopping = {(0, 0): [[-mu]], (1, 0): [[-t]], (0, 1): [[-t]]}
    c = chirality
    pairing = {(-1, 0): [[-0.5j * delta]], (0, -1): [[0.5 * c * delta]]}
    return bdg_to_majorana(hopping, pairing, dim=2)


def chern_insulator(m: float = 1.0, chirality: int = 1) -> RealSpaceCouplings:
    """Two-band Chern insulator ``sin kx s_x + c sin ky s_y + (m - cos kx - cos ky) s_z``.

    Number conserving; topological for ``0 < |m| < 2``.
    """
    if chirality not in (1, -1):
        raise ConfigError("chirality must be +1 or -1")
    sx, sy, sz = SX, chirality * SY, SZ
    # e^{-ik.dr}: sin k = (e^{ik} - e^{-ik}) / 2i sits at dr = -1 with 1/2i
    hopping = {
        (0, 0): m * sz,
        (-1, 0): sx / 2j - sz / 2,
        (0, -1): sy / 2j - sz / 2,
    }
    return bdg_to_majorana(hopping, {}, dim=2)


def _dirac_hopping(dim: int, m: float, mass_y: float = 0.0):
    """``(m - sum cos) G0 + sum sin k_i G_i`` with spin (x) orbital gammas."""
    tz = kron(S0, SZ)
    gam = [kron(SX, SX), kron(SY, SX), kron(SZ, SX)]
    hop = {tuple([0] * dim): m * tz + mass_y * kron(S0, SY)}
    for i in range(dim):
        hop[_unit(dim, i, -1)] = gam[i] / 2j - tz / 2
    return hop


def dirac_insulator(dim: int, m: float, trs_breaking: float = 0.0) -> RealSpaceCouplings:
    """Time-reversal-invariant Dirac insulator (class AII), four orbitals per cell.

    For ``dim=2`` this is a quantum-spin-Hall model, topological for
    ``0 < |m| < 2``.  For ``dim=3`` it is a strong insulator for ``1 < |m| < 3``,
    weak for ``|m| < 1`` and trivial for ``|m| > 3``.  ``trs_breaking`` adds a
    mass term that anticommutes with every Dirac matrix.
    """
    if dim not in (2, 3):
        raise ConfigError("dirac_insulator supports dim 2 or 3")
    return bdg_to_majorana(_dirac_hopping(dim, m, trs_breaking), {}, dim=dim)


def qsh_model(m: float = 1.0) -> RealSpaceCouplings:
    return dirac_insulator(2, m)


def trivial_insulator(n: int, dim: int, spinful: bool = True) -> RealSpaceCouplings:
    """Flat-band atomic insulator with half the modes filled."""
    onsite = np.kron(S0, SZ) if spinful else np.diag([1.0, -1.0])
    blocks = [onsite] * max(1, n // onsite.shape[0])
    from scipy.linalg import block_diag
    return bdg_to_majorana({tuple([0] * dim): block_diag(*blocks)}, {}, dim=dim)


def lattice_translation(n: int = 1, shift: int = 1, dim: int = 1, axis: int = 0,
                        particle: str = "fermion") -> RealSpaceCouplings:
    """Translation by ``shift`` sites, ``gamma_r -> gamma_{r + shift}``.

    ``V(k) = exp(i shift k)``, so the extracted class-A ``u`` has winding
    ``shift * n`` in one dimension.
    """
    dr = _unit(dim, axis, -shift)
    return RealSpaceCouplings(n, particle, "operation", dim, {dr: np.eye(2 * n)}).check()


def boson_squeezer_winding(w: int, r: float = 0.5, n: int = 1) -> RealSpaceCouplings:
    """Bosonic translation by ``w`` sites combined with single-mode squeezing ``r``.

    ``V_b(k) = exp(i w k) * diag(e^r, e^-r)``: symplectic, with polar unitary
    part carrying ``u(k) = exp(i w k)`` and positive part the squeezer.
    """
    squeeze = np.kron(np.diag([np.exp(r), np.exp(-r)]), np.eye(n))
    return RealSpaceCouplings(n, "boson", "operation", 1, {(-int(w),): squeeze}).check()


def _state_couplings(field: MatrixField, max_range: int) -> RealSpaceCouplings:
    out = inverse_fourier(field, max_range, drop_tol=1e-13)
    terms = {dr: b.real.astype(complex) for dr, b in out.terms.items()}
    return RealSpaceCouplings(out.n, "fermion", "state", out.dim, terms).check(1e-9)


def winding_seed_u(n: int, w: int = 1) -> Callable[[np.ndarray], np.ndarray]:
    """``u(k) = diag(e^{i w k}, 1, ..., 1)`` on a 1D grid."""
    def u(k):
        out = np.zeros((len(k), n, n), complex)
        out[:, 0, 0] = np.exp(1j * w * k[:, 0])
        for i in range(1, n):
            out[:, i, i] = 1.0
        return out
    return u


def bdg_q_from_u(u: np.ndarray, negation: np.ndarray, az: AZClass | str) -> np.ndarray:
    """``q = u (s_y (x) 1) u(-k)^T`` (DIII) or ``u u(-k)^T`` (CI)."""
    az = AZClass(az)
    umT = np.swapaxes(u[negation], -1, -2)
    if az == AZClass.DIII:
        m = u.shape[-1]
        return u @ kron(SY, np.eye(m // 2)) @ umT
    if az == AZClass.CI:
        return u @ umT
    raise ConfigError("BdG seed construction applies to DIII and CI")


def dIII_wire(w: int = 1, n: int = 2, grid_size: int = 8) -> RealSpaceCouplings:
    """Class-DIII state built from ``u(k) = diag(e^{i w k}, 1)``; nontrivial for odd ``w``."""
    grid = make_grid(1, max(grid_size, 4 * abs(w) + 4))
    u = winding_seed_u(n, w)(grid.points)
    q = bdg_q_from_u(u, grid.negation, AZClass.DIII)
    field = reconstruct_state(reduced(q, AZClass.DIII, grid))
    return _state_couplings(field, 2 * abs(w))


def cI_model(w: int = 1, n: int = 2, grid_size: int = 8) -> RealSpaceCouplings:
    """Class-CI state with ``q = u u(-k)^T`` from a 1D seed of winding ``w``."""
    grid = make_grid(1, max(grid_size, 4 * abs(w) + 4))
    u = winding_seed_u(n // 2, w)(grid.points)
    q = bdg_q_from_u(u, grid.negation, AZClass.CI)
    field = reconstruct_state(reduced(q, AZClass.CI, grid))
    return _state_couplings(field, 2 * abs(w))


def vacuum_couplings(n: int = 1, dim: int = 1, particle: str = "fermion") -> RealSpaceCouplings:
    block = -kron(ISY, np.eye(n)) if particle == "fermion" else np.eye(2 * n)
    return RealSpaceCouplings(n, particle, "state", dim, {tuple([0] * dim): block})


def _factor_perm(f: int, na: int, nb: int) -> np.ndarray:
    """Mode order ``[f (x) ra, f (x) rb] -> f (x) (ra + rb)``."""
    ra, rb = na // f, nb // f
    perm = []
    for i in range(f):
        perm += [i * ra + j for j in range(ra)] + [na + i * rb + j for j in range(rb)]
    return np.array(perm)


def stack_models(a: RealSpaceCouplings, b: RealSpaceCouplings,
                 az: AZClass | str | None = None) -> RealSpaceCouplings:
    """Direct sum keeping the ``spin (x) rest`` mode layout that class ``az`` relies on."""
    out = stack_couplings(a, b)
    f = mode_multiple(az) if az is not None else 1
    if f == 1:
        return out
    if a.n % f or b.n % f:
        raise ConfigError(f"class {az} needs n divisible by {f}")
    p = _factor_perm(f, a.n, b.n)
    p = np.concatenate([p, p + out.n])
    return RealSpaceCouplings(out.n, out.particle, out.kind, out.dim,
                              {dr: B[np.ix_(p, p)] for dr, B in out.terms.items()})


def doubled(c: RealSpaceCouplings, az: AZClass | str | None = None) -> RealSpaceCouplings:
    return stack_models(c, c, az)


# ---------------------------------------------------------------------------
# random generators


def symmetry_group(syms, signs, size: int) -> list[tuple[np.ndarray, float]]:
    """Closure of signed real orthogonal generators (finite signed-permutation group)."""
    n = size
    elems = [(np.eye(n), 1.0)]
    frontier = list(elems)
    gens = list(zip(syms, signs))
    while frontier:
        new = []
        for M, s in frontier:
            for G, t in gens:
                P, ps = G @ M, s * t
                hit = next((e for e in elems if np.allclose(e[0], P)), None)
                if hit is None:
                    elems.append((P, ps))
                    new.append((P, ps))
                elif hit[1] != ps:
                    raise ConfigError("inconsistent symmetry characters")
        frontier = new
    return elems


def symmetrize_blocks(terms: dict, group, transpose_pairing: bool = True) -> dict:
    """Project every block onto ``{A : s_g M_g A M_g^T = A for all g}``."""
    out = {}
    for dr, A in terms.items():
        acc = sum(s * M @ A @ M.T for M, s in group) / len(group)
        out[dr] = acc
    return out


def _random_real_stencil(rng, n2: int, dim: int, rng_range: int, antisym: bool, decay: float = 0.6):
    """Random real blocks with ``A_{-dr} = -/+ A_dr^T`` over a cube of displacements."""
    box = np.array(np.meshgrid(*[range(-rng_range, rng_range + 1)] * dim, indexing="ij")).reshape(dim, -1).T
    raw = {tuple(int(x) for x in dr): rng.standard_normal((n2, n2)) * decay ** np.abs(dr).sum() for dr in box}
    sgn = -1.0 if antisym else 1.0
    return {dr: raw[dr] + sgn * raw[_neg(dr)].T for dr in raw}


def random_hamiltonian(az: AZClass | str, dim: int, n: int | None = None, max_range: int = 1,
                       seed: int | None = None, gap_tol: float = 0.05,
                       check_size: int | None = None, max_tries: int = 200) -> RealSpaceCouplings:
    """Random finite-range Majorana Hamiltonian respecting the symmetries of ``az``.

    Draws are rejected unless the spectrum keeps a gap of at least ``gap_tol``
    with a constant number of negative bands on two interleaved check grids
    (sizes ``check_size`` and ``check_size + 2``).
    """
    az = AZClass(az)
    mult = mode_multiple(az)
    n = n or (2 * mult if az == AZClass.AII else max(2, mult))
    if n % mult:
        raise ConfigError(f"class {az} needs n divisible by {mult}")
    rng = np.random.default_rng(seed)
    syms = class_symmetries(az, n)
    group = symmetry_group([s.matrix for s in syms], [-1.0 if s.antiunitary else 1.0 for s in syms], 2 * n)
    size = check_size or {1: 48, 2: 20}.get(dim, 10)
    grids = [make_grid(dim, size), make_grid(dim, size + 2)]
    # weaker hopping in higher d keeps the on-site block competitive with 3^d - 1 neighbours
    decay = {1: 0.6, 2: 0.45}.get(dim, 0.3)
    for _ in range(max_tries):
        A = symmetrize_blocks(_random_real_stencil(rng, 2 * n, dim, max_range, True, decay), group)
        terms = {dr: -1j * a for dr, a in A.items() if np.abs(a).max() > 1e-14}
        c = RealSpaceCouplings(n, "fermion", "hamiltonian", dim, terms)
        w = np.concatenate([np.linalg.eigvalsh(fourier(c, g).values) for g in grids])
        counts = (w < 0).sum(axis=-1)
        if np.abs(w).min() > gap_tol and counts.min() == counts.max():
            k0 = np.concatenate([g.points for g in grids])
            if polished_gap(c, k0[np.argsort(np.abs(w).min(axis=-1))[:4]]) > gap_tol:
                return c.check()
    raise ConfigError(f"could not draw a gapped class-{az} Hamiltonian in {max_tries} tries")


def polished_gap(c: RealSpaceCouplings, starts: np.ndarray) -> float:
    """Smallest ``|eigenvalue|`` found by local minimisation from the momenta ``starts``."""
    def gap(k):
        return float(np.abs(np.linalg.eigvalsh(c.at(k)[0])).min())

    best = np.inf
    for k in starts:
        res = optimize.minimize(gap, k, method="Nelder-Mead",
                                options={"xatol": 1e-4, "fatol": 1e-6, "maxiter": 400})
        best = min(best, res.fun)
    return float(best)


def random_state(az: AZClass | str, d: int, smoothness: int = 1, n: int | None = None,
                 seed: int | None = None) -> RealSpaceCouplings:
    """Random symmetric Hamiltonian stencil; flatten with :func:`ground_state_covariance`."""
    return random_hamiltonian(az, d, n=n, max_range=smoothness, seed=seed)


def random_generator(az: AZClass | str | None, dim: int, n: int, max_range: int = 1,
                     seed: int | None = None, particle: str = "fermion") -> RealSpaceCouplings:
    """Random symmetric generator stencil.

    Fermions: real antisymmetric ``X`` commuting with every symmetry matrix, so
    ``exp(X(k))`` is a symmetric operation.  Bosons: real symmetric ``H``, so
    ``exp(sigma H(k))`` is symplectic.
    """
    rng = np.random.default_rng(seed)
    if particle == "fermion":
        terms = _random_real_stencil(rng, 2 * n, dim, max_range, True)
        if az is not None:
            syms = class_symmetries(az, n)
            group = symmetry_group([s.matrix for s in syms], [1.0] * len(syms), 2 * n)
            terms = symmetrize_blocks(terms, group)
        kind = "operation"
    else:
        terms = _random_real_stencil(rng, 2 * n, dim, max_range, False)
        kind = "state"
    return RealSpaceCouplings(n, particle, kind, dim, {k: 0.5 * v for k, v in terms.items()})


def _expm_field(X: np.ndarray) -> np.ndarray:
    from scipy.linalg import expm
    return np.stack([expm(x) for x in X])


def random_op_field(grid, n: int, az: AZClass | str | None = None, max_range: int = 1,
                    seed: int | None = None, particle: str = "fermion", scale: float = 1.0) -> MatrixField:
    """Random operation field ``exp(X(k))`` (fermion) or ``exp(sigma H(k))`` (boson)."""
    gen = random_generator(az, grid.dim, n, max_range, seed, particle)
    G = fourier(gen, grid).values * scale
    if particle == "boson":
        sigma = kron(ISY, np.eye(n))
        G = sigma @ G
    return MatrixField(grid, _expm_field(G), f"{particle}-op")


def random_boson_state_field(grid, n: int, max_range: int = 1, seed: int | None = None,
                             scale: float = 0.5) -> MatrixField:
    """``Gamma_b = S S^dag`` with ``S = exp(sigma H(k))`` symplectic."""
    S = random_op_field(grid, n, None, max_range, seed, "boson", scale).values
    G = S @ np.conj(np.swapaxes(S, -1, -2))
    return MatrixField(grid, 0.5 * (G + np.conj(np.swapaxes(G, -1, -2))), "boson-state")


def random_unitary_field(grid, m: int, harmonics: int = 1, seed: int | None = None,
                         scale: float = 1.0) -> np.ndarray:
    """Smooth random unitary ``exp(i H(k))`` from a truncated Fourier series ``H``."""
    rng = np.random.default_rng(seed)
    box = np.array(np.meshgrid(*[range(-harmonics, harmonics + 1)] * grid.dim, indexing="ij")).reshape(grid.dim, -1).T
    H = np.zeros((grid.npoints, m, m), complex)
    for dr in box:
        B = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) * 0.5 ** np.abs(dr).sum()
        H += np.exp(-1j * grid.points @ dr)[:, None, None] * B
    H = 0.5 * (H + np.conj(np.swapaxes(H, -1, -2))) * scale
    w, U = np.linalg.eigh(H)
    return (U * np.exp(1j * w)[:, None, :]) @ np.conj(np.swapaxes(U, -1, -2))


def winding_map(grid, mass: float = 2.0) -> np.ndarray:
    """Unitary with unit winding: ``d=1`` ``e^{ik}``; ``d=3`` normalised
    ``(m - sum cos k) - i sum sin k_i s_i``."""
    k = grid.points
    if grid.dim == 1:
        return np.exp(1j * k[:, 0])[:, None, None]
    if grid.dim != 3:
        raise ConfigError("winding_map is defined for d = 1 or 3")
    a = mass - np.cos(k).sum(axis=1)
    M = a[:, None, None] * np.eye(2) - 1j * sum(np.sin(k[:, i])[:, None, None] * p
                                              for i, p in enumerate((SX, SY, SZ)))
    norm = np.sqrt(a ** 2 + (np.sin(k) ** 2).sum(axis=1))
    return M / norm[:, None, None]


MODELS = {
    "kitaev": kitaev_chain,
    "pip": chiral_pip,
    "chern": chern_insulator,
    "qsh": qsh_model,
    "dirac": dirac_insulator,
    "translation": lattice_translation,
    "squeezer": boson_squeezer_winding,
    "diii": dIII_wire,
    "ci": cI_model,
    "vacuum": vacuum_couplings,
}

# symmetry class each named model is built to satisfy
MODEL_CLASS = {
    "kitaev": "BDI", "pip": "D", "chern": "A", "qsh": "AII", "dirac": "AII",
    "translation": "A", "diii": "DIII", "ci": "CI", "vacuum": "A",
}


def build_model(name: str, **params) -> RealSpaceCouplings:
    try:
        fn = MODELS[name]
    except KeyError:
        raise ConfigError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None
    try:
        return fn(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for model {name!r}: {exc}") from None
