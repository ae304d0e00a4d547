import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import block_diag
from scipy.stats import unitary_group

from gausstopo.bz_grid import make_grid
from gausstopo.core import MatrixField, apply_op, direct_sum, fourier, ground_state_covariance, vacuum_state
from gausstopo.deform import connect_states, state_path
from gausstopo.errors import ConfigError
from gausstopo.invariants import (chern_number, chern_number_from_h, chern_simons_halfint, default_cs_mass, fu_kane_z2,
                                  pfaffian, pfaffian_bruteforce, pfaffian_z2, q_pfaffian_z2, sewing_z2,
                                  strong_index_3d, wilson_loop_z2, winding_number)
from gausstopo.models import (chern_insulator, chiral_pip, dIII_wire, dirac_insulator, doubled, kitaev_chain,
                              qsh_model, random_state, random_unitary_field, stack_models, trivial_insulator,
                              winding_map)
from gausstopo.symmetry import extract_state


def state(c, grid):
    f = fourier(c, grid)
    return ground_state_covariance(f) if f.role == "hamiltonian" else f


def reduced_h(c, grid):
    return MatrixField(grid, extract_state(state(c, grid), "A"))


# --- Pfaffian -----------------------------------------------------------------


def test_pfaffian_examples():
    assert pfaffian(np.array([[0.0, 1.0], [-1.0, 0.0]])) == pytest.approx(1)
    assert pfaffian(np.array([[0.0, -1.0], [1.0, 0.0]])) == pytest.approx(-1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**31))
def test_pfaffian_squared_is_det(half, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((2 * half, 2 * half))
    A = a - a.T
    pf = pfaffian(A)
    det = np.linalg.det(A)
    assert abs(pf ** 2 - det) <= 1e-8 * max(1.0, abs(det))


def test_pfaffian_matches_bruteforce():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((6, 6))
    assert pfaffian(a - a.T) == pytest.approx(pfaffian_bruteforce(a - a.T))


def test_pfaffian_z2_examples():
    g = make_grid(1, 32)
    assert pfaffian_z2(vacuum_state(g, 1)).value == 1
    kit = state(kitaev_chain(), g)
    assert pfaffian_z2(kit).value == -1
    assert pfaffian_z2(state(kitaev_chain(mu=3.0), g)).value == 1
    assert pfaffian_z2(direct_sum(kit, kit)).value == 1


def test_pfaffian_oracle_at_trim():
    # explicit 2x2 blocks at k = 0, pi: the Pfaffian is the (0, 1) entry, taken relative to the vacuum
    g = make_grid(1, 16)
    G = state(kitaev_chain(), g).values
    vac = vacuum_state(g, 1).values[0]
    signs = [np.sign(G[i][0, 1].real) * np.sign(vac[0, 1].real) for i in g.trim_points()]
    assert pfaffian_z2(state(kitaev_chain(), g)).value == int(np.prod(signs))


# --- Chern ----------------------------------------------------------------------


def test_chern_examples():
    g = make_grid(2, 24)
    assert chern_number(reduced_h(chern_insulator(1.0), g)).value == 1
    assert chern_number(reduced_h(chern_insulator(3.0), g)).value == 0
    assert chern_number(reduced_h(chern_insulator(1.0, chirality=-1), g)).value == -1
    assert chern_number(state(chiral_pip(mu=5.0), g)).value == 0


def test_chern_integer_and_gauge_invariant():
    g = make_grid(2, 12)
    h = reduced_h(chern_insulator(1.0), g)
    res = chern_number(h)
    assert res.raw == pytest.approx(round(res.raw), abs=1e-10)
    U = unitary_group.rvs(2, random_state=1)
    rot = MatrixField(g, U @ h.values @ U.conj().T)
    assert chern_number(rot).raw == pytest.approx(res.raw, abs=1e-10)


def test_chern_continuum_cross_check():
    g = make_grid(2, 64)
    assert chern_number_from_h(reduced_h(chern_insulator(1.0), g)) == pytest.approx(1, abs=1e-3)


def test_chern_additive():
    g = make_grid(2, 16)
    a, b = state(chiral_pip(), g), state(chiral_pip(chirality=-1), g)
    assert chern_number(direct_sum(a, a)).value == 2
    assert chern_number(direct_sum(a, b)).value == 0


# --- winding ----------------------------------------------------------------------


def test_winding_convention():
    g = make_grid(1, 16)
    e = np.exp(1j * g.points[:, 0])[:, None, None]
    assert winding_number(MatrixField(g, e)).value == 1
    assert winding_number(MatrixField(g, e ** 3)).value == 3


@pytest.mark.parametrize("seed", range(5))
def test_winding_additive_d1(seed):
    g = make_grid(1, 64)
    e = np.exp(1j * g.points[:, 0])
    q1 = random_unitary_field(g, 2, 1, seed=seed) * e[:, None, None]
    q2 = random_unitary_field(g, 2, 1, seed=seed + 100)
    w = [winding_number(MatrixField(g, q)).value for q in (q1, q2, q1 @ q2)]
    assert w[2] == w[0] + w[1]


def test_winding_under_negation():
    g1 = make_grid(1, 32)
    q1 = random_unitary_field(g1, 2, 1, seed=3) * np.exp(1j * g1.points[:, 0])[:, None, None]
    w1 = winding_number(MatrixField(g1, q1)).value
    assert w1 != 0
    assert winding_number(MatrixField(g1, np.conj(q1[g1.negation]))).value == w1
    assert winding_number(MatrixField(g1, np.swapaxes(q1[g1.negation], -1, -2))).value == -w1
    g3 = make_grid(3, 12)
    q3 = winding_map(g3)
    assert winding_number(MatrixField(g3, q3)).value == 1
    assert winding_number(MatrixField(g3, np.conj(q3[g3.negation]))).value == -1
    assert winding_number(MatrixField(g3, np.swapaxes(q3[g3.negation], -1, -2))).value == 1


def test_winding_3d_methods_agree():
    g = make_grid(3, 16)
    q = MatrixField(g, winding_map(g))
    assert winding_number(q, method="richardson").value == 1
    assert winding_number(q, refine=2).quantization_gap < 1e-2


def test_winding_rejects_non_unitary():
    g = make_grid(1, 8)
    with pytest.raises(Exception):
        winding_number(MatrixField(g, 2 * np.ones((8, 1, 1), complex)))


# --- Z2 invariants ---------------------------------------------------------------------


def test_sewing_examples():
    g = make_grid(1, 32)
    wire = state(dIII_wire(), g)
    assert sewing_z2(wire, "DIII").value == -1
    assert sewing_z2(direct_sum(wire, wire), "DIII").value == 1
    assert sewing_z2(state(dIII_wire(w=0), g), "DIII").value == 1
    assert sewing_z2(state(dIII_wire(w=2), g), "DIII").value == 1
    assert q_pfaffian_z2(wire).value == -1


def test_fu_kane_examples():
    g = make_grid(2, 24)
    assert fu_kane_z2(state(qsh_model(1.0), g), "AII").value == -1
    assert fu_kane_z2(state(qsh_model(3.0), g), "AII").value == 1
    assert fu_kane_z2(state(trivial_insulator(2, 2), g), "AII").value == 1
    assert fu_kane_z2(state(doubled(qsh_model(1.0), "AII"), g), "AII").value == 1


@pytest.mark.parametrize("az,seed", [("AII", 0), ("AII", 1), ("AII", 2), ("DIII", 0), ("DIII", 3)])
def test_fu_kane_gauge_robust(az, seed):
    # both contraction axes and the Wilson loop must agree on generic random states
    g = make_grid(2, 24)
    s = state(random_state(az, 2, seed=seed), g)
    vals = {fu_kane_z2(s, az, axis=0).value, fu_kane_z2(s, az, axis=1).value, wilson_loop_z2(s, az).value}
    assert len(vals) == 1


def test_chern_simons_and_strong_index():
    g = make_grid(3, 12)
    topo = state(dirac_insulator(3, 2.0), g)
    triv = state(dirac_insulator(3, 4.0), g)
    assert strong_index_3d(topo, "AII").value == -1
    assert strong_index_3d(triv, "AII").value == 1
    cs = chern_simons_halfint(topo, "AII")
    assert cs.value == -1 and cs.quantization_gap < 1e-2
    assert chern_simons_halfint(triv, "AII").value == 1
    both = state(stack_models(dirac_insulator(3, 2.0), dirac_insulator(3, 2.0)), g)
    mass = block_diag(default_cs_mass(4), default_cs_mass(4))
    assert chern_simons_halfint(both, "AII", mass=mass).value == 1
    with pytest.raises(ConfigError):
        chern_simons_halfint(both, "AII")


def test_invariant_unchanged_by_contractible_op():
    g = make_grid(1, 64)
    path = state_path(lambda lam: kitaev_chain(mu=0.2 + 0.6 * lam), g, 100)
    op = connect_states(path)
    kit = state(kitaev_chain(mu=1.5), g)
    moved = apply_op(op, kit)
    w0 = winding_number(MatrixField(g, extract_state(kit, "BDI"))).value
    w1 = winding_number(MatrixField(g, extract_state(moved, "BDI"))).value
    assert w0 == w1 == 1
    assert pfaffian_z2(moved).value == pfaffian_z2(kit).value
