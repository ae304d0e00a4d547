import numpy as np
import pytest

from gausstopo.bz_grid import make_grid
from gausstopo.core import (constant_field, fourier, ground_state_covariance, identity_op,
                            symplectic_form, vacuum_state)
from gausstopo.errors import ConfigError, SymmetryError
from gausstopo.models import kitaev_chain, lattice_translation, random_op_field, random_state
from gausstopo.symmetry import (AZClass, SymmetrySpec, az_class, boson_op_from_u, boson_op_u, check_all,
                                check_emergent, check_op_symmetry, check_state_symmetry, class_symmetries,
                                extract_reduced, hermitianize, hermitianize_report, infer_class,
                                mode_multiple, polar_report, polar_unitarize, reconstruct, swap_matrix,
                                symmetry_matrices)

SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0])
TABLE1 = {
    "A": ("none", True, "none"), "AIII": ("minus", False, "z"), "AI": ("plus", True, "none"),
    "BDI": ("plus", False, "none"), "D": ("none", False, "none"), "DIII": ("minus", False, "none"),
    "AII": ("minus", True, "none"), "CII": ("minus", False, "other"), "C": ("none", False, "full"),
    "CI": ("minus", False, "full"),
}


def _sym(spec, label):
    return next(s for s in symmetry_matrices(spec, 1) if s.label == label)


def test_az_class_bijection():
    seen = {az_class(SymmetrySpec(*row)) for row in TABLE1.values()}
    assert seen == set(AZClass)
    for name, row in TABLE1.items():
        assert az_class(dict(zip(("trs", "u1", "su2"), row))) == AZClass(name)
        assert SymmetrySpec.for_class(name).key == row


def test_spec_examples():
    assert az_class({"trs": "plus", "u1": False, "su2": "none"}) == AZClass.BDI
    assert az_class({"trs": "none", "u1": True, "su2": "none"}) == AZClass.A
    assert az_class({"trs": "minus", "u1": True, "su2": "none"}) == AZClass.AII


@pytest.mark.parametrize("row", [("plus", True, "full"), ("none", True, "z"), ("bogus", False, "none")])
def test_unlisted_specs_rejected(row):
    with pytest.raises(ConfigError):
        SymmetrySpec(*row)


def test_symmetry_matrix_examples():
    assert np.allclose(_sym(SymmetrySpec("plus", True, "none"), "Theta_spinless").matrix, SZ)
    assert np.allclose(_sym(SymmetrySpec("none", True, "none"), "Phi").matrix, 1j * SY)
    rz = next(s for s in symmetry_matrices(SymmetrySpec("minus", False, "z"), 2) if s.label == "R_z")
    assert np.allclose(rz.matrix, np.kron(1j * SY, SZ))


def test_square_signs():
    syms = {s.label: s for s in class_symmetries("CI", 2)}
    assert syms["Theta_spinhalf"].square_sign == -1
    assert syms["Phi" if "Phi" in syms else "R_z"].square_sign == -1
    assert {s.label: s for s in class_symmetries("BDI", 1)}["Theta_spinless"].square_sign == 1


def test_mode_multiple_enforced():
    with pytest.raises(ConfigError):
        class_symmetries("CII", 2)


def test_state_checks():
    g = make_grid(1, 16)
    kit = ground_state_covariance(fourier(kitaev_chain(), g))
    phi = _sym(SymmetrySpec("none", True, "none"), "Phi")
    theta = _sym(SymmetrySpec("plus", False, "none"), "Theta_spinless")
    assert check_state_symmetry(vacuum_state(g, 1), phi).passed
    assert check_state_symmetry(kit, theta).passed
    bad = check_state_symmetry(kit, phi)
    assert not bad.passed and bad.violation > 0.1


def test_op_checks():
    g = make_grid(1, 16)
    theta = _sym(SymmetrySpec("plus", False, "none"), "Theta_spinless")
    phi = _sym(SymmetrySpec("none", True, "none"), "Phi")
    assert all(c.passed for c in check_all(identity_op(g, 2), class_symmetries("CI", 2)))
    assert check_op_symmetry(fourier(lattice_translation(), g), theta).passed
    failures = sum(not check_op_symmetry(random_op_field(g, 1, seed=s), phi).passed for s in range(10))
    assert failures >= 9


def test_emergent():
    g = make_grid(1, 16)
    kit = ground_state_covariance(fourier(kitaev_chain(), g))
    rep = check_emergent(kit)
    assert rep["holds"]["phs"] and rep["holds"]["sls_spinless"] and not rep["holds"]["u1"]
    st = ground_state_covariance(fourier(random_state("A", 1, seed=2), g))
    assert check_emergent(st)["holds"]["u1"]


def test_infer_class():
    g = make_grid(1, 16)
    assert infer_class(ground_state_covariance(fourier(kitaev_chain(), g))) == AZClass.BDI
    assert infer_class(vacuum_state(g, 2)) == AZClass.CI


def _random_symmetric_state(az, grid, seed):
    return ground_state_covariance(fourier(random_state(az, grid.dim, seed=seed), grid))


@pytest.mark.parametrize("az", list(AZClass))
def test_state_reduced_roundtrip(az):
    g = make_grid(1, 12)
    st = _random_symmetric_state(az, g, seed=5)
    red = extract_reduced(st, az)
    assert np.abs(reconstruct(red).values - st.values).max() < 1e-10


@pytest.mark.parametrize("az", list(AZClass))
def test_op_reduced_roundtrip(az):
    g = make_grid(1, 12)
    n = 2 * mode_multiple(az)
    op = random_op_field(g, n, az, seed=7)
    assert all(c.passed for c in check_all(op, class_symmetries(az, n)))
    red = extract_reduced(op, az)
    assert np.abs(reconstruct(red).values - op.values).max() < 1e-10


def test_extract_rejects_wrong_class():
    g = make_grid(1, 12)
    kit = ground_state_covariance(fourier(kitaev_chain(), g))
    with pytest.raises(SymmetryError):
        extract_reduced(kit, "A")


def test_swap_matrix_is_involutive_permutation():
    S = swap_matrix(2)
    assert np.allclose(S @ S, np.eye(8))
    assert set(np.unique(S)) <= {0.0, 1.0}


def test_hermitianize():
    g = make_grid(1, 32)
    X = hermitianize(identity_op(g, 1))
    assert np.allclose(X.values, np.kron(np.array([[0, 1], [1, 0]]), np.eye(2)))
    for seed in range(5):
        rep = hermitianize_report(hermitianize(random_op_field(g, 2, seed=seed)))
        assert max(rep.values()) < 1e-10


def test_hermitianize_translation_cross_check():
    from gausstopo.invariants import hermitianized_cs
    g = make_grid(1, 64)
    op = fourier(lattice_translation(), g)
    assert abs(hermitianized_cs(op)) > 0.1


def test_polar_examples():
    g = make_grid(1, 8)
    r = 0.4
    V = constant_field(g, np.diag([np.exp(r), np.exp(-r)]), "boson-op")
    W, P = polar_unitarize(V)
    assert np.allclose(W.values, np.eye(2)) and np.allclose(P.values, V.values)
    u = np.exp(1j * g.points[:, 0])[:, None, None]
    U = boson_op_from_u(g, u)
    W, P = polar_unitarize(U)
    assert np.allclose(W.values, U.values) and np.allclose(P.values, np.eye(2))
    assert np.allclose(boson_op_u(W), u)


def test_polar_random_samples():
    g = make_grid(1, 8)
    worst = 0.0
    for seed in range(100):
        op = random_op_field(g, 2, seed=seed, particle="boson", scale=0.5)
        W, P = polar_unitarize(op)
        rep = polar_report(op, W, P)
        assert rep["p_min_eigenvalue"] > 0
        worst = max(worst, rep["unitarity"], rep["w_symplectic"], rep["w_commutes_sigma"], rep["factorization"])
    assert worst < 1e-10
    assert symplectic_form(2).shape == (4, 4)
