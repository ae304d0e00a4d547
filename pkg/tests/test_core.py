import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gausstopo.bz_grid import make_grid
from gausstopo.core import (MatrixField, RealSpaceCouplings, apply_op, constant_field, decay_profile,
                            direct_sum, fermion_vacuum, fourier, ground_state_covariance, identity_op,
                            inverse_fourier, stack_with_ancilla, truncation_residual, validate,
                            vacuum_state)
from gausstopo.errors import ConfigError, GapError
from gausstopo.invariants import winding_number
from gausstopo.models import kitaev_chain, random_boson_state_field, random_op_field
from gausstopo.symmetry import extract_state

SZ = np.diag([1.0, -1.0])


def kitaev_state(grid, mu=1.0):
    return ground_state_covariance(fourier(kitaev_chain(mu=mu), grid))


def test_fourier_constant_term():
    g = make_grid(1, 8)
    b = np.array([[0, 1], [1, 0]], complex)
    c = RealSpaceCouplings(1, "fermion", "hamiltonian", 1, {(0,): b})
    assert np.allclose(fourier(c, g).values, b)


def test_fourier_kitaev_known_form():
    g = make_grid(1, 16)
    h = fourier(kitaev_chain(), g).values
    k = g.points[:, 0]
    # bulk spectrum of the Kitaev chain at mu = t = Delta = 1
    e = np.linalg.eigvalsh(h)
    expect = np.sqrt((2 * np.cos(k) + 1) ** 2 + (2 * np.sin(k)) ** 2)
    assert np.allclose(np.sort(np.abs(e), axis=1), np.stack([expect, expect], 1) * np.abs(e).max() / expect.max())


def test_fourier_roundtrip():
    g = make_grid(1, 16)
    c = kitaev_chain()
    back = inverse_fourier(fourier(c, g), max_range=1)
    for dr, b in c.terms.items():
        assert np.abs(back.block(dr) - b).max() < 1e-12
    assert set(back.terms) <= set(c.terms)


def test_constant_field_inverse_single_term():
    g = make_grid(2, 6)
    back = inverse_fourier(constant_field(g, np.eye(2), "fermion-op"), max_range=2)
    assert list(back.terms) == [(0, 0)]


def test_truncation_residual_reported():
    g = make_grid(1, 32)
    st = kitaev_state(g, mu=1.5)
    assert truncation_residual(st, 1) > truncation_residual(st, 6) > 0


def test_validate_fermion_examples():
    g = make_grid(1, 8)
    assert validate(vacuum_state(g, 2)).passed
    assert validate(kitaev_state(g)).passed
    bad = constant_field(g, 2 * fermion_vacuum(1), "fermion-state")
    assert not validate(bad).passed


def test_validate_boson_examples():
    g = make_grid(1, 8)
    r = 0.7
    assert validate(constant_field(g, np.diag([np.exp(2 * r), np.exp(-2 * r)]), "boson-state")).passed
    rep = validate(constant_field(g, 2 * np.eye(2), "boson-state"))
    assert not rep.passed and rep.violations["symplectic_flatness"] > 1


def test_validate_ops():
    g = make_grid(1, 8)
    assert validate(identity_op(g, 2)).passed
    assert validate(constant_field(g, np.diag([2.0, 0.5]), "boson-op")).passed
    assert validate(random_op_field(g, 2, seed=1)).passed


def test_ground_state_examples():
    g = make_grid(1, 8)
    h = constant_field(g, SZ, "hamiltonian")
    assert np.allclose(1j * ground_state_covariance(h).values, SZ)
    st = kitaev_state(make_grid(1, 64))
    assert winding_number(MatrixField(st.grid, extract_state(st, "BDI"))).value == 1
    with pytest.raises(GapError):
        ground_state_covariance(fourier(kitaev_chain(mu=2.0), make_grid(1, 8)))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1, 2]))
def test_state_properties(seed, dim):
    g = make_grid(dim, 8)
    s = apply_op(random_op_field(g, 2, seed=seed), vacuum_state(g, 2))
    G = s.values
    assert np.abs(G @ G + np.eye(4)).max() < 1e-9
    assert np.abs(np.conj(G) - G[g.negation]).max() < 1e-9
    b = random_boson_state_field(g, 2, seed=seed)
    sig = np.kron(np.array([[0, 1], [-1, 0]]), np.eye(2))
    assert np.linalg.eigvalsh(b.values).min() > 0
    assert np.abs(b.values @ sig @ b.values - sig).max() < 1e-9


def test_apply_op_preserves_validity():
    g = make_grid(2, 6)
    s = kitaev_state(make_grid(1, 8))
    assert validate(apply_op(identity_op(s.grid, 1), s)).passed
    vac = vacuum_state(g, 2)
    for seed in range(10):
        out = apply_op(random_op_field(g, 2, seed=seed, max_range=2), vac)
        assert validate(out, 1e-12).passed
    bvac = vacuum_state(g, 1, "boson")
    assert validate(apply_op(random_op_field(g, 1, seed=3, particle="boson", scale=0.3), bvac)).passed


def test_apply_op_particle_mismatch():
    g = make_grid(1, 4)
    with pytest.raises(ConfigError):
        apply_op(identity_op(g, 1, "boson"), vacuum_state(g, 1))


def test_ground_state_squares_to_minus_one():
    st = kitaev_state(make_grid(1, 32), mu=0.3)
    assert np.abs(st.values @ st.values + np.eye(2)).max() < 1e-12


def test_decay_profile():
    g = make_grid(1, 64)
    assert decay_profile(constant_field(g, np.eye(2), "fermion-op")).zero_range
    terms = {(r,): np.exp(-abs(r) / 2) * np.eye(2) for r in range(-10, 11)}
    est = decay_profile(RealSpaceCouplings(1, "fermion", "hamiltonian", 1, terms))
    assert abs(est.length - 2) < 0.1
    fin = decay_profile(fourier(kitaev_chain(), g), max_range=8)
    assert not fin.zero_range and fin.length < 0.5 and fin.residual > 1


def test_stack_with_ancilla():
    g = make_grid(1, 64)
    s = kitaev_state(g)
    assert validate(stack_with_ancilla(s, fermion_vacuum(1))).passed
    assert validate(stack_with_ancilla(identity_op(g, 1), np.eye(2))).passed
    ss = direct_sum(s, s)
    assert winding_number(MatrixField(g, extract_state(ss, "BDI"))).value == 2
    with pytest.raises(ConfigError):
        stack_with_ancilla(s, 2 * fermion_vacuum(1))


def test_stack_associative_and_commutes_with_ops():
    g = make_grid(1, 8)
    a, b, c = (apply_op(random_op_field(g, 1, seed=s), vacuum_state(g, 1)) for s in (1, 2, 3))
    assert np.allclose(direct_sum(direct_sum(a, b), c).values, direct_sum(a, direct_sum(b, c)).values)
    va, vb = random_op_field(g, 1, seed=4), random_op_field(g, 1, seed=5)
    lhs = apply_op(direct_sum(va, vb), direct_sum(a, b))
    rhs = direct_sum(apply_op(va, a), apply_op(vb, b))
    assert np.allclose(lhs.values, rhs.values)
