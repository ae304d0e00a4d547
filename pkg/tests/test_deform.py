import numpy as np
import pytest

from gausstopo.bz_grid import make_grid
from gausstopo.core import MatrixField, constant_field, symplectic_form, validate, vacuum_state
from gausstopo.deform import (FieldPath, connect_states, convergence_order, reconstruction_residual,
                              state_path, trivialize_boson_state, unitarize_boson_op_path, validate_path)
from gausstopo.errors import ConfigError, ConvergenceError, DomainError
from gausstopo.invariants import winding_number
from gausstopo.models import kitaev_chain, random_boson_state_field, random_op_field
from gausstopo.symmetry import boson_op_from_u, check_all, class_symmetries, extract_state


def kitaev_winding(f):
    return winding_number(MatrixField(f.grid, extract_state(f, "BDI"))).value


def test_trivialize_vacuum_is_constant():
    g = make_grid(1, 8)
    path = trivialize_boson_state(vacuum_state(g, 1, "boson"), steps=10)
    assert np.allclose(path.stack(), np.eye(2))


def test_trivialize_squeezed_analytic():
    g = make_grid(1, 8)
    r = 0.3
    path = trivialize_boson_state(constant_field(g, np.diag([np.exp(2 * r), np.exp(-2 * r)]), "boson-state"), 20)
    for lam, f in zip(path.lambdas, path.fields):
        want = np.diag([np.exp(2 * r * (1 - lam)), np.exp(-2 * r * (1 - lam))])
        assert np.allclose(f.values, want, atol=1e-13)


def test_trivialize_random_states():
    g = make_grid(2, 8)
    for seed in range(5):
        path = trivialize_boson_state(random_boson_state_field(g, 2, seed=seed))
        assert validate_path(path, locality=False).passed
        assert np.abs(path.end.values - np.eye(4)).max() < 1e-12


def test_trivialize_rejects_fermions_and_bad_input():
    g = make_grid(1, 8)
    with pytest.raises(ConfigError):
        trivialize_boson_state(vacuum_state(g, 1))
    with pytest.raises(DomainError):
        trivialize_boson_state(constant_field(g, -np.eye(2), "boson-state"))


def test_unitarize_examples():
    g = make_grid(1, 8)
    U = boson_op_from_u(g, np.exp(1j * g.points[:, 0])[:, None, None])
    path = unitarize_boson_op_path(U, 5)
    assert all(np.allclose(f.values, U.values) for f in path.fields)
    r = 0.5
    path = unitarize_boson_op_path(constant_field(g, np.diag([np.exp(r), np.exp(-r)]), "boson-op"), 5)
    assert np.allclose(path.end.values, np.eye(2))
    sigma = symplectic_form(2)
    for seed in range(10):
        end = unitarize_boson_op_path(random_op_field(g, 2, seed=seed, particle="boson"), 4).end.values
        assert np.abs(end @ sigma - sigma @ end).max() < 1e-10
        assert validate(MatrixField(g, end, "boson-op")).passed


def _kitaev_path(grid, steps, lo=0.0, hi=1.0):
    return state_path(lambda lam: kitaev_chain(mu=lo + (hi - lo) * lam), grid, steps)


def test_connect_states_kitaev():
    g = make_grid(1, 32)
    path = _kitaev_path(g, 200)
    op = connect_states(path)
    assert validate(op).violations["unitarity"] < 1e-9
    assert reconstruction_residual(op, path).max() < 1e-6
    # every sample respects the BDI time reversal, so the operation commutes with it
    assert all(c.violation < 1e-8 for c in check_all(op, class_symmetries("BDI", 1)))


def test_connect_states_boson():
    g = make_grid(1, 16)
    st = random_boson_state_field(g, 1, seed=2)
    path = trivialize_boson_state(st, 200)
    op = connect_states(path)
    assert validate(op).passed
    assert reconstruction_residual(op, path).max() < 1e-6


def test_connect_states_detects_failure():
    g = make_grid(1, 16)
    path = _kitaev_path(g, 4, 0.0, 1.8)
    with pytest.raises(ConvergenceError):
        connect_states(path, path_tol=1e-12)


def test_convergence_order():
    g = make_grid(1, 32)
    order = convergence_order(lambda m: _kitaev_path(g, m), (40, 80, 160))
    assert order >= 3.5
    with pytest.raises(ConfigError):
        convergence_order(lambda m: _kitaev_path(g, m), (40, 60, 160))


def test_validate_path_flags_corruption():
    g = make_grid(1, 8)
    path = trivialize_boson_state(random_boson_state_field(g, 1, seed=0), 10)
    path.fields[4] = path.fields[4].with_values(2 * path.fields[4].values)
    rep = validate_path(path)
    assert rep.failed == [4] and not rep.passed


def test_validate_path_detects_phase_transition():
    g = make_grid(1, 64)
    path = _kitaev_path(g, 50, 1.0, 3.1)
    rep = validate_path(path, class_symmetries("BDI", 1), invariant=kitaev_winding)
    assert rep.passed
    assert rep.invariant_jump and rep.endpoint_invariants == (1, 0)


def test_field_path_roundtrip_and_checks():
    g = make_grid(1, 8)
    path = trivialize_boson_state(random_boson_state_field(g, 1, seed=1), 3)
    back = FieldPath.from_dict(path.to_dict())
    assert np.allclose(back.stack(), path.stack())
    with pytest.raises(ConfigError):
        FieldPath([0.0, 0.0], path.fields[:2], path.role)
    with pytest.raises(ConfigError):
        FieldPath([0.0], path.fields[:1], path.role)
