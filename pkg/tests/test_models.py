import numpy as np
import pytest

from gausstopo.bz_grid import make_grid
from gausstopo.core import MatrixField, apply_op, fourier, ground_state_covariance, validate
from gausstopo.disentangle import state_invariant
from gausstopo.errors import ConfigError, GapError
from gausstopo.invariants import chern_number, fu_kane_z2, pfaffian_z2, sewing_z2, winding_number
from gausstopo.models import (MODEL_CLASS, MODELS, bdg_to_majorana, boson_squeezer_winding, build_model,
                              cI_model, chern_insulator, chiral_pip, dIII_wire, doubled, kitaev_chain,
                              lattice_translation, qsh_model, random_hamiltonian, random_op_field,
                              random_state, stack_models)
from gausstopo.symmetry import (AZClass, boson_op_u, check_all, class_symmetries, extract_op, extract_state,
                                polar_unitarize)

ZOO_GRIDS = {1: 32, 2: 16, 3: 8}


def as_state(c, grid):
    f = fourier(c, grid)
    return ground_state_covariance(f) if f.role == "hamiltonian" else f


def q_winding(c, grid, az="BDI"):
    return winding_number(MatrixField(grid, extract_state(as_state(c, grid), az))).value


@pytest.mark.parametrize("name", sorted(MODEL_CLASS))
def test_zoo_symmetric_and_valid(name):
    c = build_model(name, **({"dim": 3, "m": 2.0} if name == "dirac" else {}))
    grid = make_grid(c.dim, ZOO_GRIDS[c.dim])
    f = as_state(c, grid)
    assert validate(f, 1e-9).passed
    n = f.n
    checks = check_all(f, class_symmetries(MODEL_CLASS[name], n))
    assert all(ch.passed for ch in checks), [(ch.label, ch.violation) for ch in checks if not ch.passed]


def test_registry_errors():
    with pytest.raises(ConfigError):
        build_model("nope")
    with pytest.raises(ConfigError):
        build_model("kitaev", frequency=3)
    assert set(MODEL_CLASS) <= set(MODELS)


def test_kitaev_examples():
    g = make_grid(1, 64)
    assert q_winding(kitaev_chain(1, 1, 1), g) == 1
    assert q_winding(kitaev_chain(3, 1, 1), g) == 0
    both = stack_models(kitaev_chain(), kitaev_chain())
    assert pfaffian_z2(as_state(both, g)).value == 1


def test_kitaev_phase_diagram():
    g = make_grid(1, 64)
    for mu, want in [(-3.0, 0), (-1.0, 1), (0.5, 1), (1.9, 1), (2.1, 0)]:
        assert q_winding(kitaev_chain(mu=mu), g) == want, mu
    for mu in (2.0, -2.0):
        with pytest.raises(GapError):
            as_state(kitaev_chain(mu=mu), g)
    with pytest.raises(GapError):
        as_state(kitaev_chain(mu=4.0, t=2.0), g)


def test_pip_and_chern_models():
    g = make_grid(2, 24)
    assert chern_number(as_state(chiral_pip(mu=1.0), g)).value == 1
    assert chern_number(as_state(chiral_pip(mu=5.0), g)).value == 0
    assert chern_number(as_state(doubled(chiral_pip(), "D"), g)).value == 2
    h = lambda c: MatrixField(g, extract_state(as_state(c, g), "A"))
    assert chern_number(h(chern_insulator(1.0))).value == 1
    assert chern_number(h(chern_insulator(-3.0))).value == 0
    assert chern_number(h(chern_insulator(1.0, chirality=-1))).value == -1


@pytest.mark.parametrize("shift,want", [(1, 1), (2, 2), (-1, -1)])
def test_translation_windings(shift, want):
    g = make_grid(1, 32)
    op = fourier(lattice_translation(shift=shift), g)
    assert validate(op).passed
    assert winding_number(MatrixField(g, extract_op(op, "A"))).value == want


def test_qsh_examples():
    g = make_grid(2, 24)
    assert fu_kane_z2(as_state(qsh_model(1.0), g)).value == -1
    assert fu_kane_z2(as_state(qsh_model(3.0), g)).value == 1
    assert fu_kane_z2(as_state(doubled(qsh_model(1.0), "AII"), g)).value == 1


def test_squeezer_examples():
    g = make_grid(1, 32)
    w1 = fourier(boson_squeezer_winding(1), g)
    wm = fourier(boson_squeezer_winding(-1), g)
    w0 = fourier(boson_squeezer_winding(0), g)

    def wind(op):
        W, _ = polar_unitarize(op)
        return winding_number(MatrixField(g, boson_op_u(W))).value

    assert (wind(w1), wind(w0)) == (1, 0)
    assert wind(w1.with_values(wm.values @ w1.values)) == 0
    assert validate(w1).passed


def test_bdg_seed_models():
    g = make_grid(1, 32)
    assert sewing_z2(as_state(dIII_wire(1), g), "DIII").value == -1
    assert sewing_z2(as_state(dIII_wire(0), g), "DIII").value == 1
    ci = as_state(cI_model(1), g)
    assert validate(ci).passed
    assert all(c.passed for c in check_all(ci, class_symmetries("CI", ci.n)))
    # d = 1 class CI states are all trivial, so no invariant is reported
    assert state_invariant(ci, "CI") is None
    assert np.abs(as_state(cI_model(0), g).values - as_state(cI_model(0), g).values[0]).max() < 1e-12


def test_bdg_to_majorana_is_hermitian_real():
    c = bdg_to_majorana({(0,): np.array([[0.3]]), (1,): np.array([[-1.0]])}, {(1,): np.array([[0.5]])})
    f = fourier(c, make_grid(1, 8))
    assert validate(f).passed


@pytest.mark.parametrize("az", list(AZClass))
def test_random_draws_valid(az):
    for d in (1, 2):
        for seed in range(3):
            c = random_state(az, d, seed=seed)
            g = make_grid(d, 12)
            st = as_state(c, g)
            assert validate(st).passed
            assert all(ch.passed for ch in check_all(st, class_symmetries(az, st.n)))


def test_random_reproducible():
    a = random_state("DIII", 1, seed=11)
    b = random_state("DIII", 1, seed=11)
    assert a.terms.keys() == b.terms.keys()
    assert all(np.array_equal(a.terms[k], b.terms[k]) for k in a.terms)
    x = random_op_field(make_grid(1, 8), 2, "BDI", seed=4).values
    y = random_op_field(make_grid(1, 8), 2, "BDI", seed=4).values
    assert np.array_equal(x, y)


@pytest.mark.parametrize("az", ["BDI", "AIII", "D", "DIII"])
def test_zero_range_draw_trivial(az):
    g = make_grid(1, 16)
    c = random_state(az, 1, smoothness=0, seed=3)
    assert list(c.terms) == [(0,)]
    inv = state_invariant(as_state(c, g), az)
    assert not inv.nontrivial


def test_random_hamiltonian_bad_n():
    with pytest.raises(ConfigError):
        random_hamiltonian("CII", 1, n=2)


def test_random_ops_symmetric():
    g = make_grid(2, 6)
    for az in AZClass:
        n = 4
        op = random_op_field(g, n, az, seed=1)
        assert validate(op).passed
        assert all(c.passed for c in check_all(op, class_symmetries(az, n)))
    st = apply_op(random_op_field(g, 2, "D", seed=2), as_state(random_state("D", 2, seed=0), g))
    assert validate(st).passed
