import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gausstopo.bz_grid import GridError, make_grid, negate_index, trim_points
from gausstopo.errors import ConfigError

even_sizes = st.integers(2, 8).map(lambda s: 2 * s)


def test_points_half_open():
    g = make_grid(1, 4)
    assert np.allclose(np.sort(g.points[:, 0]), [-np.pi / 2, 0, np.pi / 2, np.pi])


def test_scalar_sizes_repeat():
    assert make_grid(3, 6).sizes == (6, 6, 6)


@pytest.mark.parametrize("sizes", [3, 2, 5, (4, 7)])
def test_bad_sizes(sizes):
    with pytest.raises(GridError):
        make_grid(2 if isinstance(sizes, tuple) else 1, sizes)


def test_bad_dim_is_config_error():
    with pytest.raises(ConfigError):
        make_grid(4, 4)


@pytest.mark.parametrize("dim,count", [(1, 2), (2, 4), (3, 8)])
def test_trim_count(dim, count):
    g = make_grid(dim, 6)
    t = trim_points(g)
    assert len(t) == count
    assert np.allclose(np.abs(g.points[t]) % np.pi, 0)


def test_negate_examples():
    g = make_grid(1, 8)
    k = g.points[:, 0]
    for val, want in [(0.0, 0.0), (np.pi, np.pi), (np.pi / 2, -np.pi / 2)]:
        i = int(np.argmin(np.abs(k - val)))
        assert np.isclose(k[negate_index(g, i)], want)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.data())
def test_negation_involution_and_trim(dim, data):
    sizes = [data.draw(even_sizes) for _ in range(dim)]
    g = make_grid(dim, sizes)
    neg = g.negation
    assert np.array_equal(neg[neg], np.arange(g.npoints))
    assert set(np.flatnonzero(neg == np.arange(g.npoints))) == set(g.trim_points())
    kk = g.points + g.points[neg]
    assert np.allclose(np.sin(kk), 0) and np.allclose(np.cos(kk), 1)


def test_plaquettes_cover_faces():
    g = make_grid(3, (4, 6, 8))
    for mu, nu in g.axis_pairs():
        plaqs = list(g.plaquettes((mu, nu)))
        assert len(plaqs) == g.npoints
        assert len({p.base for p in plaqs}) == g.npoints
        p = plaqs[0]
        assert p.corners[1] == g.shift(mu)[p.base]
        assert p.corners[3] == g.shift(nu)[p.base]


def test_plaquette_axes_validated():
    with pytest.raises(GridError):
        next(make_grid(2, 4).plaquettes((0, 0)))


def test_index_roundtrip():
    g = make_grid(2, (4, 6))
    assert np.array_equal(g.index(g.labels), np.arange(g.npoints))
    assert g.index([-1, -1]) == g.index([3, 5])
