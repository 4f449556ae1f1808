import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import norm

from snss.errors import ConfigError, DataError, EmptyBlockError
from snss.geometry import (
    GAUSS_Q,
    F0,
    Ball,
    Gauss,
    GridBlocks,
    HalveX,
    HalveY,
    NearestCenters,
    Rect,
    Ring,
    gen_skewed_coords,
    gen_uniform_coords,
    kernel_weight,
    make_partition,
    parse_kernel,
    parse_partition,
)

finite = st.floats(-50, 50, allow_nan=False)
kernels = st.one_of(
    st.floats(0, 10).map(Ball),
    st.tuples(st.floats(0, 5), st.floats(0.01, 5)).map(lambda t: Ring(t[0], t[0] + t[1])),
    st.floats(0.01, 10).map(Gauss),
    st.just(F0()),
)


def test_uniform_coords_shape_and_range():
    c = gen_uniform_coords(20, 1)
    assert c.shape == (400, 2)
    assert np.all((c >= 0) & (c <= 20))


def test_uniform_coords_smallest_case():
    c = gen_uniform_coords(1, 3)
    assert c.shape == (1, 2)
    assert np.all((c >= 0) & (c <= 1))


def test_coords_deterministic():
    np.testing.assert_array_equal(gen_uniform_coords(7, 42), gen_uniform_coords(7, 42))
    np.testing.assert_array_equal(gen_skewed_coords(7, 42), gen_skewed_coords(7, 42))
    assert not np.array_equal(gen_uniform_coords(7, 42), gen_uniform_coords(7, 43))


def test_skewed_coords_moments():
    c = gen_skewed_coords(30, 5) / 30
    assert c.shape == (900, 2)
    assert abs(c[:, 0].mean() - 2 / 7) < 0.02
    assert abs(c[:, 1].mean() - 0.5) < 0.02
    assert np.all((c >= 0) & (c <= 1))


def test_n_side_must_be_positive():
    with pytest.raises(ValueError):
        gen_uniform_coords(0, 1)


def test_grid_quadrant_centers():
    pts = np.array([[0.5, 0.5], [1.5, 0.5], [0.5, 1.5], [1.5, 1.5]])
    part = make_partition(pts, GridBlocks(2, 2), Rect.square(2))
    assert part.n_blocks == 4
    assert sorted(part.labels.tolist()) == [0, 1, 2, 3]
    assert all(len(b) == 1 for b in part.blocks())


def test_grid_boundary_convention():
    # interior boundary goes to the upper cell, the upper domain edge stays in the last cell
    pts = np.array([[1.0, 0.2], [2.0, 0.2], [0.0, 2.0], [0.5, 0.5]])
    part = make_partition(pts, GridBlocks(2, 2), Rect.square(2), require_nonempty=False)
    assert part.labels.tolist() == [1, 1, 2, 0]


def test_nearest_centers():
    centers = NearestCenters(((0.0, 0.0), (10.0, 0.0)))
    part = make_partition(np.array([[4.0, 0.0], [5.0, 0.0], [7.0, 1.0]]), centers, require_nonempty=False)
    # (5, 0) is a tie, resolved to the lower center index
    assert part.labels.tolist() == [0, 0, 1]


def test_halves():
    pts = np.array([[1.0, 3.0], [3.0, 1.0]])
    dom = Rect.square(4)
    assert make_partition(pts, HalveX(), dom).labels.tolist() == [0, 1]
    assert make_partition(pts, HalveY(), dom).labels.tolist() == [1, 0]


def test_grid_one_by_one_single_block():
    c = gen_uniform_coords(5, 0)
    part = make_partition(c, GridBlocks(1, 1), Rect.square(5))
    assert part.n_blocks == 1 and np.all(part.labels == 0)


@pytest.mark.parametrize("spec", [HalveX(), HalveY(), GridBlocks(3, 2), GridBlocks(4, 4)])
def test_partition_disjoint_cover(spec):
    c = gen_uniform_coords(12, 9)
    part = make_partition(c, spec, Rect.square(12))
    idx = np.concatenate(part.blocks())
    assert sorted(idx.tolist()) == list(range(len(c)))


def test_empty_block_reported():
    pts = np.array([[0.1, 0.1], [0.2, 0.3]])
    with pytest.raises(EmptyBlockError) as err:
        make_partition(pts, GridBlocks(2, 2), Rect.square(2))
    assert err.value.block == 1


def test_point_outside_domain():
    with pytest.raises(DataError):
        make_partition(np.array([[3.0, 0.0]]), HalveX(), Rect.square(2))


def test_center_validation():
    with pytest.raises(ConfigError):
        NearestCenters(((1.0, 1.0), (1.0, 1.0)))
    with pytest.raises(ConfigError):
        NearestCenters(((1.0, 1.0),))


def test_kernel_examples():
    assert kernel_weight(Ball(2), (1, 1)) == 1.0
    assert kernel_weight(Ring(0, 2), (0, 0)) == 0.0
    assert kernel_weight(Ring(0, 2), (2, 0)) == 1.0
    assert kernel_weight(F0(), (0, 0)) == 1.0
    assert kernel_weight(F0(), (1e-9, 0)) == 0.0


def test_gauss_kernel_against_independent_quantile():
    q = norm.ppf(0.95)
    assert GAUSS_Q == pytest.approx(q, rel=1e-15)
    assert kernel_weight(Gauss(2), (2, 0)) == pytest.approx(np.exp(-0.5 * q * q), rel=1e-14)
    assert kernel_weight(Gauss(2), (2, 0)) == pytest.approx(0.2585227122870805, abs=1e-15)


def test_kernel_parameter_validation():
    with pytest.raises(ConfigError):
        Ring(2, 1)
    with pytest.raises(ConfigError):
        Gauss(0)
    with pytest.raises(ConfigError):
        Ball(-1)


@given(kernels, finite, finite)
def test_kernels_isotropic(spec, dx, dy):
    assert kernel_weight(spec, (dx, dy)) == kernel_weight(spec, (-dx, -dy))


@given(finite, finite)
def test_ball_zero_equals_f0(dx, dy):
    assert kernel_weight(Ball(0), (dx, dy)) == kernel_weight(F0(), (dx, dy))


@pytest.mark.parametrize(
    "text, expected",
    [("ball:2", Ball(2)), ("ring:0:1.5", Ring(0, 1.5)), ("gauss:3", Gauss(3)), ("f0", F0())],
)
def test_parse_kernel(text, expected):
    assert parse_kernel(text) == expected
    assert parse_kernel(expected.label) == expected


def test_parse_partition():
    assert parse_partition("grid:3x2") == GridBlocks(3, 2)
    assert parse_partition("halve-x") == HalveX()
    with pytest.raises(ConfigError):
        parse_partition("grid:3")
    with pytest.raises(ConfigError):
        parse_kernel("disk:3")
