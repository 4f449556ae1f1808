import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from snss.coda import clr, combined_loadings, ilr_pivot, moving_block_variance, pivot_contrast
from snss.errors import DataError

compositions = st.integers(2, 20).flatmap(
    lambda m: arrays(np.float64, (3, m), elements=st.floats(1e-3, 1e3))
)


def test_clr_examples():
    np.testing.assert_allclose(clr([[1.0, 1.0, 1.0]]), [[0.0, 0.0, 0.0]], atol=1e-16)
    np.testing.assert_allclose(clr([[np.e, 1.0, 1.0]]), [[2 / 3, -1 / 3, -1 / 3]], rtol=1e-15)


def test_ilr_examples():
    z, _ = ilr_pivot([[1.0, 1.0, 1.0]])
    np.testing.assert_allclose(z, [[0.0, 0.0]], atol=1e-16)
    z, _ = ilr_pivot([[3.0, 5.0]])
    assert z[0, 0] == pytest.approx(np.sqrt(0.5) * np.log(3 / 5), rel=1e-14)
    z, _ = ilr_pivot([[np.e, 1.0, 1.0]])
    np.testing.assert_allclose(z, [[np.sqrt(2 / 3), 0.0]], atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(compositions)
def test_clr_ilr_identities(comp):
    c = clr(comp)
    z, v = ilr_pivot(comp)
    m = comp.shape[1]
    assert z.shape == (3, m - 1)
    np.testing.assert_allclose(c.sum(axis=1), 0, atol=1e-12)
    np.testing.assert_allclose(c @ v, z, atol=1e-12)
    np.testing.assert_allclose(z @ v.T, c, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(z, axis=1), np.linalg.norm(c, axis=1), atol=1e-12)


@pytest.mark.parametrize("m", [2, 3, 7, 18])
def test_contrast_orthonormal(m):
    v = pivot_contrast(m)
    np.testing.assert_allclose(v.T @ v, np.eye(m - 1), atol=1e-12)
    np.testing.assert_allclose(v.sum(axis=0), 0, atol=1e-12)


def test_scale_invariance(rng):
    comp = rng.uniform(0.1, 5, size=(4, 6))
    np.testing.assert_allclose(ilr_pivot(comp * 7.5)[0], ilr_pivot(comp)[0], atol=1e-13)


def test_combined_loadings(rng):
    comp = rng.uniform(0.1, 5, size=(50, 6))
    z, v = ilr_pivot(comp)
    np.testing.assert_allclose(combined_loadings(np.eye(5), v), v.T)
    w = rng.normal(size=(5, 5))
    load = combined_loadings(w, v)
    np.testing.assert_allclose(load.sum(axis=1), 0, atol=1e-12)
    np.testing.assert_allclose(clr(comp) @ load.T, z @ w.T, atol=1e-10)
    with pytest.raises(DataError):
        combined_loadings(np.eye(4), v)


def test_rejects_non_positive():
    with pytest.raises(DataError):
        clr([[1.0, 0.0, 2.0]])
    with pytest.raises(DataError):
        ilr_pivot([[1.0]])


def test_varmap_constant_scores(rng):
    coords = rng.uniform(0, 10, size=(300, 2))
    vm = moving_block_variance(np.full(300, 4.2), coords)
    populated = vm.count >= 2
    assert populated.any()
    np.testing.assert_array_equal(vm.variance[populated], 0.0)


def test_varmap_single_covering_cell():
    coords = np.array([[0.0, 0.0], [0.2, 0.1], [0.1, 0.3], [0.3, 0.3]])
    s = np.array([1.0, 4.0, 2.0, 8.0])
    vm = moving_block_variance(s, coords, grid_res=1.0, block_size=3.0)
    assert vm.cell_x.tolist() == [0.0] and vm.cell_y.tolist() == [0.0]
    assert vm.count[0, 0] == 4
    assert vm.variance[0, 0] == pytest.approx(np.var(s, ddof=1), rel=1e-15)


def test_varmap_edge_convention():
    # cells at 0 and 2 with block 2: [-1, 1) and [1, 3)
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.5, 0.0]])
    vm = moving_block_variance(np.array([1.0, 2.0, 3.0, 5.0]), coords, grid_res=2.0, block_size=2.0)
    assert vm.cell_x.tolist() == [0.0, 2.0]
    # x = 1 belongs to the upper block only
    assert vm.count[0].tolist() == [2, 2]
    assert vm.variance[0, 0] == pytest.approx(np.var([1.0, 5.0], ddof=1))
    assert vm.variance[0, 1] == pytest.approx(np.var([2.0, 3.0], ddof=1))


def test_varmap_grid_and_empty_cells():
    coords = np.array([[0.0, 0.0], [0.5, 0.5], [10.0, 10.0], [9.5, 9.5]])
    vm = moving_block_variance(np.array([1.0, 2.0, 3.0, 4.0]), coords, grid_res=1.0, block_size=3.0)
    assert vm.cell_x.size == 11 and vm.cell_y.size == 11
    assert vm.count[5, 5] == 0 and np.isnan(vm.variance[5, 5])
    rows = list(vm.rows())
    assert len(rows) == 121
    assert rows[5 * 11 + 5] == (5.0, 5.0, 0, None)


def test_varmap_validation():
    with pytest.raises(ValueError):
        moving_block_variance([1.0], [[0.0, 0.0]], grid_res=0)
    with pytest.raises(DataError):
        moving_block_variance([1.0, 2.0], [[0.0, 0.0]])
