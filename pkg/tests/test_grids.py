import numpy as np
import pytest

from g2lab.grids import RadialGrid, fornberg_weights, sinh_graded_nodes


def test_fornberg_reproduces_uniform_central_weights():
    x = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    w = fornberg_weights(0.0, x, 1)[1]
    assert np.allclose(w, [1 / 12, -8 / 12, 0.0, 8 / 12, -1 / 12])


@pytest.mark.parametrize("make", [
    lambda: RadialGrid.uniform(1.0, 3.0, 41),
    lambda: RadialGrid.log_graded(1.0, 3.0, 41),
])
def test_derivatives_fourth_order(make):
    errs = []
    for factor in (1, 2):
        grid = make()
        if factor == 2:
            grid = grid.refine(2)
        f = np.sin(grid.nodes)
        errs.append(np.abs(grid.deriv(f) - np.cos(grid.nodes)).max())
    order = np.log2(errs[0] / errs[1])
    assert order > 3.5


def test_second_derivative_accuracy():
    grid = RadialGrid.uniform(1.0, 3.0, 101)
    f = np.exp(grid.nodes)
    # one-sided boundary stencils carry the largest constant
    assert np.abs(grid.deriv(f, 2) - f).max() < 5e-6
    assert np.abs(grid.deriv(f, 2)[3:-3] - f[3:-3]).max() < 1e-7


def test_grid_invariants():
    with pytest.raises(ValueError):
        RadialGrid(np.linspace(0, 1, 5))
    with pytest.raises(ValueError):
        RadialGrid(np.ones(12))


def test_deriv_applies_to_tensor_profiles():
    grid = RadialGrid.uniform(0.5, 2.0, 33)
    vals = np.stack([np.column_stack([grid.nodes ** 2, grid.nodes ** 3])] * 2, axis=2)
    d = grid.deriv(vals)
    assert np.abs(d[:, 0, 0] - 2 * grid.nodes).max() < 1e-9
    assert np.abs(d[:, 1, 1] - 3 * grid.nodes ** 2).max() < 1e-8


def test_sinh_graded_nodes_cluster_near_center():
    nodes = sinh_graded_nodes(1.0, 40.0, 20.0, 0.5, 201)
    gaps = np.diff(nodes)
    mid = np.argmin(np.abs(nodes - 20.0))
    assert gaps[mid] < gaps[0]
    assert gaps[mid] < gaps[-1]
    assert nodes[0] == 1.0 and nodes[-1] == 40.0
    assert (gaps > 0).all()
