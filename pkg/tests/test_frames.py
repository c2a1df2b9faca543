"""Frame-calculus tests calibrated against closed-form geometries."""

import numpy as np
import pytest

from g2lab import frames as fr
from g2lab.grids import RadialGrid
from g2lab.links import LinkSpec, iwasawa_link, su2_torus_link, torus_link


def test_link_invariants():
    assert iwasawa_link().jacobi_residual() <= 1e-12
    assert su2_torus_link().jacobi_residual() <= 1e-12
    with pytest.raises(ValueError):
        LinkSpec("bad", np.ones((6, 6, 6)))


def test_unit_round_s3_product_curvature():
    # bi-invariant unit S^3 x T^3 over a trivial radial factor:
    # Ric = 2 delta on the sphere block, scalar curvature 6.
    grid = RadialGrid.uniform(1.0, 2.0, 11)
    geo = fr.LieFrameGeometry(grid, su2_torus_link())
    g = np.tile(np.eye(7), (grid.n, 1, 1))
    zeros = np.zeros_like(g)
    curv = fr.curvature_from_metric(geo, g, dg=zeros, d2g=zeros)
    expected = np.diag([0.0, 2.0, 2.0, 2.0, 0.0, 0.0, 0.0])
    assert np.abs(curv.Ric - expected).max() < 1e-12
    assert np.abs(curv.R - 6.0).max() < 1e-12
    for v in curv.symmetry_residuals().values():
        assert v < 1e-12


def test_flat_product_zero_curvature():
    grid = RadialGrid.uniform(1.0, 2.0, 11)
    geo = fr.LieFrameGeometry(grid, torus_link())
    g = np.tile(np.eye(7), (grid.n, 1, 1))
    curv = fr.curvature_from_metric(geo, g)
    assert np.abs(curv.Riem).max() < 1e-12


def test_warped_torus_matches_closed_form():
    # g = dt^2 + w(t)^2 sum theta_a^2 over the flat torus: in this frame
    # Ric_00 = -6 w''/w and Ric_ab = -(w w'' + 5 w'^2) delta_ab.
    grid = RadialGrid.uniform(1.0, 2.0, 161)
    geo = fr.LieFrameGeometry(grid, torus_link())
    t = grid.nodes
    w = 1.0 + 0.3 * np.sin(t)
    dw = 0.3 * np.cos(t)
    d2w = -0.3 * np.sin(t)
    g = np.zeros((grid.n, 7, 7))
    dg = np.zeros_like(g)
    d2g = np.zeros_like(g)
    g[:, 0, 0] = 1.0
    for a in range(1, 7):
        g[:, a, a] = w ** 2
        dg[:, a, a] = 2 * w * dw
        d2g[:, a, a] = 2 * (dw ** 2 + w * d2w)
    curv = fr.curvature_from_metric(geo, g, dg=dg, d2g=d2g)
    assert np.abs(curv.Ric[:, 0, 0] - (-6 * d2w / w)).max() < 1e-10
    for a in range(1, 7):
        assert np.abs(curv.Ric[:, a, a] - (-(w * d2w + 5 * dw ** 2))).max() < 1e-10


def test_flat_ray_tangential_derivatives():
    grid = RadialGrid.uniform(1.0, 3.0, 41)
    geo = fr.FlatRayGeometry(grid)
    t = grid.nodes
    # scalar: radially invariant function has purely radial differential
    f = t ** 2 / 4.0
    grad = fr.gradient(geo, f)
    assert np.abs(grad[:, 1:]).max() == 0.0
    assert np.abs(grad[:, 0] - t / 2.0).max() < 1e-10
    # flat metric: connection vanishes identically
    eye = np.tile(np.eye(7), (grid.n, 1, 1))
    Gu = fr.christoffels(geo, eye, dg=np.zeros_like(eye))
    assert np.abs(Gu).max() == 0.0
    # Hessian of r^2/4 is g/2; Laplacian is 7/2 (all directions contribute)
    H = fr.hessian_scalar(geo, Gu, f, df=t / 2.0, d2f=np.full(grid.n, 0.5))
    assert np.abs(H - 0.5 * np.eye(7)).max() < 1e-11
    lap = fr.laplacian_scalar(geo, Gu, eye, f, df=t / 2.0, d2f=np.full(grid.n, 0.5))
    assert np.abs(lap - 3.5).max() < 1e-11


def test_flat_ray_gradient_field_of_radius():
    # the position field x/2 has covariant derivative g/2 everywhere
    grid = RadialGrid.uniform(1.0, 3.0, 41)
    geo = fr.FlatRayGeometry(grid)
    eye = np.tile(np.eye(7), (grid.n, 1, 1))
    Gu = np.zeros((grid.n, 7, 7, 7))
    v = np.zeros((grid.n, 7))
    v[:, 0] = grid.nodes / 2.0
    dv = np.zeros((grid.n, 7))
    dv[:, 0] = 0.5
    nab = fr.covd(geo, Gu, v, "u", radial=dv)
    assert np.abs(nab - 0.5 * np.eye(7)).max() < 1e-12


def test_exterior_d_flat_ray_is_nilpotent_to_fd_order():
    grid = RadialGrid.uniform(1.0, 3.0, 81)
    geo = fr.FlatRayGeometry(grid)
    t = grid.nodes
    # omega = u(r) * (x . phi0): a radial multiple of an invariant 2-form
    from g2lab import algebra as al

    mu = al.standard_phi().dense()[0]
    u = np.exp(-t)
    omega = (u * t)[:, None, None] * mu
    d_omega = fr.exterior_d(geo, omega, 2)
    dd = fr.exterior_d(geo, d_omega, 3)
    assert np.abs(dd).max() < 1e-6
    # analytic check: d(u * x . phi0) = u' e^1 ^ (x. phi0) + 3 u phi0
    du = -np.exp(-t)
    from g2lab.models import _ray_wedge_pattern

    expected = (du * t)[:, None, None, None] * _ray_wedge_pattern() + (
        3.0 * u
    )[:, None, None, None] * al.standard_phi().dense()
    interior = slice(3, -3)
    assert np.abs(d_omega[interior] - expected[interior]).max() < 1e-7


def test_tensor_norms_match_direct_contractions():
    rng = np.random.default_rng(0)
    g = np.tile(np.diag([1.0, 2, 2, 2, 2, 3, 3]), (4, 1, 1))
    ginv = np.linalg.inv(g)
    v = rng.standard_normal((4, 7, 7))
    n2 = fr.tensor_norm_sq(g, ginv, v, "dd")
    direct = np.einsum("nij,nkl,nik,njl->n", v, v, ginv, ginv)
    assert np.allclose(n2, direct)
