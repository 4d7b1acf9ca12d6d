import math

import numpy as np
import pytest

from trdevdiv import (
    Layout,
    ScalarField,
    build_grid,
    from_spectral,
    l2_norm,
    norm_dual,
    norm_hs,
    norm_hs_tilde,
    pairing,
    to_spectral,
)
from trdevdiv.grid import riesz_representative
from trdevdiv.tensor import gradient_seminorm


def random_field(grid, layout, rng):
    return ScalarField(grid, layout, rng.standard_normal(grid.shape(layout)))


def mode_field(scale, layout, index):
    coeffs = np.zeros(scale.grid.shape(layout))
    coeffs[index] = 1.0
    return from_spectral(coeffs, scale, layout)


# -- grid --------------------------------------------------------------------


@pytest.mark.parametrize("dim,N,full,interior", [(2, 8, 81, 49), (3, 4, 125, 27)])
def test_node_counts(dim, N, full, interior):
    grid = build_grid(dim, N)
    assert grid.n_nodes(Layout.FULL) == full
    assert grid.n_nodes(Layout.INTERIOR) == interior


@pytest.mark.parametrize("dim,N", [(4, 8), (1, 8), (2, 3)])
def test_rejects_bad_grids(dim, N):
    with pytest.raises(ValueError):
        build_grid(dim, N)


@pytest.mark.parametrize("N", [4, 8, 12, 16, 24, 32, 64])
def test_spacing_times_resolution(N):
    assert build_grid(2, N).spacing * N == 1.0


def test_weights_sum_to_unit_measure():
    grid = build_grid(3, 6)
    assert math.isclose(grid.weights(Layout.FULL).sum(), 1.0, rel_tol=1e-14)


def test_field_validation(grid8):
    with pytest.raises(ValueError):
        ScalarField(grid8, Layout.FULL, np.zeros((8, 8)))
    bad = np.zeros(grid8.shape(Layout.FULL))
    bad[2, 3] = np.nan
    with pytest.raises(ValueError):
        ScalarField(grid8, Layout.FULL, bad)


# -- spectral scale ----------------------------------------------------------


def test_mode_counts(scale8):
    assert scale8.dirichlet_eigenvalues.size == 49
    assert scale8.neumann_eigenvalues.size == 81


def test_smallest_dirichlet_eigenvalue(scale8):
    # 3-point stencil, lowest sine mode per axis: (2/h sin(pi h/2))^2 with h = 1/8
    lam1 = (16.0 * math.sin(math.pi / 16)) ** 2
    assert math.isclose(lam1, 9.7434198385553, rel_tol=1e-12)
    assert math.isclose(scale8.dirichlet_eigenvalues.min(), 2 * lam1, rel_tol=1e-14)
    assert scale8.dirichlet_eigenvalues.min() > 0


def test_neumann_zero_mode(scale8):
    lam = scale8.neumann_eigenvalues
    assert lam[0, 0] == 0.0
    assert np.count_nonzero(lam == 0.0) == 1


def test_eigenvectors_of_three_point_stencil(scale8):
    grid = scale8.grid
    h = grid.spacing
    lap = (np.diag(np.full(7, 2.0)) - np.diag(np.ones(6), 1) - np.diag(np.ones(6), -1)) / h**2
    assert np.allclose(lap @ scale8.sin_basis, scale8.sin_basis * scale8.eig_1d[1:-1], atol=1e-10)
    neu = np.diag(np.full(9, 2.0)) - np.diag(np.ones(8), 1) - np.diag(np.ones(8), -1)
    neu[0, 1] = neu[-1, -2] = -2.0
    neu /= h**2
    assert np.allclose(neu @ scale8.cos_basis, scale8.cos_basis * scale8.eig_1d, atol=1e-9)


def test_constant_is_zero_mode(scale8, grid8):
    c = to_spectral(ScalarField.constant(grid8, Layout.FULL, 1.0), scale8)
    assert c[0, 0] == 1.0
    assert np.count_nonzero(c) == 1


def test_single_sine_mode(scale8, grid8):
    X, Y = grid8.meshgrid(Layout.INTERIOR)
    f = ScalarField(grid8, Layout.INTERIOR, np.sin(2 * np.pi * X) * np.sin(np.pi * Y))
    c = to_spectral(f, scale8, family="sine")
    big = np.abs(c) > 1e-12
    assert big.sum() == 1 and big[1, 0]


def test_transform_family_mismatch(scale8, grid8):
    with pytest.raises(ValueError):
        to_spectral(ScalarField.zeros(grid8, Layout.FULL), scale8, family="sine")


@pytest.mark.parametrize("layout", list(Layout))
def test_roundtrip_and_parseval(scale8, grid8, rng, layout):
    f = random_field(grid8, layout, rng)
    c = to_spectral(f, scale8)
    back = from_spectral(c, scale8, layout)
    assert np.allclose(back.values, f.values, rtol=0, atol=1e-12 * np.abs(f.values).max())
    assert math.isclose(np.linalg.norm(c), l2_norm(f, scale8), rel_tol=1e-12)


# -- norms -------------------------------------------------------------------


def test_constant_has_unit_norm(scale8, grid8):
    one = ScalarField.constant(grid8, Layout.FULL, 1.0)
    for s in np.linspace(0, 1, 6):
        assert math.isclose(norm_hs(one, s, scale8), 1.0, rel_tol=1e-14)


def test_s_zero_is_l2(scale8, grid8, rng):
    f = random_field(grid8, Layout.FULL, rng)
    g = random_field(grid8, Layout.INTERIOR, rng)
    assert math.isclose(norm_hs(f, 0, scale8), l2_norm(f, scale8), rel_tol=1e-12)
    assert math.isclose(norm_hs_tilde(g, 0, scale8), l2_norm(g, scale8), rel_tol=1e-12)


def test_s_one_is_h1_with_stencil_gradient(scale16, rng):
    # independent oracle: nodal forward differences with edge weights
    grid = scale16.grid
    f = random_field(grid, Layout.FULL, rng)
    expected = math.sqrt(l2_norm(f, scale16) ** 2 + gradient_seminorm(f) ** 2)
    assert math.isclose(norm_hs(f, 1.0, scale16), expected, rel_tol=1e-10)


def test_single_neumann_mode_half_order(scale8):
    w = mode_field(scale8, Layout.FULL, (2, 1))
    lam = scale8.neumann_eigenvalues[2, 1]
    # s = 1 first, against the stencil energy
    assert math.isclose(l2_norm(w, scale8) ** 2 + gradient_seminorm(w) ** 2, 1 + lam, rel_tol=1e-12)
    assert math.isclose(norm_hs(w, 0.5, scale8), (1 + lam) ** 0.25, rel_tol=1e-12)


def test_lowest_dirichlet_mode(scale8):
    v = mode_field(scale8, Layout.INTERIOR, (0, 0))
    lam = scale8.dirichlet_eigenvalues.min()
    assert math.isclose(norm_hs_tilde(v, 1.0, scale8), math.sqrt(1 + lam), rel_tol=1e-12)
    assert math.isclose(norm_dual(v, 0.0, scale8), (1 + lam) ** -0.5, rel_tol=1e-12)
    assert norm_hs_tilde(ScalarField.zeros(scale8.grid, Layout.INTERIOR), 0.3, scale8) == 0.0


def test_dual_at_s_one_is_l2(scale8, grid8, rng):
    f = random_field(grid8, Layout.INTERIOR, rng)
    assert math.isclose(norm_dual(f, 1.0, scale8), l2_norm(f, scale8), rel_tol=1e-12)


@pytest.mark.parametrize("s", [0.0, 0.3, 0.5, 1.0])
def test_dual_sharpness(scale8, grid8, rng, s):
    f = random_field(grid8, Layout.INTERIOR, rng)
    bound = norm_dual(f, s, scale8)
    for _ in range(200):
        v = random_field(grid8, Layout.INTERIOR, rng)
        assert pairing(f, v, scale8) <= bound * norm_hs_tilde(v, 1 - s, scale8) * (1 + 1e-12)
    r = riesz_representative(f, s, scale8)
    attained = pairing(f, r, scale8) / norm_hs_tilde(r, 1 - s, scale8)
    assert math.isclose(attained, bound, rel_tol=1e-10)


def test_order_out_of_range(scale8, grid8):
    with pytest.raises(ValueError):
        norm_hs(ScalarField.zeros(grid8, Layout.FULL), 1.5, scale8)
    with pytest.raises(ValueError):
        norm_dual(ScalarField.zeros(grid8, Layout.INTERIOR), -0.1, scale8)


def test_norm_layout_checked(scale8, grid8):
    with pytest.raises(ValueError):
        norm_hs(ScalarField.zeros(grid8, Layout.INTERIOR), 0.5, scale8)


def test_three_dimensional_scale(scale3d, rng):
    grid = scale3d.grid
    f = random_field(grid, Layout.FULL, rng)
    expected = math.sqrt(l2_norm(f, scale3d) ** 2 + gradient_seminorm(f) ** 2)
    assert math.isclose(norm_hs(f, 1.0, scale3d), expected, rel_tol=1e-10)
