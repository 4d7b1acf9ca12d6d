import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from trdevdiv import (
    Layout,
    ScalarField,
    TensorField,
    VectorField,
    build_grid,
    build_spectral_scale,
    dev_field,
    divergence_rowwise,
    from_spectral,
    gradient_rowwise,
    l2_norm,
    norm_dual,
    norm_hs,
    norm_hs_tilde,
    pairing,
    to_spectral,
    trace_field,
)

SCALES = {N: build_spectral_scale(build_grid(2, N)) for N in (4, 6, 9)}
orders = st.floats(0.0, 1.0, allow_nan=False)
resolutions = st.sampled_from(sorted(SCALES))
finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def interior_scalar(draw, lead=()):
    scale = SCALES[draw(resolutions)]
    shape = lead + scale.grid.shape(Layout.INTERIOR)
    values = draw(arrays(np.float64, shape, elements=finite))
    return scale, values


@settings(max_examples=40, deadline=None)
@given(interior_scalar(), orders, orders)
def test_norm_monotone_in_order(data, a, b):
    scale, values = data
    f = ScalarField(scale.grid, Layout.INTERIOR, values)
    lo, hi = sorted((a, b))
    assert norm_hs_tilde(f, lo, scale) <= norm_hs_tilde(f, hi, scale) * (1 + 1e-12) + 1e-300


@settings(max_examples=40, deadline=None)
@given(interior_scalar(), orders, orders)
def test_norm_log_convex(data, a, b):
    scale, values = data
    f = ScalarField(scale.grid, Layout.INTERIOR, values)
    mid = norm_hs_tilde(f, (a + b) / 2, scale) ** 2
    assert mid <= norm_hs_tilde(f, a, scale) * norm_hs_tilde(f, b, scale) * (1 + 1e-12) + 1e-300


@settings(max_examples=40, deadline=None)
@given(st.data(), orders)
def test_dual_pairing_bound(data, s):
    scale, fv = data.draw(interior_scalar())
    vv = data.draw(arrays(np.float64, fv.shape, elements=finite))
    f = ScalarField(scale.grid, Layout.INTERIOR, fv)
    v = ScalarField(scale.grid, Layout.INTERIOR, vv)
    bound = norm_dual(f, s, scale) * norm_hs_tilde(v, 1 - s, scale)
    assert abs(pairing(f, v, scale)) <= bound * (1 + 1e-10) + 1e-9


@settings(max_examples=40, deadline=None)
@given(resolutions, st.sampled_from(list(Layout)), st.integers(0, 2**32 - 1))
def test_parseval_and_round_trip(N, layout, seed):
    scale = SCALES[N]
    values = np.random.default_rng(seed).standard_normal(scale.grid.shape(layout))
    f = ScalarField(scale.grid, layout, values)
    c = to_spectral(f, scale)
    assert math.isclose(np.linalg.norm(c), l2_norm(f, scale), rel_tol=1e-12)
    assert np.allclose(from_spectral(c, scale, layout).values, values, rtol=0, atol=1e-12)
    if layout is Layout.FULL:
        assert math.isclose(norm_hs(f, 0.0, scale), l2_norm(f, scale), rel_tol=1e-12)


@settings(max_examples=40, deadline=None)
@given(resolutions, st.integers(0, 2**32 - 1))
def test_divergence_is_negative_adjoint_of_gradient(N, seed):
    scale = SCALES[N]
    grid = scale.grid
    rng = np.random.default_rng(seed)
    tau = TensorField(grid, Layout.FULL, rng.standard_normal((2, 2) + grid.shape(Layout.FULL)))
    v = VectorField(grid, Layout.INTERIOR, rng.standard_normal((2,) + grid.shape(Layout.INTERIOR)))
    lhs = pairing(divergence_rowwise(tau, scale), v, scale)
    rhs = -pairing(tau, gradient_rowwise(v, scale), scale)
    assert math.isclose(lhs, rhs, rel_tol=1e-10, abs_tol=1e-10)


@settings(max_examples=40, deadline=None)
@given(resolutions, st.integers(0, 2**32 - 1))
def test_dev_idempotent_and_trace_free(N, seed):
    grid = SCALES[N].grid
    tau = TensorField(grid, Layout.FULL, np.random.default_rng(seed).standard_normal((2, 2) + grid.shape(Layout.FULL)))
    d = dev_field(tau)
    assert np.allclose(dev_field(d).values, d.values, rtol=0, atol=1e-14)
    assert np.max(np.abs(trace_field(d).values)) < 1e-14
