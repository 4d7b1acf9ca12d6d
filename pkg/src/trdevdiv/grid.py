"""Structured grids on the unit hypercube and spectral fractional norms.

Two node layouts are used throughout:

* ``Layout.FULL``: all ``(N+1)^n`` nodes, trapezoidal quadrature weights.
  Functions here carry the Neumann (cosine) scale ``H^s``.
* ``Layout.INTERIOR``: the ``(N-1)^n`` interior nodes, uniform weights
  ``h^n``. Functions here are extended by zero to the boundary and carry the
  Dirichlet (sine) scale ``H~^s``.

Fractional norms are spectral powers of the 3-point finite-difference
Laplacian, whose sine/cosine eigenvectors are exact:
``||u||_s^2 = sum_k (1 + lambda_k)^s |u_k|^2`` with ``u_k`` the coefficients
in an L2-orthonormal eigenbasis. For Hilbert couples generated by one
self-adjoint operator this coincides with complex interpolation between
``L2`` and ``H1``; that identification is an assumption of the model, and all
constants computed from these norms are discrete constants.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np

__all__ = [
    "GridSpec",
    "Layout",
    "ScalarField",
    "SpectralScale",
    "build_grid",
    "build_spectral_scale",
    "to_spectral",
    "from_spectral",
    "pairing",
    "l2_norm",
    "norm_hs",
    "norm_hs_tilde",
    "norm_dual",
    "norm_dual_neumann",
    "riesz_representative",
    "check_order",
    "gram_matrix",
]

SUPPORTED_DIMS = (2, 3)
MIN_RESOLUTION = 4


class Layout(str, enum.Enum):
    FULL = "full"
    INTERIOR = "interior"


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid with ``resolution`` cells per axis on ``[0, 1]^dim``."""

    dim: int
    resolution: int

    def __post_init__(self):
        if self.dim not in SUPPORTED_DIMS:
            raise ValueError(
                f"unsupported dimension {self.dim!r}; expected one of {SUPPORTED_DIMS}"
            )
        if int(self.resolution) != self.resolution or self.resolution < MIN_RESOLUTION:
            raise ValueError(
                f"resolution must be an integer >= {MIN_RESOLUTION}, got {self.resolution!r}"
            )

    @property
    def spacing(self) -> float:
        return 1.0 / self.resolution

    def shape(self, layout: Layout) -> tuple[int, ...]:
        N = self.resolution
        m = N + 1 if Layout(layout) is Layout.FULL else N - 1
        return (m,) * self.dim

    def n_nodes(self, layout: Layout) -> int:
        return int(np.prod(self.shape(layout)))

    def coordinates(self, layout: Layout) -> np.ndarray:
        """1-D node coordinates along any axis."""
        x = np.arange(self.resolution + 1) / self.resolution
        return x if Layout(layout) is Layout.FULL else x[1:-1]

    def meshgrid(self, layout: Layout) -> list[np.ndarray]:
        x = self.coordinates(layout)
        return np.meshgrid(*([x] * self.dim), indexing="ij")

    def weights(self, layout: Layout) -> np.ndarray:
        """Quadrature weights of the discrete L2 pairing, shaped like the layout."""
        return _outer([self._weights_1d(layout)] * self.dim)

    def _weights_1d(self, layout: Layout) -> np.ndarray:
        h = self.spacing
        if Layout(layout) is Layout.FULL:
            w = np.full(self.resolution + 1, h)
            w[0] = w[-1] = h / 2
            return w
        return np.full(self.resolution - 1, h)


def build_grid(dim: int, resolution: int) -> GridSpec:
    return GridSpec(dim, resolution)


@dataclass(frozen=True)
class ScalarField:
    grid: GridSpec
    layout: Layout
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "layout", Layout(self.layout))
        values = np.asarray(self.values, dtype=float)
        expected = self.grid.shape(self.layout)
        if values.shape != expected:
            raise ValueError(
                f"values of shape {values.shape} do not match {self.layout.value} "
                f"layout {expected}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: GridSpec, layout: Layout) -> "ScalarField":
        return cls(grid, layout, np.zeros(grid.shape(layout)))

    @classmethod
    def constant(cls, grid: GridSpec, layout: Layout, c: float) -> "ScalarField":
        return cls(grid, layout, np.full(grid.shape(layout), float(c)))

    @classmethod
    def from_function(cls, grid: GridSpec, layout: Layout, func) -> "ScalarField":
        """Sample ``func(x, y[, z])`` at the nodes of ``layout``."""
        return cls(grid, layout, np.broadcast_to(func(*grid.meshgrid(layout)), grid.shape(layout)))

    def __add__(self, other):
        _check_compatible(self, other)
        return ScalarField(self.grid, self.layout, self.values + other.values)

    def __sub__(self, other):
        _check_compatible(self, other)
        return ScalarField(self.grid, self.layout, self.values - other.values)

    def __mul__(self, alpha):
        return ScalarField(self.grid, self.layout, float(alpha) * self.values)

    __rmul__ = __mul__


def _check_compatible(a, b):
    if a.grid != b.grid or a.layout != b.layout:
        raise ValueError("fields live on different grids or layouts")


def _outer(vectors):
    return reduce(np.multiply.outer, vectors)


def _apply_axes(mats, values, ndim):
    """Apply one matrix per axis to the trailing ``ndim`` axes of ``values``."""
    out = values
    lead = values.ndim - ndim
    for axis, mat in enumerate(mats):
        if mat is None:
            continue
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [lead + axis])), 0, lead + axis)
    return out


@dataclass(frozen=True, eq=False)
class SpectralScale:
    """Eigen-data of the discrete Dirichlet and Neumann Laplacians on a grid.

    The 1-D Neumann basis holds the cosines ``cos(k pi x)``, ``k = 0..N``,
    on the full nodes, orthonormal for the trapezoidal rule; the Dirichlet
    basis holds ``sin(k pi x)``, ``k = 1..N-1``, on interior nodes. Both
    share the 1-D eigenvalues ``(2/h sin(k pi h / 2))^2``; n-D eigenvalues
    are tensor sums, indexed like the node arrays (mode index per axis).
    """

    grid: GridSpec
    cos_basis: np.ndarray = field(repr=False)
    sin_basis: np.ndarray = field(repr=False)
    eig_1d: np.ndarray = field(repr=False)
    neumann_eigenvalues: np.ndarray = field(repr=False)
    dirichlet_eigenvalues: np.ndarray = field(repr=False)
    full_weights: np.ndarray = field(repr=False)
    interior_weights: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.grid.dim

    def weights(self, layout: Layout) -> np.ndarray:
        return self.full_weights if Layout(layout) is Layout.FULL else self.interior_weights

    def eigenvalues(self, layout: Layout) -> np.ndarray:
        if Layout(layout) is Layout.FULL:
            return self.neumann_eigenvalues
        return self.dirichlet_eigenvalues

    def analysis_1d(self, layout: Layout) -> np.ndarray:
        """Matrix mapping 1-D nodal values to orthonormal mode coefficients."""
        if Layout(layout) is Layout.FULL:
            return self.cos_basis.T * self.grid._weights_1d(Layout.FULL)
        return self.sin_basis.T * self.grid.spacing

    def synthesis_1d(self, layout: Layout) -> np.ndarray:
        return self.cos_basis if Layout(layout) is Layout.FULL else self.sin_basis

    def analyse(self, values: np.ndarray, layout: Layout) -> np.ndarray:
        if Layout(layout) is not Layout.FULL:
            return _apply_axes([self.analysis_1d(layout)] * self.dim, values, self.dim)
        # shift by the first node so constants land exactly on the zero mode
        n = self.dim
        base = values[(...,) + (0,) * n]
        shifted = values - base[(...,) + (None,) * n]
        coeffs = _apply_axes([self.analysis_1d(layout)] * n, shifted, n)
        coeffs[(...,) + (0,) * n] += base
        return coeffs

    def synthesise(self, coeffs: np.ndarray, layout: Layout) -> np.ndarray:
        return _apply_axes([self.synthesis_1d(layout)] * self.dim, coeffs, self.dim)

    def analysis_matrix(self, layout: Layout) -> np.ndarray:
        """Dense n-D analysis matrix (modes x nodes), row-major ordering."""
        return reduce(np.kron, [self.analysis_1d(layout)] * self.dim)

    def synthesis_matrix(self, layout: Layout) -> np.ndarray:
        return reduce(np.kron, [self.synthesis_1d(layout)] * self.dim)

    @cached_property
    def derivative_factors(self) -> np.ndarray:
        """``sqrt(eig)`` for ``k = 1..N-1``: the sine-to-cosine differentiation rule."""
        return np.sqrt(self.eig_1d[1:-1])


def build_spectral_scale(grid: GridSpec) -> SpectralScale:
    N, h = grid.resolution, grid.spacing
    x = grid.coordinates(Layout.FULL)
    k = np.arange(N + 1)
    w = grid._weights_1d(Layout.FULL)

    cos_basis = np.cos(np.pi * np.outer(x, k))
    cos_basis /= np.sqrt(w @ cos_basis**2)

    kk = np.arange(1, N)
    sin_basis = np.sin(np.pi * np.outer(x[1:-1], kk))
    sin_basis /= np.sqrt(h * np.sum(sin_basis**2, axis=0))

    eig = (2.0 / h * np.sin(np.pi * k * h / 2)) ** 2
    eig[0] = 0.0

    def tensor_sum(e):
        return sum(np.meshgrid(*([e] * grid.dim), indexing="ij"))

    return SpectralScale(
        grid=grid,
        cos_basis=cos_basis,
        sin_basis=sin_basis,
        eig_1d=eig,
        neumann_eigenvalues=tensor_sum(eig),
        dirichlet_eigenvalues=tensor_sum(eig[1:-1]),
        full_weights=grid.weights(Layout.FULL),
        interior_weights=grid.weights(Layout.INTERIOR),
    )


def check_order(s: float) -> float:
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"Sobolev order must lie in [0, 1], got {s}")
    return s


_FAMILY = {Layout.FULL: "cosine", Layout.INTERIOR: "sine"}


def to_spectral(fld, scale: SpectralScale, family: str | None = None) -> np.ndarray:
    """Orthonormal mode coefficients of a field (cosine on FULL, sine on INTERIOR).

    Leading component axes of vector/tensor fields are carried along.
    """
    if family is not None and _FAMILY[fld.layout] != family:
        raise ValueError(
            f"{family} transform requested for a field on the {fld.layout.value} layout"
        )
    return scale.analyse(fld.values, fld.layout)


def from_spectral(coeffs: np.ndarray, scale: SpectralScale, layout: Layout) -> ScalarField:
    return ScalarField(scale.grid, layout, scale.synthesise(np.asarray(coeffs, float), layout))


def pairing(a, b, scale: SpectralScale) -> float:
    """Discrete L2 pairing, summed over any leading component axes."""
    _check_compatible(a, b)
    return float(np.sum(scale.weights(a.layout) * a.values * b.values))


def l2_norm(fld, scale: SpectralScale) -> float:
    return float(np.sqrt(np.sum(scale.weights(fld.layout) * fld.values**2)))


def _weighted_norm(coeffs, weights):
    return float(np.sqrt(np.sum(weights * coeffs**2)))


def _require(fld, layout):
    if fld.layout is not layout:
        raise ValueError(f"expected a field on the {layout.value} layout, got {fld.layout.value}")


def norm_hs(fld, s: float, scale: SpectralScale) -> float:
    """``H^s`` norm of a FULL-layout field via the Neumann spectral power."""
    s = check_order(s)
    _require(fld, Layout.FULL)
    coeffs = scale.analyse(fld.values, Layout.FULL)
    return _weighted_norm(coeffs, (1.0 + scale.neumann_eigenvalues) ** s)


def norm_hs_tilde(fld, s: float, scale: SpectralScale) -> float:
    """``H~^s`` norm of an INTERIOR-layout field via the Dirichlet spectral power."""
    s = check_order(s)
    _require(fld, Layout.INTERIOR)
    coeffs = scale.analyse(fld.values, Layout.INTERIOR)
    return _weighted_norm(coeffs, (1.0 + scale.dirichlet_eigenvalues) ** s)


def norm_dual(load, s: float, scale: SpectralScale) -> float:
    """``H^{s-1}`` norm of a load, i.e. the dual norm of ``H~^{1-s}``.

    ``load`` is the L2 density of the functional on the INTERIOR layout, so
    that ``<load, v> = sum h^n load v``.
    """
    s = check_order(s)
    _require(load, Layout.INTERIOR)
    coeffs = scale.analyse(load.values, Layout.INTERIOR)
    return _weighted_norm(coeffs, (1.0 + scale.dirichlet_eigenvalues) ** (s - 1.0))


def norm_dual_neumann(load, s: float, scale: SpectralScale) -> float:
    """``H~^{-s}`` norm of a FULL-layout density, the dual norm of ``H^s``."""
    s = check_order(s)
    _require(load, Layout.FULL)
    coeffs = scale.analyse(load.values, Layout.FULL)
    return _weighted_norm(coeffs, (1.0 + scale.neumann_eigenvalues) ** (-s))


def riesz_representative(load, s: float, scale: SpectralScale):
    """Interior field ``v`` attaining the supremum that defines ``norm_dual``.

    ``<load, v> = norm_dual(load)^2`` and ``||v||_{H~^{1-s}} = norm_dual(load)``.
    Works for scalar and vector loads alike.
    """
    s = check_order(s)
    _require(load, Layout.INTERIOR)
    coeffs = scale.analyse(load.values, Layout.INTERIOR)
    values = scale.synthesise((1.0 + scale.dirichlet_eigenvalues) ** (s - 1.0) * coeffs, Layout.INTERIOR)
    return type(load)(**{**_field_kwargs(load), "values": values})


def _field_kwargs(fld):
    return {k: getattr(fld, k) for k in fld.__dataclass_fields__}


def gram_matrix(scale: SpectralScale, layout: Layout, power: float) -> np.ndarray:
    """Dense nodal Gram matrix ``G`` with ``u^T G u = sum_k (1+lambda_k)^power u_k^2``.

    On FULL the Neumann eigenvalues are used, on INTERIOR the Dirichlet ones.
    """
    A = scale.analysis_matrix(layout)
    lam = scale.eigenvalues(layout).ravel()
    return A.T @ (((1.0 + lam) ** power)[:, None] * A)
