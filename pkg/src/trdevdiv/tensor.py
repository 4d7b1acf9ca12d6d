"""Pointwise tensor algebra and the discrete gradient/divergence pair.

The discrete partial derivative ``D_j`` maps an interior field (zero on the
boundary) to the full grid. Along axis ``j`` it sends the sine mode
``sin(k pi x)`` to ``sqrt(lambda_k) cos(k pi x)``, which is exactly what the
forward difference does to a sampled sine mode (up to the half-cell shift);
along the other axes it is the zero extension. Consequently
``sum_j ||D_j v||^2`` equals the Dirichlet energy of ``v`` for the 3-point
Laplacian.

The tensor divergence is *defined* as the negative adjoint of the row-wise
gradient under the discrete L2 pairings, ``<div tau, v> = -<tau, Dv>``, and
is returned as a load density on the interior layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np
import scipy.linalg

from trdevdiv.grid import (
    GridSpec,
    Layout,
    ScalarField,
    SpectralScale,
    _apply_axes,
    _check_compatible,
    gram_matrix,
)

__all__ = [
    "VectorField",
    "TensorField",
    "identity_field",
    "scalar_identity",
    "trace_field",
    "dev_field",
    "sym_field",
    "gradient",
    "gradient_rowwise",
    "gradient_adjoint",
    "divergence_vector",
    "divergence_rowwise",
    "nodal_gradient",
    "gradient_seminorm",
    "derivative_matrix",
    "coefficient_divergence_blocks",
    "operator_norm",
    "gradient_operator_norm",
    "divergence_operator_norm",
]


def _validate(values, grid, layout, lead):
    values = np.asarray(values, dtype=float)
    expected = lead + grid.shape(layout)
    if values.shape != expected:
        raise ValueError(f"values of shape {values.shape}, expected {expected}")
    if not np.all(np.isfinite(values)):
        raise ValueError("field values must be finite")
    return values


@dataclass(frozen=True)
class VectorField:
    """``n`` scalar components on one layout, stored as ``values[i, ...]``."""

    grid: GridSpec
    layout: Layout
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "layout", Layout(self.layout))
        n = self.grid.dim
        object.__setattr__(self, "values", _validate(self.values, self.grid, self.layout, (n,)))

    @classmethod
    def zeros(cls, grid, layout):
        return cls(grid, layout, np.zeros((grid.dim,) + grid.shape(layout)))

    @classmethod
    def from_components(cls, components):
        first = components[0]
        for c in components[1:]:
            _check_compatible(first, c)
        return cls(first.grid, first.layout, np.stack([c.values for c in components]))

    def component(self, i: int) -> ScalarField:
        return ScalarField(self.grid, self.layout, self.values[i])

    def __add__(self, other):
        _check_compatible(self, other)
        return VectorField(self.grid, self.layout, self.values + other.values)

    def __sub__(self, other):
        _check_compatible(self, other)
        return VectorField(self.grid, self.layout, self.values - other.values)

    def __mul__(self, alpha):
        return VectorField(self.grid, self.layout, float(alpha) * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True)
class TensorField:
    """``n x n`` matrix field, ``values[i, j, ...]`` is entry ``(i, j)``.

    With ``symmetric=True`` the entries must satisfy ``tau_ij == tau_ji``
    exactly.
    """

    grid: GridSpec
    layout: Layout
    values: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "layout", Layout(self.layout))
        n = self.grid.dim
        values = _validate(self.values, self.grid, self.layout, (n, n))
        if self.symmetric and not np.array_equal(values, values.swapaxes(0, 1)):
            raise ValueError("symmetric flag set on a non-symmetric tensor field")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid, layout):
        n = grid.dim
        return cls(grid, layout, np.zeros((n, n) + grid.shape(layout)))

    def entry(self, i: int, j: int) -> ScalarField:
        return ScalarField(self.grid, self.layout, self.values[i, j])

    def __add__(self, other):
        _check_compatible(self, other)
        return TensorField(self.grid, self.layout, self.values + other.values,
                           self.symmetric and other.symmetric)

    def __sub__(self, other):
        _check_compatible(self, other)
        return TensorField(self.grid, self.layout, self.values - other.values,
                           self.symmetric and other.symmetric)

    def __mul__(self, alpha):
        return TensorField(self.grid, self.layout, float(alpha) * self.values, self.symmetric)

    __rmul__ = __mul__


def identity_field(grid: GridSpec, layout: Layout = Layout.FULL) -> TensorField:
    n = grid.dim
    values = np.einsum("ij,...->ij...", np.eye(n), np.ones(grid.shape(layout)))
    return TensorField(grid, layout, values, symmetric=True)


def scalar_identity(phi: ScalarField) -> TensorField:
    """The matrix field ``phi * id``."""
    n = phi.grid.dim
    return TensorField(phi.grid, phi.layout, np.einsum("ij,...->ij...", np.eye(n), phi.values),
                       symmetric=True)


def trace_field(tau: TensorField) -> ScalarField:
    return ScalarField(tau.grid, tau.layout, np.trace(tau.values, axis1=0, axis2=1))


def dev_field(tau: TensorField) -> TensorField:
    n = tau.grid.dim
    tr = np.trace(tau.values, axis1=0, axis2=1)
    values = tau.values - np.einsum("ij,...->ij...", np.eye(n), tr / n)
    return TensorField(tau.grid, tau.layout, values, tau.symmetric)


def sym_field(tau: TensorField) -> TensorField:
    values = 0.5 * (tau.values + tau.values.swapaxes(0, 1))
    return TensorField(tau.grid, tau.layout, values, symmetric=True)


# -- discrete derivatives ----------------------------------------------------


@lru_cache(maxsize=32)
def _diff_1d(scale: SpectralScale) -> np.ndarray:
    """Full <- interior: sine mode k to sqrt(lambda_k) times cosine mode k."""
    N = scale.grid.resolution
    return scale.cos_basis[:, 1:N] @ (scale.derivative_factors[:, None] * scale.analysis_1d(Layout.INTERIOR))


@lru_cache(maxsize=32)
def _diff_adjoint_1d(scale: SpectralScale) -> np.ndarray:
    """Interior <- full: the weighted adjoint of ``_diff_1d``."""
    N = scale.grid.resolution
    return scale.sin_basis @ (scale.derivative_factors[:, None] * scale.analysis_1d(Layout.FULL)[1:N])


@lru_cache(maxsize=32)
def _extend_1d(scale: SpectralScale) -> np.ndarray:
    N = scale.grid.resolution
    return np.eye(N + 1)[:, 1:N]


def _axis_mats(scale, j, along, other):
    return [along if axis == j else other for axis in range(scale.dim)]


def _require(fld, layout):
    if fld.layout is not Layout(layout):
        raise ValueError(f"expected a field on the {Layout(layout).value} layout, got {fld.layout.value}")


def _partial(values, scale, j):
    mats = _axis_mats(scale, j, _diff_1d(scale), _extend_1d(scale))
    return _apply_axes(mats, values, scale.dim)


def _partial_adjoint(values, scale, j):
    # the derivative adjoint annihilates constants along axis j; shifting by
    # the first node keeps constant lines exactly in the kernel
    lead = values.ndim - scale.dim
    values = values - np.take(values, [0], axis=lead + j)
    mats = _axis_mats(scale, j, _diff_adjoint_1d(scale), _extend_1d(scale).T)
    return _apply_axes(mats, values, scale.dim)


def gradient(v: ScalarField, scale: SpectralScale) -> VectorField:
    """``grad~ v`` of an interior scalar field, as a full-grid vector field."""
    _require(v, Layout.INTERIOR)
    comps = np.stack([_partial(v.values, scale, j) for j in range(scale.dim)])
    return VectorField(v.grid, Layout.FULL, comps)


def gradient_rowwise(v: VectorField, scale: SpectralScale) -> TensorField:
    """Functional matrix ``(Dv)_ij = d_j v_i`` on the full grid."""
    _require(v, Layout.INTERIOR)
    vals = np.stack([_partial(v.values, scale, j) for j in range(scale.dim)], axis=1)
    return TensorField(v.grid, Layout.FULL, vals)


def gradient_adjoint(u: ScalarField, scale: SpectralScale) -> VectorField:
    """Interior density ``w`` with ``<w_j, v>_int = <u, D_j v>_full`` for every ``v``."""
    _require(u, Layout.FULL)
    comps = np.stack([_partial_adjoint(u.values, scale, j) for j in range(scale.dim)])
    return VectorField(u.grid, Layout.INTERIOR, comps)


def divergence_vector(v: VectorField, scale: SpectralScale) -> ScalarField:
    """``div v = tr(Dv)`` of an interior vector field, on the full grid."""
    _require(v, Layout.INTERIOR)
    vals = sum(_partial(v.values[j], scale, j) for j in range(scale.dim))
    return ScalarField(v.grid, Layout.FULL, vals)


def divergence_rowwise(tau: TensorField, scale: SpectralScale) -> VectorField:
    """Row-wise divergence as an interior load: ``<div tau, v> = -<tau, Dv>``."""
    _require(tau, Layout.FULL)
    n = scale.dim
    rows = [-sum(_partial_adjoint(tau.values[i, j], scale, j) for j in range(n)) for i in range(n)]
    return VectorField(tau.grid, Layout.INTERIOR, np.stack(rows))


def nodal_gradient(u: ScalarField) -> list[tuple[np.ndarray, np.ndarray]]:
    """Forward differences of a full-grid field on the edges of each direction.

    Returns ``(differences, weights)`` per axis; the weighted sum of squares is
    the Neumann energy of the 3-point Laplacian.
    """
    _require(u, Layout.FULL)
    grid = u.grid
    h = grid.spacing
    w_full = grid._weights_1d(Layout.FULL)
    out = []
    for j in range(grid.dim):
        diff = np.diff(u.values, axis=j) / h
        w = reduce(np.multiply.outer,
                   [np.full(grid.resolution, h) if a == j else w_full for a in range(grid.dim)])
        out.append((diff, w))
    return out


def gradient_seminorm(u: ScalarField) -> float:
    return float(np.sqrt(sum(np.sum(w * d**2) for d, w in nodal_gradient(u))))


# -- dense operator realizations --------------------------------------------


@lru_cache(maxsize=32)
def derivative_matrix(scale: SpectralScale, j: int) -> np.ndarray:
    """Dense nodal matrix of ``D_j`` (full nodes x interior nodes), row-major."""
    return reduce(np.kron, _axis_mats(scale, j, _diff_1d(scale), _extend_1d(scale)))


@lru_cache(maxsize=32)
def coefficient_divergence_blocks(scale: SpectralScale) -> tuple[np.ndarray, ...]:
    """Matrices ``L_j`` mapping cosine coefficients of ``u`` to sine coefficients of ``D_j^* u``.

    Along axis ``j`` this is the selection of modes ``1..N-1`` scaled by
    ``sqrt(lambda_k)``; along the other axes it is the sine/cosine cross Gram
    matrix of the restriction to interior nodes.
    """
    N = scale.grid.resolution
    select = np.zeros((N - 1, N + 1))
    select[:, 1:N] = np.diag(scale.derivative_factors)
    cross = scale.analysis_1d(Layout.INTERIOR) @ scale.cos_basis[1:N]
    return tuple(reduce(np.kron, _axis_mats(scale, j, select, cross)) for j in range(scale.dim))


def operator_norm(op: np.ndarray, source_gram: np.ndarray, target_gram: np.ndarray) -> float:
    """Largest generalized singular value ``sup ||op x||_T / ||x||_S``."""
    op = np.atleast_2d(op)
    if source_gram.shape != (op.shape[1], op.shape[1]) or target_gram.shape != (op.shape[0], op.shape[0]):
        raise ValueError(
            f"dimension mismatch: op {op.shape}, source gram {source_gram.shape}, "
            f"target gram {target_gram.shape}"
        )
    try:
        chol = scipy.linalg.cholesky(source_gram, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ValueError("source norm matrix is not positive definite") from exc
    if np.min(np.linalg.eigvalsh(0.5 * (target_gram + target_gram.T))) < -1e-10 * np.abs(target_gram).max():
        raise ValueError("target norm matrix is not positive semidefinite")
    # whiten: op L^{-T}, then the largest singular value in the target metric
    k = scipy.linalg.solve_triangular(chol, op.T, lower=True).T
    top = k.T @ target_gram @ k
    return float(np.sqrt(max(np.linalg.eigvalsh(0.5 * (top + top.T))[-1], 0.0)))


def _block_diag(mat, copies):
    return scipy.linalg.block_diag(*([mat] * copies))


def gradient_operator_norm(scale: SpectralScale, s: float) -> float:
    """Discrete norm of ``grad~ : H~^{1-s} -> (H~^{-s})^n``."""
    n = scale.dim
    op = np.vstack([derivative_matrix(scale, j) for j in range(n)])
    source = gram_matrix(scale, Layout.INTERIOR, 1.0 - s)
    target = _block_diag(gram_matrix(scale, Layout.FULL, -s), n)
    return operator_norm(op, source, target)


def divergence_operator_norm(scale: SpectralScale, s: float) -> float:
    """Discrete norm of ``div~ : (H~^{1-s})^n -> H~^{-s}``."""
    n = scale.dim
    op = np.hstack([derivative_matrix(scale, j) for j in range(n)])
    source = _block_diag(gram_matrix(scale, Layout.INTERIOR, 1.0 - s), n)
    target = gram_matrix(scale, Layout.FULL, -s)
    return operator_norm(op, source, target)
