"""Mean-zero projection, the duality identity, and the discrete inf-sup constant.

Nodal full-grid pressures paired with interior-node velocities admit a few
spurious modes: non-constant full-grid fields ``q`` with ``<q, div v> = 0``
for every interior ``v`` (corner spikes and checkerboards, eight in 2-D
counting the constant). The discrete analogue of ``L^2_0 = L^2 / ker grad``
used here is therefore the L2-orthogonal complement of that kernel. It lies
inside the mean-zero fields, and on it the discrete inf-sup constant is
positive.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from trdevdiv.errors import SolverError
from trdevdiv.grid import (
    GridSpec,
    Layout,
    ScalarField,
    SpectralScale,
    build_spectral_scale,
    check_order,
    gram_matrix,
    l2_norm,
    norm_dual,
    norm_hs,
)
from trdevdiv.tensor import coefficient_divergence_blocks, gradient_adjoint

__all__ = [
    "InfSupEstimate",
    "project_mean_zero",
    "mean_value",
    "spurious_modes",
    "pressure_basis",
    "project_pressure_space",
    "random_pressure",
    "verify_duality_eq5",
    "divsup",
    "divsup_form",
    "estimate_infsup",
]

EIGEN_TOL = 1e-10
MEAN_TOL = 1e-10


def mean_value(f: ScalarField, scale: SpectralScale) -> float:
    w = scale.weights(f.layout)
    return float(np.sum(w * f.values) / np.sum(w))


def project_mean_zero(f: ScalarField, scale: SpectralScale) -> ScalarField:
    """``f - mean(f)`` with the mean taken in the discrete L2 pairing of the layout."""
    return ScalarField(f.grid, f.layout, f.values - mean_value(f, scale))


def _require_mean_zero(g: ScalarField, scale: SpectralScale):
    if g.layout is not Layout.FULL:
        raise ValueError("expected a full-grid field")
    if abs(mean_value(g, scale)) > MEAN_TOL * max(l2_norm(g, scale), 1.0):
        raise ValueError("field does not have discrete mean zero")


# -- discrete pressure space -------------------------------------------------


@functools.lru_cache(maxsize=16)
def _pressure_split(scale: SpectralScale):
    """Orthonormal cosine-coefficient bases of (kernel, complement) of ``g -> (D_j^* g)_j``."""
    L = np.vstack(coefficient_divergence_blocks(scale))
    _, sv, vt = np.linalg.svd(L)
    rank = int(np.sum(sv > 1e-10 * sv[0]))
    return vt[rank:].T, vt[:rank].T


def spurious_modes(scale: SpectralScale) -> np.ndarray:
    """Cosine-coefficient basis (columns) of the discrete gradient-adjoint kernel.

    Contains the constant; every other column is a spurious pressure mode.
    """
    return _pressure_split(scale)[0]


def pressure_basis(scale: SpectralScale) -> np.ndarray:
    """Cosine-coefficient basis (columns) of the discrete ``L^2_0``."""
    return _pressure_split(scale)[1]


def project_pressure_space(g: ScalarField, scale: SpectralScale) -> ScalarField:
    """L2-orthogonal projection onto the discrete ``L^2_0`` (removes mean and spurious modes)."""
    K = spurious_modes(scale)
    coeffs = scale.analyse(g.values, Layout.FULL).ravel()
    coeffs = coeffs - K @ (K.T @ coeffs)
    return ScalarField(g.grid, Layout.FULL, scale.synthesise(coeffs.reshape(g.values.shape), Layout.FULL))


def random_pressure(scale: SpectralScale, rng: np.random.Generator, smoothness: float = 0.0) -> ScalarField:
    """Random element of the discrete ``L^2_0``.

    Mode coefficients are standard normal, damped by ``(1+lambda)^(-smoothness/2)``.
    """
    grid = scale.grid
    coeffs = rng.standard_normal(grid.shape(Layout.FULL))
    coeffs *= (1.0 + scale.neumann_eigenvalues) ** (-smoothness / 2)
    g = ScalarField(grid, Layout.FULL, scale.synthesise(coeffs, Layout.FULL))
    return project_pressure_space(g, scale)


# -- duality -----------------------------------------------------------------


@functools.lru_cache(maxsize=32)
def _duality_factor(scale: SpectralScale, s: float):
    w = scale.full_weights.ravel()
    # nodal basis of mean-zero densities: the null space of f -> <f, 1>
    P = scipy.linalg.null_space(w[None, :])
    G = gram_matrix(scale, Layout.FULL, -s)
    return P, scipy.linalg.cho_factor(P.T @ G @ P), w


def verify_duality_eq5(g: ScalarField, s: float, scale: SpectralScale) -> float:
    """Relative gap between ``||g||_{H^s}`` and ``sup_f <f, g> / ||f||_{H~^{-s}}``.

    The supremum runs over mean-zero densities ``f`` and is evaluated by a
    dense nodal Riesz solve, independently of the spectral formula for
    ``norm_hs``.
    """
    s = check_order(s)
    _require_mean_zero(g, scale)
    norm = norm_hs(g, s, scale)
    if norm == 0.0:
        raise ValueError("duality check needs a nonzero field")
    P, factor, w = _duality_factor(scale, s)
    b = P.T @ (w * g.values.ravel())
    sup = float(np.sqrt(b @ scipy.linalg.cho_solve(factor, b)))
    return abs(sup - norm) / norm


def divsup(g: ScalarField, s: float, scale: SpectralScale) -> float:
    """``sup_v <g, div v> / ||v||_{H~^{1-s}}`` over interior vector fields ``v``.

    Evaluated exactly as the ``H^{s-1}`` norm of the load ``v -> <g, div v>``.
    """
    s = check_order(s)
    _require_mean_zero(g, scale)
    return norm_dual(gradient_adjoint(g, scale), s, scale)


def divsup_form(scale: SpectralScale, s: float) -> np.ndarray:
    """Matrix of ``g -> divsup(g, s)^2`` in cosine-coefficient coordinates."""
    weight = (1.0 + scale.dirichlet_eigenvalues.ravel()) ** (s - 1.0)
    return sum(L.T @ (weight[:, None] * L) for L in coefficient_divergence_blocks(scale))


@dataclass
class InfSupEstimate:
    s: float
    beta: float
    minimizer: ScalarField = field(repr=False)
    resolution: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def bogovskii_norm(self) -> float:
        """Discrete estimate of the right-inverse norm, ``1 / beta``."""
        return 1.0 / self.beta if self.beta > 0 else float("inf")

    def to_record(self) -> dict:
        return {
            "s": self.s,
            "dim": self.minimizer.grid.dim,
            "resolution": self.resolution,
            "beta": self.beta,
            "inverse_beta": self.bogovskii_norm,
            "diagnostics": self.diagnostics,
        }


def _smallest_pencil_pair(A, B):
    vals, vecs = scipy.linalg.eigh(A, B, subset_by_index=[0, 0])
    x = vecs[:, 0]
    mu = float(vals[0])
    residual = float(np.linalg.norm(A @ x - mu * (B @ x)) / (np.linalg.norm(A, 2) * np.linalg.norm(x)))
    return mu, x, residual


def estimate_infsup(s: float, grid: GridSpec | SpectralScale) -> InfSupEstimate:
    """Smallest ``divsup(g, s) / ||g||_{H^s}`` over the discrete ``L^2_0``.

    Solved as the smallest eigenvalue of the symmetric-definite pencil
    ``(S_s, M_s)`` restricted to the complement of the spurious modes.
    """
    s = check_order(s)
    scale = grid if isinstance(grid, SpectralScale) else build_spectral_scale(grid)
    Q = pressure_basis(scale)
    A = Q.T @ divsup_form(scale, s) @ Q
    B = Q.T @ (((1.0 + scale.neumann_eigenvalues.ravel()) ** s)[:, None] * Q)
    try:
        mu, x, residual = _smallest_pencil_pair(A, B)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"generalized eigensolver failed: {exc}", {"s": s}) from exc
    diagnostics = {
        "eigen_residual": residual,
        "tolerance": EIGEN_TOL,
        "pressure_dim": Q.shape[1],
        "spurious_dim": spurious_modes(scale).shape[1] - 1,
        "iterations": 1,
        "degenerate": bool(mu <= 0.0),
    }
    if residual > EIGEN_TOL:
        raise SolverError("inf-sup eigen-residual above tolerance", diagnostics)
    coeffs = (Q @ x).reshape(scale.grid.shape(Layout.FULL))
    g = ScalarField(scale.grid, Layout.FULL, scale.synthesise(coeffs, Layout.FULL))
    g = g * (1.0 / norm_hs(g, s, scale))
    beta = float(np.sqrt(max(mu, 0.0)))
    return InfSupEstimate(s, beta, g, scale.grid.resolution, diagnostics)
