"""Linear elasticity on the unit square and the lambda-robust bound.

The displacement lives on interior nodes (homogeneous Dirichlet data) and
the bilinear form uses the discrete gradient of :mod:`trdevdiv.tensor`:

    a(u, v) = 2 mu <eps(u), eps(v)> + lambda <div u, div v>,

with both pairings on the full grid. Because the load of a manufactured
solution is built with the same discrete divergence, such solutions are
reproduced to round-off.
"""

from __future__ import annotations

import functools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from trdevdiv.errors import SolverError
from trdevdiv.grid import (
    GridSpec,
    Layout,
    SpectralScale,
    _apply_axes,
    build_spectral_scale,
    check_order,
    l2_norm,
    norm_hs,
    pairing,
)
from trdevdiv.tensor import (
    TensorField,
    _diff_1d,
    _extend_1d,
    VectorField,
    derivative_matrix,
    divergence_rowwise,
    divergence_vector,
    gradient_rowwise,
    scalar_identity,
    sym_field,
)

__all__ = [
    "ElasticityProblem",
    "LambdaSweepRow",
    "solve_elasticity",
    "strain",
    "stress",
    "energy_identity_residual",
    "manufactured_load",
    "divergence_free_field",
    "default_body_force",
    "DEFAULT_MU",
    "lambda_sweep",
]

RESIDUAL_TOL = 1e-10
MAX_REFINEMENT = 5


@dataclass(frozen=True)
class ElasticityProblem:
    grid: GridSpec
    lam: float
    mu: float
    body_force: VectorField = field(repr=False)
    dirichlet_data: VectorField | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.grid.dim != 2:
            raise ValueError("the elasticity demo is posed on the unit square (dim = 2)")
        if not self.lam > 0:
            raise ValueError(f"Lame parameter lambda must be positive, got {self.lam}")
        if not self.mu > 0:
            raise ValueError(f"Lame parameter mu must be positive, got {self.mu}")
        if self.body_force.layout is not Layout.INTERIOR or self.body_force.grid != self.grid:
            raise ValueError("body force must be an interior load on the problem grid")
        if self.dirichlet_data is not None and np.any(self.dirichlet_data.values):
            raise NotImplementedError("only homogeneous Dirichlet data is supported")

    def with_lambda(self, lam: float) -> "ElasticityProblem":
        return ElasticityProblem(self.grid, lam, self.mu, self.body_force, self.dirichlet_data)


def strain(u: VectorField, scale: SpectralScale | None = None) -> TensorField:
    """Symmetric gradient ``(Du + Du^T) / 2`` on the full grid."""
    scale = scale or build_spectral_scale(u.grid)
    return sym_field(gradient_rowwise(u, scale))


def stress(u: VectorField, lam: float, mu: float, scale: SpectralScale) -> TensorField:
    """``2 mu eps(u) + lambda (div u) id``."""
    return strain(u, scale) * (2 * mu) + scalar_identity(divergence_vector(u, scale) * lam)


def manufactured_load(u_star: VectorField, lam: float, mu: float, scale: SpectralScale) -> VectorField:
    """``f = -div sigma(u*)`` with the discrete divergence, so ``u*`` solves exactly."""
    return divergence_rowwise(stress(u_star, lam, mu, scale), scale) * -1.0


def _gram_block(scale: SpectralScale, a: int, b: int) -> np.ndarray:
    """``D_a^T W D_b`` as a Kronecker product of 1-D factors (trapezoidal weights factorize)."""
    d, e = _diff_1d(scale), _extend_1d(scale)
    w = scale.grid._weights_1d(Layout.FULL)
    mats = []
    for axis in range(scale.dim):
        left = d if axis == a else e
        right = d if axis == b else e
        mats.append(left.T @ (w[:, None] * right))
    return functools.reduce(np.kron, mats)


@functools.lru_cache(maxsize=8)
def _operators(scale: SpectralScale):
    """Dense ``(A_eps, A_div)`` with ``a(u, v) = 2 mu A_eps + lambda A_div`` on stacked components."""
    n = scale.dim
    G = [[_gram_block(scale, a, b) for b in range(n)] for a in range(n)]
    laplace = sum(G[j][j] for j in range(n))
    # sum_ij <eps_ij(u), eps_ij(v)> = 1/2 sum_ij <D_j u_i, D_j v_i> + 1/2 sum_ij <D_j u_i, D_i v_j>
    A_eps = np.block([[0.5 * (laplace if k == i else 0.0 * laplace) + 0.5 * G[i][k]
                       for i in range(n)] for k in range(n)])
    A_div = np.block([[G[k][i] for i in range(n)] for k in range(n)])
    return A_eps, A_div


class _Stiffness:
    """``K = 2 mu A_eps + lambda A_div`` with a Cholesky factor and an accurate residual.

    For large ``lambda/mu`` the double-precision residual ``b - K x`` is swamped
    by rounding in ``lambda A_div x``; refinement therefore applies the
    operator axis by axis in extended precision.
    """

    def __init__(self, scale: SpectralScale, lam: float, mu: float):
        A_eps, A_div = _operators(scale)
        self.scale, self.lam, self.mu = scale, lam, mu
        self.K = 2 * mu * A_eps + lam * A_div
        self.norm = float(np.linalg.norm(self.K, 1))
        self.factor = scipy.linalg.cho_factor(self.K)
        ld = np.longdouble
        self._d = _diff_1d(scale).astype(ld)
        self._e = _extend_1d(scale).astype(ld)
        self._w = scale.full_weights.astype(ld)

    def _grad(self, u):
        n = self.scale.dim
        return [[_apply_axes([self._d if ax == j else self._e for ax in range(n)], u[i], n)
                 for j in range(n)] for i in range(n)]

    def _grad_t(self, g, j):
        n = self.scale.dim
        return _apply_axes([(self._d if ax == j else self._e).T for ax in range(n)], self._w * g, n)

    def residual(self, x, b):
        n = self.scale.dim
        u = x.astype(np.longdouble).reshape((n,) + self.scale.grid.shape(Layout.INTERIOR))
        Du = self._grad(u)
        div = sum(Du[j][j] for j in range(n))
        Kx = np.zeros_like(u)
        for i in range(n):
            for j in range(n):
                Kx[i] += 2 * self.mu * self._grad_t(0.5 * (Du[i][j] + Du[j][i]), j)
            Kx[i] += self.lam * self._grad_t(div, i)
        return b.astype(np.longdouble) - Kx.reshape(-1)

    def _backward(self, x, b, r):
        return float(np.linalg.norm(r) / (self.norm * np.linalg.norm(x) + np.linalg.norm(b)))

    def solve(self, b):
        x = scipy.linalg.cho_solve(self.factor, b)
        r = self.residual(x, b)
        steps = 0
        while steps < MAX_REFINEMENT:
            dx = scipy.linalg.cho_solve(self.factor, r.astype(float))
            x = x + dx
            r = self.residual(x, b)
            steps += 1
            if np.linalg.norm(dx) <= 4 * np.finfo(float).eps * np.linalg.norm(x):
                break
        return x, self._backward(x, b, r), steps


def solve_elasticity(problem: ElasticityProblem, scale: SpectralScale | None = None,
                     return_info: bool = False):
    """Discrete displacement ``u_h`` with ``a(u_h, v) = (f, v)`` for all interior ``v``.

    The symmetric positive-definite system is factored densely and polished by
    iterative refinement; the normwise backward error
    ``|b - K x| / (|K| |x| + |b|)`` must end below ``1e-10``.
    """
    scale = scale or build_spectral_scale(problem.grid)
    h2 = problem.grid.spacing ** problem.grid.dim
    b = h2 * problem.body_force.values.reshape(-1)
    info = {"lambda": problem.lam, "mu": problem.mu}
    if not np.any(b):
        x, residual, steps = np.zeros_like(b), 0.0, 0
    else:
        try:
            x, residual, steps = _Stiffness(scale, problem.lam, problem.mu).solve(b)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"elasticity factorization failed: {exc}", info) from exc
    info.update(residual=residual, iterations=steps)
    if not residual <= RESIDUAL_TOL:
        raise SolverError("elasticity solve did not reach the residual tolerance", info)
    u = VectorField(problem.grid, Layout.INTERIOR, x.reshape((2,) + problem.grid.shape(Layout.INTERIOR)))
    return (u, info) if return_info else u


def energy_identity_residual(problem: ElasticityProblem, u: VectorField, scale: SpectralScale) -> tuple[float, float]:
    """``(energy, relative residual)`` of ``2 mu ||eps||^2 + lambda ||div||^2 = (f, u)``."""
    eps = strain(u, scale)
    div = divergence_vector(u, scale)
    energy = 2 * problem.mu * pairing(eps, eps, scale) + problem.lam * pairing(div, div, scale)
    work = pairing(problem.body_force, u, scale)
    if work == 0.0 and energy == 0.0:
        return 0.0, 0.0
    return energy, abs(energy - work) / abs(work)


def divergence_free_field(scale: SpectralScale, stream) -> VectorField:
    """Discretely divergence-free interior field built from a stream function.

    The continuum curl ``(d_y psi, -d_x psi)`` of ``stream`` (a callable
    returning ``(psi_x, psi_y)`` partials) is sampled on interior nodes and
    L2-projected onto the kernel of the discrete divergence.
    """
    grid = scale.grid
    X, Y = grid.meshgrid(Layout.INTERIOR)
    psi_x, psi_y = stream(X, Y)
    x = np.concatenate([psi_y.ravel(), -psi_x.ravel()])
    Div = np.hstack([derivative_matrix(scale, j) for j in range(grid.dim)])
    # L2 projection with uniform interior weights: subtract the row-space part
    coef, *_ = np.linalg.lstsq(Div.T, x, rcond=None)
    x = x - Div.T @ coef
    return VectorField(grid, Layout.INTERIOR, x.reshape((2,) + grid.shape(Layout.INTERIOR)))


DEFAULT_MU = 0.1


def default_body_force(grid: GridSpec) -> VectorField:
    """Smooth gradient load ``f = grad(cos(pi x) cos(pi y))`` used by the sweeps.

    For large lambda it is balanced by the pressure ``lambda div u`` alone, so
    the swept quantity converges under refinement.
    """
    X, Y = grid.meshgrid(Layout.INTERIOR)
    pi = math.pi
    fx = -pi * np.sin(pi * X) * np.cos(pi * Y)
    fy = -pi * np.cos(pi * X) * np.sin(pi * Y)
    return VectorField(grid, Layout.INTERIOR, np.stack([fx, fy]))


@dataclass
class LambdaSweepRow:
    lam: float
    s: float
    N: int
    value: float
    energy: float
    energy_residual: float
    iterations: int
    div_l2: float
    failed: bool = False
    error: str = ""

    def to_record(self) -> dict:
        return {
            "lambda": self.lam,
            "s": self.s,
            "N": self.N,
            "value": self.value,
            "energy": self.energy,
            "energy_residual": self.energy_residual,
            "iterations": self.iterations,
            "div_l2": self.div_l2,
            "failed": self.failed,
            "error": self.error,
        }


def _sweep_row(problem, lam, s, scale) -> LambdaSweepRow:
    N = problem.grid.resolution
    p = problem.with_lambda(lam)
    try:
        u, info = solve_elasticity(p, scale, return_info=True)
    except SolverError as exc:
        return LambdaSweepRow(lam, s, N, math.nan, math.nan, math.nan,
                              exc.diagnostics.get("iterations", -1), math.nan, True, str(exc))
    div = divergence_vector(u, scale)
    energy, residual = energy_identity_residual(p, u, scale)
    return LambdaSweepRow(lam, s, N, lam * norm_hs(div, s, scale), energy, residual,
                          info["iterations"], l2_norm(div, scale))


def lambda_sweep(problem: ElasticityProblem, lambdas, s: float,
                 scale: SpectralScale | None = None, workers: int | None = None) -> list[LambdaSweepRow]:
    """``lambda * ||div u_h||_{H^s}`` for each lambda; failed solves are flagged, not raised.

    Rows are solved concurrently (each solve is independent) and returned in
    the order of ``lambdas``.
    """
    s = check_order(s)
    lambdas = [float(x) for x in lambdas]
    if any(not x > 0 for x in lambdas):
        raise ValueError("lambdas must be positive")
    if lambdas != sorted(lambdas):
        raise ValueError("lambdas must be sorted ascending")
    scale = scale or build_spectral_scale(problem.grid)
    _operators(scale)  # assemble once before the workers share it
    workers = workers or max(1, min(len(lambdas), os.cpu_count() or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda lam: _sweep_row(problem, lam, s, scale), lambdas))
