"""The trace-dev-div inequality on discrete tensor subspaces.

For a subspace ``Sigma`` of full-grid matrix fields the discrete extremal
value is

    c_hat = min_{tau in Sigma} sqrt(||dev tau||_s^2 + ||div tau||_{s-1}^2) / ||tr tau||_s,

so ``1/c_hat`` is a valid constant for the squared-sum form of the
inequality, and ``sqrt(2)/c_hat`` for the plain sum. The right form vanishes
only where the left one does, apart from the trace-free fields, which make
the raw pencil singular. The minimization is therefore split: every element
is written ``tau = z + y`` with ``z`` trace-free and ``y`` in a trace-carrying
complement, the optimal ``z`` for given ``y`` comes from a positive-definite
linear solve, and ``c_hat^2`` is the smallest eigenvalue of the resulting
Schur complement against the trace form.

Everything is assembled in cosine-coefficient coordinates: a tensor field is
the vector of its ``n*n`` entries' orthonormal Neumann coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg

from trdevdiv.duality import estimate_infsup, pressure_basis, project_pressure_space
from trdevdiv.errors import IdentityNotExcludedError, SolverError
from trdevdiv.grid import (
    GridSpec,
    Layout,
    SpectralScale,
    build_spectral_scale,
    check_order,
    norm_dual,
    norm_dual_neumann,
    norm_hs,
    norm_hs_tilde,
    pairing,
)
from trdevdiv.tensor import (
    TensorField,
    VectorField,
    coefficient_divergence_blocks,
    dev_field,
    divergence_rowwise,
    divergence_vector,
    gradient_rowwise,
    identity_field,
    scalar_identity,
    sym_field,
    trace_field,
)

__all__ = [
    "SubspaceSpec",
    "InequalityReport",
    "CtddEstimate",
    "QuadraticFormPair",
    "ProofChainReport",
    "evaluate_inequality",
    "rayleigh_ratio",
    "assemble_rayleigh_forms",
    "estimate_ctdd",
    "proof_chain_verify",
    "check_id_exclusion",
    "random_trace_mean_zero",
    "ID_EXCLUSION_TOL",
]

ID_EXCLUSION_TOL = 1e-8
EIGEN_TOL = 1e-10

TRACE_MEAN_ZERO = "trace_mean_zero"
SYM_TRACE_MEAN_ZERO = "sym_trace_mean_zero"
NEAR_IDENTITY = "near_identity"
CUSTOM = "custom"
KINDS = (TRACE_MEAN_ZERO, SYM_TRACE_MEAN_ZERO, NEAR_IDENTITY, CUSTOM)


@dataclass(frozen=True)
class SubspaceSpec:
    """Which closed subspace of matrix fields the inequality is posed on.

    ``trace_mean_zero`` means the trace lies in the discrete ``L^2_0`` (mean
    zero, no spurious pressure modes). ``near_identity`` with parameter ``t``
    replaces the ``witness`` direction of that space by ``(1-t) w + t id``; it
    never contains ``id`` for ``t < 1`` but approaches it as ``t -> 1``.
    When no witness is given, the unit extremal field of ``trace_mean_zero``
    at the same grid and order is used.
    """

    kind: str
    grid: GridSpec
    t: float | None = None
    basis: tuple = ()
    witness: TensorField | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown subspace kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == NEAR_IDENTITY:
            if self.t is None or not 0.0 <= self.t < 1.0:
                raise ValueError("near_identity needs a parameter t in [0, 1)")
        if self.kind == CUSTOM and not self.basis:
            raise ValueError("custom subspace needs a non-empty basis")
        object.__setattr__(self, "basis", tuple(self.basis))

    @classmethod
    def trace_mean_zero(cls, grid):
        return cls(TRACE_MEAN_ZERO, grid)

    @classmethod
    def sym_trace_mean_zero(cls, grid):
        return cls(SYM_TRACE_MEAN_ZERO, grid)

    @classmethod
    def near_identity(cls, grid, t, witness=None):
        return cls(NEAR_IDENTITY, grid, t=float(t), witness=witness)

    @classmethod
    def custom(cls, basis):
        basis = tuple(basis)
        return cls(CUSTOM, basis[0].grid, basis=basis)

    @property
    def label(self) -> str:
        return f"{self.kind}(t={self.t:g})" if self.kind == NEAR_IDENTITY else self.kind


# -- direct evaluation -------------------------------------------------------


@dataclass
class InequalityReport:
    s: float
    lhs: float
    rhs_dev: float
    rhs_div: float
    constant_used: float
    satisfied: bool
    margin: float

    def to_record(self) -> dict:
        return dict(self.__dict__)


def _terms(tau: TensorField, s: float, scale: SpectralScale):
    lhs = norm_hs(trace_field(tau), s, scale)
    rhs_dev = norm_hs(dev_field(tau), s, scale)
    rhs_div = norm_dual(divergence_rowwise(tau, scale), s, scale)
    return lhs, rhs_dev, rhs_div


def evaluate_inequality(tau: TensorField, s: float, C: float, scale: SpectralScale) -> InequalityReport:
    """Evaluate ``C^{-1} ||tr tau||_s <= ||dev tau||_s + ||div tau||_{s-1}`` term by term."""
    s = check_order(s)
    if not C > 0:
        raise ValueError("the constant must be positive")
    lhs, rhs_dev, rhs_div = _terms(tau, s, scale)
    margin = rhs_dev + rhs_div - lhs / C
    return InequalityReport(s, lhs, rhs_dev, rhs_div, float(C), bool(margin >= -1e-12), margin)


def rayleigh_ratio(tau: TensorField, s: float, scale: SpectralScale) -> float:
    """``sqrt(||dev||^2 + ||div||^2) / ||tr||``, the quotient minimized by ``c_hat``."""
    lhs, rhs_dev, rhs_div = _terms(tau, check_order(s), scale)
    return math.hypot(rhs_dev, rhs_div) / lhs if lhs > 0 else math.inf


# -- coefficient-space assembly ---------------------------------------------


class _Forms:
    """Bilinear forms of the inequality on tensor coefficient vectors."""

    def __init__(self, scale: SpectralScale, s: float):
        self.scale = scale
        self.s = s
        self.n = scale.dim
        self.M = scale.grid.n_nodes(Layout.FULL)
        self.hs_weight = (1.0 + scale.neumann_eigenvalues.ravel()) ** s
        self.dual_weight = (1.0 + scale.dirichlet_eigenvalues.ravel()) ** (s - 1.0)
        self.blocks = coefficient_divergence_blocks(scale)

    def split(self, X):
        n, M = self.n, self.M
        Xr = X.reshape(n, n, M, -1)
        tr = np.einsum("iimp->mp", Xr)
        dev = Xr - np.eye(n)[:, :, None, None] * (tr / n)[None, None]
        load = np.stack([-sum(self.blocks[j] @ Xr[i, j] for j in range(n)) for i in range(n)])
        return dev, load, tr

    def right(self, X, Y=None):
        dx, lx, _ = self.split(X)
        dy, ly, _ = (dx, lx, None) if Y is None else self.split(Y)
        n = self.n
        dx, dy = dx.reshape(n * n * self.M, -1), dy.reshape(n * n * self.M, -1)
        lx, ly = lx.reshape(n * lx.shape[1], -1), ly.reshape(n * ly.shape[1], -1)
        w, v = np.tile(self.hs_weight, n * n), np.tile(self.dual_weight, n)
        return dx.T @ (w[:, None] * dy) + lx.T @ (v[:, None] * ly)

    def left(self, X, Y=None):
        tx = self.split(X)[2]
        ty = tx if Y is None else self.split(Y)[2]
        return tx.T @ (self.hs_weight[:, None] * ty)

    def hs_gram(self, X, Y):
        n, M = self.n, self.M
        w = np.tile(self.hs_weight, n * n)
        return X.reshape(n * n * M, -1).T @ (w[:, None] * Y.reshape(n * n * M, -1))


def _tensor_coeffs(tau: TensorField, scale: SpectralScale) -> np.ndarray:
    return scale.analyse(tau.values, Layout.FULL).reshape(-1)


def _tensor_from_coeffs(x: np.ndarray, scale: SpectralScale, symmetric=False) -> TensorField:
    grid = scale.grid
    n = grid.dim
    values = scale.synthesise(x.reshape((n, n) + grid.shape(Layout.FULL)), Layout.FULL)
    if symmetric:
        values = 0.5 * (values + values.swapaxes(0, 1))
    return TensorField(grid, Layout.FULL, values, symmetric=symmetric)


def _trace_free_matrices(n: int, symmetric: bool) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of (symmetric) trace-free ``n x n`` matrices."""
    basis = []
    for i, j in combinations(range(n), 2):
        if symmetric:
            E = np.zeros((n, n))
            E[i, j] = E[j, i] = 1 / math.sqrt(2)
            basis.append(E)
        else:
            for a, b in ((i, j), (j, i)):
                E = np.zeros((n, n))
                E[a, b] = 1.0
                basis.append(E)
    # orthonormal basis of trace-free diagonals via the null space of (1, ..., 1)
    for d in scipy.linalg.null_space(np.ones((1, n))).T:
        basis.append(np.diag(d))
    return basis


def _lift(matrices, coeff_basis):
    """Columns ``E (x) q`` for every constant matrix ``E`` and coefficient column ``q``."""
    return np.hstack([np.kron(E.reshape(-1, 1), coeff_basis) for E in matrices])


def _identity_coeffs(scale):
    return _tensor_coeffs(identity_field(scale.grid), scale)


@dataclass
class QuadraticFormPair:
    """``right(tau) = ||dev||_s^2 + ||div||_{s-1}^2`` and ``left(tau) = ||tr||_s^2``.

    Both are given as symmetric matrices in the coordinates of ``basis``
    (columns are tensor coefficient vectors); ``n_trace_free`` leading
    columns span trace-free fields.
    """

    right: np.ndarray
    left: np.ndarray
    basis: np.ndarray = field(repr=False)
    n_trace_free: int
    scale: SpectralScale = field(repr=False)

    def tensor(self, coords) -> TensorField:
        return _tensor_from_coeffs(self.basis @ np.asarray(coords), self.scale)

    def values(self, coords):
        c = np.asarray(coords)
        return float(c @ self.right @ c), float(c @ self.left @ c)


def _witness(subspace: SubspaceSpec, s: float, scale: SpectralScale) -> np.ndarray:
    if subspace.witness is not None:
        w = _tensor_coeffs(subspace.witness, scale)
    else:
        base = estimate_ctdd(scale, s, SubspaceSpec.trace_mean_zero(scale.grid), with_proof_chain=False)
        w = _tensor_coeffs(base.extremal_tau, scale)
    forms = _Forms(scale, s)
    return w / math.sqrt(forms.hs_gram(w[:, None], w[:, None])[0, 0])


def _split_basis(scale: SpectralScale, s: float, subspace: SubspaceSpec):
    """Return ``(Z, Y)``: trace-free columns and trace-carrying columns of the subspace."""
    forms = _Forms(scale, s)
    n = scale.dim
    if subspace.kind == CUSTOM:
        X = np.column_stack([_tensor_coeffs(t, scale) for t in subspace.basis])
        sv = np.linalg.svd(X, compute_uv=False)
        if sv[-1] <= 1e-10 * sv[0]:
            raise ValueError("basis degeneracy: custom basis fields are linearly dependent")
        lv, lvec = np.linalg.eigh(forms.left(X))
        tol = 1e-12 * max(lv[-1], 1.0)
        return X @ lvec[:, lv <= tol], X @ lvec[:, lv > tol]

    Q = pressure_basis(scale)
    I_M = np.eye(forms.M)
    symmetric = subspace.kind == SYM_TRACE_MEAN_ZERO
    Z = _lift(_trace_free_matrices(n, symmetric), I_M)
    carriers = _lift([np.eye(n) / n], Q)
    if subspace.kind == NEAR_IDENTITY:
        w = _witness(subspace, s, scale)
        trw = forms.split(w[:, None])[2][:, 0]
        # drop the witness trace direction (H^s-orthogonally) and add the tilted one
        keep = scipy.linalg.null_space((Q.T @ (forms.hs_weight * trw))[None, :])
        z_t = (1.0 - subspace.t) * w + subspace.t * _identity_coeffs(scale)
        carriers = np.column_stack([_lift([np.eye(n) / n], Q @ keep), z_t])
    return Z, carriers


def assemble_rayleigh_forms(grid: GridSpec | SpectralScale, s: float, subspace: SubspaceSpec) -> QuadraticFormPair:
    s = check_order(s)
    scale = grid if isinstance(grid, SpectralScale) else build_spectral_scale(grid)
    Z, Y = _split_basis(scale, s, subspace)
    X = np.hstack([Z, Y])
    forms = _Forms(scale, s)
    return QuadraticFormPair(forms.right(X), forms.left(X), X, Z.shape[1], scale)


def check_id_exclusion(subspace: SubspaceSpec, s: float, scale: SpectralScale | None = None) -> float:
    """``H^s`` distance from the identity field to the subspace."""
    s = check_order(s)
    scale = scale or build_spectral_scale(subspace.grid)
    Z, Y = _split_basis(scale, s, subspace)
    X = np.hstack([Z, Y])
    forms = _Forms(scale, s)
    root = np.tile(np.sqrt(forms.hs_weight), scale.dim**2)
    target = root * _identity_coeffs(scale)
    coef, *_ = np.linalg.lstsq(root[:, None] * X, target, rcond=None)
    return float(np.linalg.norm(target - root * (X @ coef)))


# -- extremal constant -------------------------------------------------------


@dataclass
class CtddEstimate:
    s: float
    c_hat: float
    extremal_tau: TensorField | None = field(repr=False)
    proof_chain_constant: float
    beta: float
    resolution: int
    subspace: str
    residual_id: float
    diagnostics: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "s": self.s,
            "N": self.resolution,
            "subspace": self.subspace,
            "c_hat": self.c_hat,
            "beta": self.beta,
            "proof_chain_constant": self.proof_chain_constant,
            "residual_id": self.residual_id,
            "diagnostics": self.diagnostics,
        }


def estimate_ctdd(grid: GridSpec | SpectralScale, s: float, subspace: SubspaceSpec,
                  with_proof_chain: bool = True) -> CtddEstimate:
    """Discrete extremal tr-dev-div value on ``subspace`` via the Schur-reduced pencil."""
    s = check_order(s)
    scale = grid if isinstance(grid, SpectralScale) else build_spectral_scale(grid)
    residual_id = check_id_exclusion(subspace, s, scale)
    if residual_id <= ID_EXCLUSION_TOL:
        raise IdentityNotExcludedError(residual_id)

    forms = _Forms(scale, s)
    Z, Y = _split_basis(scale, s, subspace)
    diagnostics = {"trace_free_dim": Z.shape[1], "trace_dim": Y.shape[1], "residual_id": residual_id}
    beta = math.nan
    chain = math.nan
    if with_proof_chain:
        beta = estimate_infsup(s, scale).beta
        chain = scale.dim ** (1 + s / 2) / beta

    if Y.shape[1] == 0:
        # every field is trace-free: the inequality holds with any constant
        return CtddEstimate(s, math.inf, None, chain, beta, scale.grid.resolution,
                            subspace.label, residual_id, diagnostics)

    R_zz = forms.right(Z) if Z.shape[1] else np.zeros((0, 0))
    R_zy = forms.right(Z, Y) if Z.shape[1] else np.zeros((0, Y.shape[1]))
    R_yy = forms.right(Y)
    L_yy = forms.left(Y)
    try:
        if Z.shape[1]:
            factor = scipy.linalg.cho_factor(R_zz)
            inner = scipy.linalg.cho_solve(factor, R_zy)
            schur = R_yy - R_zy.T @ inner
        else:
            inner = np.zeros((0, Y.shape[1]))
            schur = R_yy
        schur = 0.5 * (schur + schur.T)
        vals, vecs = scipy.linalg.eigh(schur, L_yy, subset_by_index=[0, 0])
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"tr-dev-div eigensolve failed: {exc}", diagnostics) from exc
    mu, a = float(vals[0]), vecs[:, 0]
    residual = float(np.linalg.norm(schur @ a - mu * (L_yy @ a))
                     / (np.linalg.norm(schur, 2) * np.linalg.norm(a)))
    diagnostics.update(eigen_residual=residual, tolerance=EIGEN_TOL, iterations=1)
    if residual > EIGEN_TOL:
        raise SolverError("tr-dev-div eigen-residual above tolerance", diagnostics)

    x = Y @ a - Z @ (inner @ a)
    tau = _tensor_from_coeffs(x, scale, symmetric=subspace.kind == SYM_TRACE_MEAN_ZERO)
    lhs = norm_hs(trace_field(tau), s, scale)
    tau = tau * (1.0 / lhs)
    return CtddEstimate(s, math.sqrt(max(mu, 0.0)), tau, chain, beta, scale.grid.resolution,
                        subspace.label, residual_id, diagnostics)


# -- proof chain -------------------------------------------------------------


def random_trace_mean_zero(scale: SpectralScale, rng: np.random.Generator, symmetric=False) -> TensorField:
    """Random matrix field whose trace lies in the discrete ``L^2_0``."""
    grid = scale.grid
    n = grid.dim
    values = rng.standard_normal((n, n) + grid.shape(Layout.FULL))
    tau = TensorField(grid, Layout.FULL, values)
    if symmetric:
        tau = sym_field(tau)
    tr = trace_field(tau)
    excess = tr - project_pressure_space(tr, scale)
    tau = tau - scalar_identity(excess * (1.0 / n))
    return TensorField(grid, Layout.FULL, tau.values, symmetric)


@dataclass
class ProofChainReport:
    s: float
    n_pairs: int
    beta: float
    constant: float
    max_identity_residual: float
    checks: dict
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_record(self) -> dict:
        return {
            "s": self.s,
            "n_pairs": self.n_pairs,
            "beta": self.beta,
            "constant": self.constant,
            "max_identity_residual": self.max_identity_residual,
            "checks": self.checks,
            "passed": self.passed,
            "n_failures": len(self.failures),
        }


def proof_chain_verify(grid: GridSpec | SpectralScale, s: float, n_pairs: int = 50,
                       rng: np.random.Generator | None = None,
                       identity_tol: float = 1e-12, bound_tol: float = 1e-10) -> ProofChainReport:
    """Replay the constructive argument term by term on random ``(tau, v)`` pairs.

    Checks per pair, with ``tau`` in the discrete trace-mean-zero space and
    ``v`` an interior vector field of unit ``H~^{1-s}`` norm:

    * ``identity``: ``n^{-1} <tr tau, div v> = <tau, Dv> - <dev tau, Dv>``
    * ``div_bound``: ``<tau, Dv> = -<div tau, v> <= ||div tau||_{s-1}``
    * ``dev_bound``: ``-<dev tau, Dv> <= ||Dv||_{H~^{-s}} ||dev tau||_s <= n^{s/2} ||dev tau||_s``
    * ``assembled``: ``n^{-1} <tr tau, div v> <= n^{s/2} ||dev tau||_s + ||div tau||_{s-1}``
    * ``conclusion``: with ``beta`` from the inf-sup problem,
      ``beta / n^{1+s/2} ||tr tau||_s <= ||dev tau||_s + ||div tau||_{s-1}``
    """
    s = check_order(s)
    scale = grid if isinstance(grid, SpectralScale) else build_spectral_scale(grid)
    rng = rng if rng is not None else np.random.default_rng(0)
    g = scale.grid
    n = g.dim
    beta = estimate_infsup(s, scale).beta
    constant = n ** (1 + s / 2) / beta
    names = ("identity", "div_bound", "dev_bound", "assembled", "conclusion")
    checks = {k: {"passed": 0, "worst": -math.inf} for k in names}
    failures = []
    max_identity = 0.0

    def record(name, slack, i, tau, v, **extra):
        checks[name]["worst"] = max(checks[name]["worst"], slack)
        ok = slack <= (identity_tol if name == "identity" else bound_tol)
        if ok:
            checks[name]["passed"] += 1
        else:
            failures.append({"pair": i, "check": name, "slack": slack, "tau": tau, "v": v, **extra})

    for i in range(n_pairs):
        tau = random_trace_mean_zero(scale, rng)
        tau = tau * (1.0 / norm_hs(tau, s, scale))
        v = VectorField(g, Layout.INTERIOR, rng.standard_normal((n,) + g.shape(Layout.INTERIOR)))
        v = v * (1.0 / norm_hs_tilde(v, 1.0 - s, scale))

        Dv = gradient_rowwise(v, scale)
        dev = dev_field(tau)
        tr_div = pairing(trace_field(tau), divergence_vector(v, scale), scale) / n
        tau_Dv = pairing(tau, Dv, scale)
        dev_Dv = pairing(dev, Dv, scale)
        div_tau = divergence_rowwise(tau, scale)
        scale_ref = max(abs(tr_div), abs(tau_Dv), abs(dev_Dv), 1.0)
        identity_residual = abs(tr_div - (tau_Dv - dev_Dv)) / scale_ref
        max_identity = max(max_identity, identity_residual)
        record("identity", identity_residual, i, tau, v)

        norm_div = norm_dual(div_tau, s, scale)
        norm_dev = norm_hs(dev, s, scale)
        pair_div = -pairing(div_tau, v, scale)
        slack = max(abs(pair_div - tau_Dv) / scale_ref, tau_Dv - norm_div)
        record("div_bound", slack, i, tau, v)

        norm_Dv = norm_dual_neumann(Dv, s, scale)
        slack = max(-dev_Dv - norm_Dv * norm_dev, norm_Dv - n ** (s / 2))
        record("dev_bound", slack, i, tau, v)

        record("assembled", tr_div - (n ** (s / 2) * norm_dev + norm_div), i, tau, v)

        lhs = norm_hs(trace_field(tau), s, scale)
        record("conclusion", lhs / constant - (norm_dev + norm_div), i, tau, v)

    return ProofChainReport(s, n_pairs, beta, constant, max_identity, checks, failures)
