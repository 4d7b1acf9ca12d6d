"""Numerical laboratory for the fractional-order trace-dev-div inequality.

Everything lives on the unit square/cube, discretized with ``N`` cells per
axis. Fractional Sobolev norms are spectral powers of the discrete Dirichlet
and Neumann Laplacians; all reported constants are discrete constants.
"""

from trdevdiv.grid import (
    GridSpec,
    Layout,
    ScalarField,
    SpectralScale,
    build_grid,
    build_spectral_scale,
    from_spectral,
    l2_norm,
    norm_dual,
    norm_hs,
    norm_hs_tilde,
    pairing,
    to_spectral,
)
from trdevdiv.tensor import (
    TensorField,
    VectorField,
    dev_field,
    divergence_rowwise,
    divergence_vector,
    gradient_rowwise,
    operator_norm,
    sym_field,
    trace_field,
)
from trdevdiv.duality import (
    InfSupEstimate,
    divsup,
    estimate_infsup,
    project_mean_zero,
    verify_duality_eq5,
)
from trdevdiv.tdd import (
    CtddEstimate,
    InequalityReport,
    SubspaceSpec,
    check_id_exclusion,
    estimate_ctdd,
    evaluate_inequality,
    proof_chain_verify,
)
from trdevdiv.elasticity import (
    ElasticityProblem,
    LambdaSweepRow,
    lambda_sweep,
    solve_elasticity,
    strain,
)

__version__ = "0.1.0"

__all__ = [
    "GridSpec",
    "Layout",
    "ScalarField",
    "SpectralScale",
    "build_grid",
    "build_spectral_scale",
    "from_spectral",
    "l2_norm",
    "norm_dual",
    "norm_hs",
    "norm_hs_tilde",
    "pairing",
    "to_spectral",
    "TensorField",
    "VectorField",
    "dev_field",
    "divergence_rowwise",
    "divergence_vector",
    "gradient_rowwise",
    "operator_norm",
    "sym_field",
    "trace_field",
    "InfSupEstimate",
    "divsup",
    "estimate_infsup",
    "project_mean_zero",
    "verify_duality_eq5",
    "CtddEstimate",
    "InequalityReport",
    "SubspaceSpec",
    "check_id_exclusion",
    "estimate_ctdd",
    "evaluate_inequality",
    "proof_chain_verify",
    "ElasticityProblem",
    "LambdaSweepRow",
    "lambda_sweep",
    "solve_elasticity",
    "strain",
]
