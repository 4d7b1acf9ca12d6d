"""Bounding the trace of a tensor field by its deviator and divergence.

For tensor fields whose trace has zero mean, ||tr tau||_s is controlled by
||dev tau||_s + ||div tau||_{s-1}. The identity field breaks the estimate
outright (trace n, no deviator, no divergence), and fields that drift
towards the identity make the best constant deteriorate.
"""

import math

import numpy as np

from trdevdiv import SubspaceSpec, build_grid, build_spectral_scale, estimate_ctdd, evaluate_inequality
from trdevdiv.tdd import random_trace_mean_zero
from trdevdiv.tensor import identity_field

grid = build_grid(2, 12)
scale = build_spectral_scale(grid)

print("Best discrete constant c_hat (smallest right/left ratio) on the mean-zero-trace space:")
print(f"{'s':>5} {'c_hat':>9} {'beta':>9} {'beta/(sqrt2 n^(1+s/2))':>24}")
for s in (0.0, 0.25, 0.5, 0.75, 1.0):
    est = estimate_ctdd(scale, s, SubspaceSpec.trace_mean_zero(grid))
    floor = est.beta / (math.sqrt(2) * 2 ** (1 + s / 2))
    print(f"{s:5.2f} {est.c_hat:9.5f} {est.beta:9.5f} {floor:24.5f}")

est = estimate_ctdd(scale, 0.5, SubspaceSpec.trace_mean_zero(grid))
rng = np.random.default_rng(0)
margins = [evaluate_inequality(random_trace_mean_zero(scale, rng), 0.5, math.sqrt(2) / est.c_hat, scale).margin
           for _ in range(200)]
print(f"\n200 random fields at s=1/2, constant sqrt(2)/c_hat: smallest margin {min(margins):.3f}")

r = evaluate_inequality(identity_field(grid), 0.5, 1e6, scale)
print(f"identity field: lhs={r.lhs}, dev={r.rhs_dev}, div={r.rhs_div}, satisfied={r.satisfied}")

print("\nDrifting the extremal trace direction towards the identity:")
for t in (0.0, 0.5, 0.9, 0.99, 0.999):
    est = estimate_ctdd(scale, 0.5, SubspaceSpec.near_identity(grid, t), with_proof_chain=False)
    print(f"  t={t:<6g} c_hat={est.c_hat:.3e}")
