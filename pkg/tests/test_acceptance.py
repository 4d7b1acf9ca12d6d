"""Acceptance suite: one test and one PASS/FAIL line per headline criterion.

Run with ``pytest tests/test_acceptance.py -v``; the status lines are printed
straight to the terminal.
"""

import math

import numpy as np
import pytest

from trdevdiv import (
    ElasticityProblem,
    SubspaceSpec,
    build_grid,
    build_spectral_scale,
    divsup,
    estimate_ctdd,
    estimate_infsup,
    evaluate_inequality,
    lambda_sweep,
    norm_hs,
    proof_chain_verify,
    verify_duality_eq5,
)
from trdevdiv.cli import main
from trdevdiv.duality import random_pressure
from trdevdiv.elasticity import default_body_force
from trdevdiv.tdd import random_trace_mean_zero
from trdevdiv.tensor import divergence_operator_norm, gradient_operator_norm, identity_field

n = 2
ORDERS = [0.0, 0.25, 0.5, 0.75, 1.0]
LAMBDAS = [1.0, 1e2, 1e4, 1e6]


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        return ok

    return emit


@pytest.fixture(scope="module")
def scale16():
    return build_spectral_scale(build_grid(n, 16))


@pytest.fixture(scope="module")
def fields16(scale16):
    rng = np.random.default_rng(1)
    return [random_pressure(scale16, rng) for _ in range(50)]


def test_duality(report, scale16, fields16):
    worst = max(verify_duality_eq5(g, s, scale16) for g in fields16 for s in ORDERS)
    assert report("duality: 250 relative errors < 1e-8", worst < 1e-8, f"worst={worst:.2e}")


def test_infsup_sandwich(report, scale16, fields16):
    failures = checks = 0
    for s in ORDERS:
        beta = estimate_infsup(s, scale16).beta
        for g in fields16:
            ns, ds = norm_hs(g, s, scale16), divsup(g, s, scale16)
            failures += not (beta * ns <= ds <= n ** ((1 - s) / 2) * ns + 1e-8)
            checks += 1
    assert report("inf-sup sandwich: all 250 checks", checks == 250 and failures == 0,
                  f"violations={failures}/{checks}")


def test_interpolation_bounds(report):
    scale = build_spectral_scale(build_grid(n, 8))
    heinz = []
    for op in (gradient_operator_norm, divergence_operator_norm):
        end0, end1 = op(scale, 0.0), op(scale, 1.0)
        heinz += [op(scale, s) - (end0 ** (1 - s) * end1 ** s + 1e-10) for s in (0.25, 0.5, 0.75)]
    g0, g1 = gradient_operator_norm(scale, 0.0), gradient_operator_norm(scale, 1.0)
    d0, d1 = divergence_operator_norm(scale, 0.0), divergence_operator_norm(scale, 1.0)
    ends = (g0 <= 1 + 0.05 and g1 <= math.sqrt(n) + 0.05
            and d0 <= math.sqrt(n) + 0.05 and d1 <= 1 + 0.05)
    ok = max(heinz) <= 0 and ends
    assert report("interpolation: Heinz bound and endpoint values", ok,
                  f"grad(0,1)=({g0:.4f},{g1:.4f}) div(0,1)=({d0:.4f},{d1:.4f}) heinz_slack={-max(heinz):.2e}")


@pytest.fixture(scope="module")
def ctdd16(scale16):
    return {s: estimate_ctdd(scale16, s, SubspaceSpec.trace_mean_zero(scale16.grid)) for s in ORDERS}


def test_inequality_end_to_end(report, scale16, ctdd16):
    rng = np.random.default_rng(2)
    positive = all(e.c_hat > 0 for e in ctdd16.values())
    worst_margin = math.inf
    for s, est in ctdd16.items():
        C = math.sqrt(2) / est.c_hat
        for _ in range(100):
            worst_margin = min(worst_margin, evaluate_inequality(random_trace_mean_zero(scale16, rng), s, C, scale16).margin)
    dominant = all(e.c_hat >= e.beta / (math.sqrt(2) * n ** (1 + s / 2)) for s, e in ctdd16.items())
    ok = positive and worst_margin >= -1e-10 and dominant
    chats = " ".join(f"{e.c_hat:.4f}" for e in ctdd16.values())
    assert report("inequality: c_hat > 0, 500 random fields, proof-chain dominance", ok,
                  f"c_hat={chats} worst_margin={worst_margin:.3e}")


def test_identity_violation(report, scale16):
    ident = identity_field(scale16.grid)
    ok = True
    for s in ORDERS:
        for C in (1e-6, 1.0, math.sqrt(2), 1e6):
            r = evaluate_inequality(ident, s, C, scale16)
            ok &= (not r.satisfied) and r.rhs_dev == 0.0 and r.rhs_div == 0.0 and r.lhs == float(n)
    assert report("identity: violated with rhs = 0 and lhs = n exactly", ok)


def test_near_identity_decay(report, scale16):
    ts = [0.0, 0.5, 0.9, 0.99]
    chats = [estimate_ctdd(scale16, 0.5, SubspaceSpec.near_identity(scale16.grid, t), with_proof_chain=False).c_hat
             for t in ts]
    ok = all(a > b for a, b in zip(chats, chats[1:])) and chats[-1] < 0.2 * chats[0]
    assert report("near-identity: strictly decreasing, c_hat(0.99) < 0.2 c_hat(0)", ok,
                  "c_hat=" + " ".join(f"{c:.4g}" for c in chats))


def test_proof_chain(report, scale16):
    reports = [proof_chain_verify(scale16, s, n_pairs=50, rng=np.random.default_rng(3)) for s in ORDERS]
    worst = max(r.max_identity_residual for r in reports)
    ok = all(r.passed for r in reports) and worst <= 1e-12
    assert report("proof chain: 50 pairs, identity to 1e-12 and both bounds", ok,
                  f"worst_identity={worst:.2e} failures={sum(len(r.failures) for r in reports)}")


def test_lambda_robustness(report):
    grid = build_grid(n, 32)
    scale = build_spectral_scale(grid)
    problem = ElasticityProblem(grid, 1.0, 0.1, default_body_force(grid))
    ratios, worst_energy, failed = [], 0.0, False
    for s in (0.0, 0.5, 1.0):
        rows = lambda_sweep(problem, LAMBDAS, s, scale)
        failed |= any(r.failed for r in rows)
        values = [r.value for r in rows]
        ratios.append(max(values) / min(values))
        worst_energy = max(worst_energy, max(r.energy_residual for r in rows))
    ok = not failed and max(ratios) <= 2.0 and worst_energy < 1e-10
    assert report("lambda-robustness: max/min <= 2, energy identity < 1e-10", ok,
                  "ratios=" + " ".join(f"{r:.3f}" for r in ratios) + f" energy={worst_energy:.1e}")


def test_determinism_and_verify(report, tmp_path):
    same = True
    for cmd in ("norms", "infsup", "ctdd", "elasticity"):
        args = [cmd, "--resolution", "8", "--seed", "11"]
        codes = [main(args + ["--out", str(tmp_path / f"{cmd}{k}")]) for k in (1, 2)]
        same &= codes == [0, 0]
        for path in sorted((tmp_path / f"{cmd}1").iterdir()):
            same &= path.read_bytes() == (tmp_path / f"{cmd}2" / path.name).read_bytes()
    code = main(["verify", "--out", str(tmp_path / "verify")])
    assert report("infrastructure: byte-identical outputs and verify exit 0", same and code == 0,
                  f"verify_exit={code}")
