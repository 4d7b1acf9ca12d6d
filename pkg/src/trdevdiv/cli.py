"""Command-line front end: ``trdevdiv {norms,infsup,ctdd,elasticity,verify}``.

Settings come from an optional JSON config file (``--config``) whose keys
match the long flag names (``resolution``, ``s``, ``lambda``, ``near_id_t``,
...); flags given on the command line win. Every output file carries the
config digest, the seed and the package version.

Exit codes: 0 success, 1 invariant failure, 2 configuration error,
3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from trdevdiv import __version__
from trdevdiv.duality import divsup, estimate_infsup, random_pressure, verify_duality_eq5
from trdevdiv.elasticity import DEFAULT_MU, ElasticityProblem, default_body_force, lambda_sweep
from trdevdiv.errors import IdentityNotExcludedError, SolverError
from trdevdiv.grid import (
    GridSpec,
    Layout,
    ScalarField,
    build_spectral_scale,
    norm_dual,
    norm_dual_neumann,
    norm_hs,
    norm_hs_tilde,
)
from trdevdiv.io import FieldFormatError, config_digest, load_field, write_csv, write_json
from trdevdiv.tdd import (
    SubspaceSpec,
    estimate_ctdd,
    evaluate_inequality,
    proof_chain_verify,
    random_trace_mean_zero,
)
from trdevdiv.tensor import (
    VectorField,
    divergence_operator_norm,
    gradient_operator_norm,
    identity_field,
)

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3
COMMANDS = ("norms", "infsup", "ctdd", "elasticity", "verify")
SUBSPACES = ("trace_mean_zero", "sym_trace_mean_zero", "near_identity", "identity")
LOADS = ("gradient", "zero")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    experiment: str
    dim: int = 2
    resolution: list = field(default_factory=lambda: [8])
    s: list = field(default_factory=lambda: [0.0, 0.5, 1.0])
    subspace: str = "trace_mean_zero"
    near_id_t: list = field(default_factory=lambda: [0.0])
    lambdas: list = field(default_factory=lambda: [1.0, 1e2, 1e4, 1e6])
    mu: float = DEFAULT_MU
    load: str = "gradient"
    seed: int = 0
    out: str = "out"
    tol: float = 1e-10
    field: str | None = None
    n_random: int = 3
    n_pairs: int = 20

    def validate(self):
        if self.experiment not in COMMANDS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.dim not in (2, 3):
            raise ConfigError(f"dim must be 2 or 3, got {self.dim}")
        if not self.resolution or any(int(N) != N or N < 4 for N in self.resolution):
            raise ConfigError(f"resolutions must be integers >= 4, got {self.resolution}")
        self.resolution = sorted({int(N) for N in self.resolution})
        if not self.s or any(not 0.0 <= s <= 1.0 for s in self.s):
            raise ConfigError(f"s values must lie in [0, 1], got {self.s}")
        self.s = sorted(set(float(s) for s in self.s))
        if self.subspace not in SUBSPACES:
            raise ConfigError(f"subspace must be one of {SUBSPACES}, got {self.subspace!r}")
        if any(not 0.0 <= t < 1.0 for t in self.near_id_t):
            raise ConfigError(f"near-identity parameters must lie in [0, 1), got {self.near_id_t}")
        self.near_id_t = sorted(set(float(t) for t in self.near_id_t))
        if not self.lambdas or any(not lam > 0 for lam in self.lambdas):
            raise ConfigError(f"lambda values must be positive, got {self.lambdas}")
        self.lambdas = sorted(set(float(lam) for lam in self.lambdas))
        if not self.mu > 0:
            raise ConfigError(f"mu must be positive, got {self.mu}")
        if self.load not in LOADS:
            raise ConfigError(f"load must be one of {LOADS}, got {self.load!r}")
        if self.experiment == "elasticity" and self.dim != 2:
            raise ConfigError("the elasticity experiment runs on the unit square (dim 2)")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.n_random < 1 or self.n_pairs < 1:
            raise ConfigError("n_random and n_pairs must be positive")
        return self

    def digest(self) -> str:
        data = asdict(self)
        data.pop("out")
        return config_digest(data)

    def meta(self) -> dict:
        return {
            "tool": "trdevdiv",
            "version": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "experiment": self.experiment,
            "config_digest": self.digest(),
            "seed": self.seed,
        }


# flag name -> RunConfig attribute (config-file keys use the flag names)
_KEYS = {
    "dim": "dim", "resolution": "resolution", "s": "s", "subspace": "subspace",
    "near_id_t": "near_id_t", "lambda": "lambdas", "mu": "mu", "load": "load",
    "seed": "seed", "out": "out", "tol": "tol", "field": "field",
    "n_random": "n_random", "n_pairs": "n_pairs",
}
_LISTS = {"resolution", "s", "near_id_t", "lambdas"}


def _read_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = sorted(set(data) - set(_KEYS) - {"experiment"})
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return data


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        data = _read_config_file(args.config)
        if data.get("experiment", args.command) != args.command:
            raise ConfigError(f"config is for {data['experiment']!r}, not {args.command!r}")
        values.update({_KEYS[k]: v for k, v in data.items() if k != "experiment"})
    for key, attr in _KEYS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            values[attr] = flag
    for attr in _LISTS & set(values):
        if not isinstance(values[attr], list):
            values[attr] = [values[attr]]
    if "resolution" not in values and values.get("dim", 2) == 3:
        values["resolution"] = [4]
    try:
        cfg = RunConfig(args.command, **values)
        cfg.dim = int(cfg.dim)
        cfg.mu, cfg.tol = float(cfg.mu), float(cfg.tol)
        cfg.seed = int(cfg.seed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


# -- plotting ----------------------------------------------------------------


def _plot(path, series, xlabel, ylabel, title, meta, logx=False, logy=False):
    """Self-contained SVG; byte-stable for identical inputs."""
    import matplotlib
    from matplotlib.figure import Figure

    fig = Figure(figsize=(6, 4.2))
    ax = fig.add_subplot()
    for label, xs, ys, style in series:
        ax.plot(xs, ys, style, label=label)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if series:
        ax.legend(fontsize="small")
    fig.tight_layout()
    desc = " ".join(f"{k}={meta[k]}" for k in sorted(meta))
    with matplotlib.rc_context({"svg.hashsalt": meta["config_digest"], "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None, "Description": desc})


# -- commands ----------------------------------------------------------------


def _zero_extend(f: ScalarField) -> ScalarField:
    values = np.zeros(f.grid.shape(Layout.FULL))
    values[(slice(1, -1),) * f.grid.dim] = f.values
    return ScalarField(f.grid, Layout.FULL, values)


def _norm_row(name, fld, s, scale):
    row = {"field": name, "layout": fld.layout.value, "N": fld.grid.resolution, "s": s,
           "hs": "", "hs_tilde": "", "dual_s_minus_1": "", "dual_minus_s": ""}
    if fld.layout is Layout.FULL:
        row["hs"] = norm_hs(fld, s, scale)
        row["dual_minus_s"] = norm_dual_neumann(fld, s, scale)
    else:
        row["hs_tilde"] = norm_hs_tilde(fld, s, scale)
        row["dual_s_minus_1"] = norm_dual(fld, s, scale)
        if isinstance(fld, ScalarField):
            row["hs"] = norm_hs(_zero_extend(fld), s, scale)
    return row


def cmd_norms(cfg: RunConfig, out: Path) -> int:
    """Norms of a supplied field file, or of seeded random interior fields."""
    fields = []
    if cfg.field:
        try:
            fields.append((Path(cfg.field).name, load_field(cfg.field)))
        except FileNotFoundError as exc:
            raise ConfigError(f"field file not found: {cfg.field}") from exc
        except FieldFormatError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        rng = np.random.default_rng(cfg.seed)
        for N in cfg.resolution:
            grid = GridSpec(cfg.dim, N)
            for k in range(cfg.n_random):
                values = rng.standard_normal(grid.shape(Layout.INTERIOR))
                fields.append((f"random{k}", ScalarField(grid, Layout.INTERIOR, values)))
    rows = []
    scales = {}
    for name, fld in fields:
        scale = scales.setdefault(fld.grid, build_spectral_scale(fld.grid))
        rows.extend(_norm_row(name, fld, s, scale) for s in cfg.s)
    cols = ["field", "layout", "N", "s", "hs", "hs_tilde", "dual_s_minus_1", "dual_minus_s"]
    meta = cfg.meta()
    write_csv(out / "norms.csv", cols, rows, meta)
    write_json(out / "norms.json", {"rows": rows}, meta)
    for r in rows:
        print(f"{r['field']:>10} N={r['N']:<3} s={r['s']:<5g} hs={_fmt(r['hs'])} hs~={_fmt(r['hs_tilde'])}")
    return EXIT_OK


def _fmt(x):
    return f"{x:.6g}" if isinstance(x, float) else "-"


def cmd_infsup(cfg: RunConfig, out: Path) -> int:
    rows, records = [], []
    status = EXIT_OK
    for N in cfg.resolution:
        scale = build_spectral_scale(GridSpec(cfg.dim, N))
        for s in cfg.s:
            try:
                est = estimate_infsup(s, scale)
            except SolverError as exc:
                status = EXIT_SOLVER
                rows.append({"s": s, "N": N, "beta": math.nan, "inverse_beta": math.nan,
                             "failed": True, "error": str(exc)})
                records.append({"s": s, "N": N, "error": str(exc), "diagnostics": exc.diagnostics})
                continue
            rows.append({"s": s, "N": N, "beta": est.beta, "inverse_beta": est.bogovskii_norm,
                         "failed": False, "error": ""})
            records.append(est.to_record())
            print(f"N={N:<3} s={s:<5g} beta={est.beta:.6f} 1/beta={est.bogovskii_norm:.4f}")
            if est.diagnostics["degenerate"]:
                status = max(status, EXIT_INVARIANT)
    meta = cfg.meta()
    write_csv(out / "infsup.csv", ["s", "N", "beta", "inverse_beta", "failed", "error"], rows, meta)
    write_json(out / "infsup.json", {"records": records}, meta)
    series = []
    for N in cfg.resolution:
        pts = [(r["s"], r["beta"]) for r in rows if r["N"] == N and not r["failed"]]
        if pts:
            xs, ys = zip(*pts)
            series.append((f"N = {N}", xs, ys, "o-"))
    _plot(out / "infsup.svg", series, "s", "beta", "discrete inf-sup constant", meta)
    return status


def _subspaces(cfg: RunConfig, grid: GridSpec):
    if cfg.subspace == "trace_mean_zero":
        return [SubspaceSpec.trace_mean_zero(grid)]
    if cfg.subspace == "sym_trace_mean_zero":
        return [SubspaceSpec.sym_trace_mean_zero(grid)]
    if cfg.subspace == "near_identity":
        return [SubspaceSpec.near_identity(grid, t) for t in cfg.near_id_t]
    return [SubspaceSpec.custom([identity_field(grid)])]


def cmd_ctdd(cfg: RunConfig, out: Path) -> int:
    rng = np.random.default_rng(cfg.seed)
    rows, records = [], []
    status = EXIT_OK
    for N in cfg.resolution:
        grid = GridSpec(cfg.dim, N)
        scale = build_spectral_scale(grid)
        for s in cfg.s:
            chain_ok = ""
            if cfg.subspace in ("trace_mean_zero", "sym_trace_mean_zero"):
                report = proof_chain_verify(scale, s, n_pairs=cfg.n_pairs, rng=rng)
                chain_ok = report.passed
                records.append({"proof_chain": report.to_record(), "N": N})
                if not report.passed:
                    status = max(status, EXIT_INVARIANT)
            for sub in _subspaces(cfg, grid):
                row = {"s": s, "N": N, "subspace": sub.label if sub.kind != "custom" else "identity",
                       "proof_chain_ok": chain_ok, "error": ""}
                try:
                    est = estimate_ctdd(scale, s, sub)
                except IdentityNotExcludedError as exc:
                    status = max(status, EXIT_INVARIANT)
                    row.update(c_hat=math.nan, beta=math.nan, proof_chain_constant=math.nan,
                               residual_id=exc.residual, dominance_ok=False, error=str(exc))
                    rows.append(row)
                    records.append(dict(row))
                    print(f"N={N:<3} s={s:<5g} {row['subspace']}: {exc}")
                    continue
                except SolverError as exc:
                    status = EXIT_SOLVER
                    row.update(c_hat=math.nan, error=str(exc))
                    rows.append(row)
                    records.append({**row, "diagnostics": exc.diagnostics})
                    continue
                lower = 1.0 / (math.sqrt(2.0) * est.proof_chain_constant)
                dominance = est.c_hat >= lower if sub.kind in ("trace_mean_zero", "sym_trace_mean_zero") else ""
                if not est.c_hat > 0 or dominance is False:
                    status = max(status, EXIT_INVARIANT)
                row.update(c_hat=est.c_hat, beta=est.beta, proof_chain_constant=est.proof_chain_constant,
                           residual_id=est.residual_id, dominance_ok=dominance)
                rows.append(row)
                records.append({**est.to_record(), "proof_chain_lower_bound": lower,
                                "dominance_ok": dominance})
                print(f"N={N:<3} s={s:<5g} {row['subspace']}: c_hat={est.c_hat:.6g} "
                      f"beta/(sqrt2 n^(1+s/2))={lower:.6g}")
    meta = cfg.meta()
    cols = ["s", "N", "subspace", "c_hat", "beta", "proof_chain_constant", "residual_id",
            "dominance_ok", "proof_chain_ok", "error"]
    write_csv(out / "ctdd.csv", cols, rows, meta)
    write_json(out / "ctdd.json", {"records": records}, meta)
    series = []
    for N in cfg.resolution:
        for label in dict.fromkeys(r["subspace"] for r in rows if r["N"] == N):
            pts = [(r["s"], r["c_hat"]) for r in rows
                   if r["N"] == N and r["subspace"] == label and not r["error"]]
            if pts:
                xs, ys = zip(*pts)
                series.append((f"c_hat {label}, N = {N}", xs, ys, "o-"))
        pts = {r["s"]: r["proof_chain_constant"] for r in rows if r["N"] == N and not r["error"]}
        if pts:
            xs = sorted(pts)
            series.append((f"1/(sqrt2 C_chain), N = {N}", xs,
                           [1.0 / (math.sqrt(2.0) * pts[x]) for x in xs], "k--"))
    _plot(out / "ctdd.svg", series, "s", "constant", "extremal value vs proof-chain bound", meta)
    return status


def _load(cfg: RunConfig, grid: GridSpec) -> VectorField:
    if cfg.load == "zero":
        return VectorField.zeros(grid, Layout.INTERIOR)
    return default_body_force(grid)


def cmd_elasticity(cfg: RunConfig, out: Path) -> int:
    rows, summary = [], []
    status = EXIT_OK
    for N in cfg.resolution:
        grid = GridSpec(2, N)
        scale = build_spectral_scale(grid)
        problem = ElasticityProblem(grid, cfg.lambdas[0], cfg.mu, _load(cfg, grid))
        for s in cfg.s:
            sweep = lambda_sweep(problem, cfg.lambdas, s, scale)
            good = [r for r in sweep if not r.failed]
            if len(good) < len(sweep):
                status = EXIT_SOLVER
            energy_ok = all(r.energy_residual <= cfg.tol for r in good)
            div = [r.div_l2 for r in good]
            monotone = all(a >= b for a, b in zip(div, div[1:]))
            values = [r.value for r in good]
            ratio = max(values) / min(values) if values and min(values) > 0 else math.nan
            if not (energy_ok and monotone):
                status = max(status, EXIT_INVARIANT)
            summary.append({"N": N, "s": s, "ratio": ratio, "energy_ok": energy_ok,
                            "monotone_damping": monotone})
            rows.extend(sweep)
            print(f"N={N:<3} s={s:<5g} values={['%.5g' % v for v in values]} max/min={ratio:.4g}")
    meta = cfg.meta()
    cols = ["lambda", "s", "N", "value", "energy", "iterations"]
    write_csv(out / "elasticity.csv", cols, [r.to_record() for r in rows], meta)
    write_json(out / "elasticity.json", {"mu": cfg.mu, "load": cfg.load,
                                         "rows": [r.to_record() for r in rows], "summary": summary}, meta)
    series = []
    for N in cfg.resolution:
        for s in cfg.s:
            pts = [(r.lam, r.value) for r in rows if r.N == N and r.s == s and not r.failed]
            if pts:
                xs, ys = zip(*pts)
                series.append((f"s = {s:g}, N = {N}", xs, ys, "o-"))
    _plot(out / "elasticity.svg", series, "lambda", "lambda ||div u_h||_{H^s}",
          f"lambda-robustness (mu = {cfg.mu:g})", meta, logx=True)
    return status


# -- verify ------------------------------------------------------------------


def _check(results, name, passed, **detail):
    results.append({"check": name, "passed": bool(passed), **detail})
    print(f"{'PASS' if passed else 'FAIL'}  {name}  " + " ".join(f"{k}={v:.3g}" if isinstance(v, float)
                                                            else f"{k}={v}" for k, v in detail.items()))


def cmd_verify(cfg: RunConfig, out: Path) -> int:
    """Run the invariant suite at the configured (small) resolution."""
    N = cfg.resolution[0]
    n = cfg.dim
    grid = GridSpec(n, N)
    scale = build_spectral_scale(grid)
    rng = np.random.default_rng(cfg.seed)
    orders = [0.0, 0.25, 0.5, 0.75, 1.0]
    results = []

    fields = [random_pressure(scale, rng) for _ in range(10)]
    worst = max(verify_duality_eq5(g, s, scale) for g in fields for s in orders)
    _check(results, "duality", worst < 1e-8, worst_rel_err=worst)

    bad = 0
    for s in orders:
        beta = estimate_infsup(s, scale).beta
        for g in fields:
            ns, ds = norm_hs(g, s, scale), divsup(g, s, scale)
            bad += not (beta * ns <= ds <= n ** ((1 - s) / 2) * ns + 1e-8)
    _check(results, "infsup_sandwich", bad == 0, violations=bad)

    g0, g1 = gradient_operator_norm(scale, 0.0), gradient_operator_norm(scale, 1.0)
    d0, d1 = divergence_operator_norm(scale, 0.0), divergence_operator_norm(scale, 1.0)
    heinz = all(gradient_operator_norm(scale, s) <= g0 ** (1 - s) * g1 ** s + 1e-10
                and divergence_operator_norm(scale, s) <= d0 ** (1 - s) * d1 ** s + 1e-10
                for s in (0.25, 0.5, 0.75))
    ends = g0 <= 1 + 0.05 and g1 <= math.sqrt(n) + 0.05 and d0 <= math.sqrt(n) + 0.05 and d1 <= 1 + 0.05
    _check(results, "interpolation_bounds", heinz and ends, grad_0=g0, grad_1=g1, div_0=d0, div_1=d1)

    ident = identity_field(grid)
    exact = all((lambda r: not r.satisfied and r.rhs_dev + r.rhs_div == 0.0 and r.lhs == n)(
        evaluate_inequality(ident, s, C, scale)) for s in orders for C in (1.0, 1e6))
    _check(results, "identity_violation", exact)

    chat_ok, chain_ok, ineq_bad = True, True, 0
    for s in (0.0, 0.5, 1.0):
        est = estimate_ctdd(scale, s, SubspaceSpec.trace_mean_zero(grid))
        chat_ok &= est.c_hat > 0 and est.c_hat >= 1.0 / (math.sqrt(2.0) * est.proof_chain_constant)
        for _ in range(10):
            tau = random_trace_mean_zero(scale, rng)
            ineq_bad += evaluate_inequality(tau, s, math.sqrt(2.0) / est.c_hat, scale).margin < -1e-10
        chain_ok &= proof_chain_verify(scale, s, n_pairs=cfg.n_pairs, rng=rng).passed
    _check(results, "ctdd_positive_and_dominant", chat_ok)
    _check(results, "inequality_random_fields", ineq_bad == 0, violations=ineq_bad)
    _check(results, "proof_chain", chain_ok)

    chats = [estimate_ctdd(scale, 0.5, SubspaceSpec.near_identity(grid, t), with_proof_chain=False).c_hat
             for t in (0.0, 0.5, 0.9, 0.99)]
    _check(results, "near_identity_decay",
           all(a > b for a, b in zip(chats, chats[1:])) and chats[-1] < 0.2 * chats[0],
           ratio=chats[-1] / chats[0])

    if n == 2:
        egrid = GridSpec(2, max(N, 16))
        escale = build_spectral_scale(egrid)
        problem = ElasticityProblem(egrid, 1.0, cfg.mu, default_body_force(egrid))
        ratio, energy = 0.0, 0.0
        for s in (0.0, 0.5, 1.0):
            sweep = lambda_sweep(problem, [1.0, 1e2, 1e4, 1e6], s, escale)
            values = [r.value for r in sweep]
            ratio = max(ratio, max(values) / min(values))
            energy = max([energy] + [r.energy_residual for r in sweep])
        _check(results, "elasticity_lambda_robust", ratio <= 2.0, max_ratio=ratio)
        _check(results, "elasticity_energy_identity", energy < cfg.tol, worst=energy)

    a = random_pressure(scale, np.random.default_rng(cfg.seed)).values
    b = random_pressure(scale, np.random.default_rng(cfg.seed)).values
    _check(results, "seeded_determinism", a.tobytes() == b.tobytes())

    meta = cfg.meta()
    write_json(out / "verify.json", {"N": N, "dim": n, "results": results}, meta)
    write_csv(out / "verify.csv", ["check", "passed"], results, meta)
    failed = [r["check"] for r in results if not r["passed"]]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_INVARIANT if failed else EXIT_OK


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--dim", type=int)
    common.add_argument("--resolution", type=int, action="append", help="cells per axis (repeatable)")
    common.add_argument("--s", type=float, action="append", help="Sobolev order in [0, 1] (repeatable)")
    common.add_argument("--subspace", choices=SUBSPACES)
    common.add_argument("--near-id-t", dest="near_id_t", type=float, action="append")
    common.add_argument("--lambda", dest="lambda", type=float, action="append", help="Lame lambda (repeatable)")
    common.add_argument("--mu", type=float)
    common.add_argument("--load", choices=LOADS)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory (created if absent)")
    common.add_argument("--tol", type=float)
    common.add_argument("--field", help="field file (JSON) for the norms command")
    common.add_argument("--n-random", dest="n_random", type=int)
    common.add_argument("--n-pairs", dest="n_pairs", type=int)

    parser = argparse.ArgumentParser(prog="trdevdiv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"trdevdiv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


_HANDLERS = {"norms": cmd_norms, "infsup": cmd_infsup, "ctdd": cmd_ctdd,
             "elasticity": cmd_elasticity, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        return _HANDLERS[cfg.experiment](cfg, out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
