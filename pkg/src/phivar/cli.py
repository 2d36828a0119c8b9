"""Command-line front end: parsing, orchestration, report emission.

Standard output carries data only (JSON or CSV); progress and errors in
human-readable form go to standard error.  Module errors exit nonzero
with a machine-readable error object on stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

from . import engine, stochastic, theory, variation
from .base import tent, trig
from .errors import PhiVarError

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    command: str
    base: str = "tent"
    nu: float = 1.0
    rho: float = 0.0
    b: int = 2
    alpha_sign: int = 1
    critical: bool = True
    magnitude: float | None = None
    n_list: list[int] = field(default_factory=lambda: [1])
    t_list: list[float] = field(default_factory=lambda: [1.0])
    q_list: list[float] = field(default_factory=list)
    tol: float = 1e-12
    seed: int = 0
    count: int = 100_000
    threads: int = 1
    fmt: str = "json"
    output: str | None = None
    sign: int = 1
    cov_terms: int = 5
    max_n: int = 6
    path_n: int = 10_000

    def spec(self) -> engine.FractalSpec:
        base = tent() if self.base == "tent" else trig(self.nu, self.rho)
        if self.critical:
            return engine.critical(base, self.b, self.alpha_sign)
        return engine.FractalSpec(
            base, self.b, self.alpha_sign, engine.AlphaMode.GENERAL, self.magnitude
        )


def _f(x) -> str:
    return "" if x is None else f"{float(x):.17g}"


def _parse_sign(text: str) -> int:
    if text in ("+", "+1", "1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError(f"sign must be + or -, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="phivar", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    spec_flags = argparse.ArgumentParser(add_help=False)
    spec_flags.add_argument("--base", choices=("tent", "trig"), default="tent")
    spec_flags.add_argument("--nu", type=float, default=None, help="trig sine amplitude")
    spec_flags.add_argument("--rho", type=float, default=None, help="trig cosine amplitude")
    spec_flags.add_argument("--b", type=int, default=2)
    spec_flags.add_argument("--alpha-sign", type=_parse_sign, default=1)
    spec_flags.add_argument("--critical", action="store_true", help="|alpha| = 1/b exactly")
    spec_flags.add_argument("--magnitude", type=float, default=None, help="|alpha| in general mode")

    out_flags = argparse.ArgumentParser(add_help=False)
    out_flags.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    out_flags.add_argument("--output", default=None, help="output path (default stdout)")
    out_flags.add_argument(
        "--threads", type=int, default=int(os.environ.get("PHIVAR_THREADS", "1"))
    )

    p = sub.add_parser("eval", parents=[spec_flags, out_flags], help="evaluate f(t)")
    p.add_argument("--t", type=float, nargs="+", required=True)
    p.add_argument("--tol", type=float, default=1e-12)

    p = sub.add_parser("variation", parents=[spec_flags, out_flags], help="variation report")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--t", type=float, nargs="+", default=[1.0])
    p.add_argument("--q", type=float, nargs="*", default=[])

    p = sub.add_parser("limit", parents=[spec_flags, out_flags], help="closed-form constants")
    p.add_argument("--t", type=float, nargs="+", default=[1.0])

    p = sub.add_parser("chain", parents=[out_flags], help="chain matrices and constants")
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--sign", type=_parse_sign, default=1)
    p.add_argument("--cov-terms", type=int, default=5)

    p = sub.add_parser("mc", parents=[spec_flags, out_flags], help="Monte Carlo ensemble statistics")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("diagnose", parents=[spec_flags, out_flags], help="structural diagnostics")
    p.add_argument("--max-n", type=int, default=6, help="martingale residual levels")
    p.add_argument("--path-n", type=int, default=10_000, help="sampled path length")
    p.add_argument("--seed", type=int, default=0)

    return top


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    for name in vars(args):
        if name in ("t", "n", "q"):
            continue
        if hasattr(cfg, name) and getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    if hasattr(args, "t"):
        cfg.t_list = list(args.t)
    if hasattr(args, "n"):
        cfg.n_list = list(args.n)
    if hasattr(args, "q"):
        cfg.q_list = list(args.q)
    if args.command != "chain":
        if cfg.critical and cfg.magnitude is not None:
            raise PhiVarError("--critical and --magnitude are mutually exclusive")
        if not cfg.critical and cfg.magnitude is None:
            cfg.critical = True  # critical is the default scaling
        if cfg.base == "tent" and (args.nu is not None or args.rho is not None):
            raise PhiVarError("--nu/--rho only apply to the trig base")
        if cfg.base == "trig":
            cfg.nu = args.nu if args.nu is not None else 1.0
            cfg.rho = args.rho if args.rho is not None else 0.0
    return cfg


# ---------------------------------------------------------------------------
# command handlers: each returns (results payload, csv rows incl. header)

def _run_eval(cfg: RunConfig):
    spec = cfg.spec()
    values = [{"t": t, "value": engine.eval_f(spec, t, cfg.tol)} for t in cfg.t_list]
    rows = [["t", "value"]] + [[_f(v["t"]), _f(v["value"])] for v in values]
    return {"values": values}, rows


def _run_variation(cfg: RunConfig):
    spec = cfg.spec()
    report = variation.convergence_report(
        spec, cfg.n_list, cfg.t_list, cfg.q_list, threads=cfg.threads
    )
    payload = [
        {
            "n": row.n,
            "t": row.t,
            "v_phi": row.v_phi,
            "v_q": {_f(q): v for q, v in row.v_q.items()},
            "theory_limit": row.theory_limit,
            "ratio": row.ratio,
        }
        for row in report.rows
    ]
    rows = [["n", "t", "v_phi", "q", "v_q", "theory_limit", "ratio"]]
    for row in report.rows:
        qs = sorted(row.v_q) or [None]
        for q in qs:
            rows.append(
                [
                    str(row.n),
                    _f(row.t),
                    _f(row.v_phi),
                    _f(q),
                    _f(row.v_q.get(q)),
                    _f(row.theory_limit),
                    _f(row.ratio),
                ]
            )
    return {"rows": payload}, rows


def _run_limit(cfg: RunConfig):
    spec = cfg.spec()
    out = []
    for t in cfg.t_list:
        res = theory.phi_limit(spec, t)
        out.append(
            {"t": t, "value": res.value, "formula_id": res.formula_id.value, "sigma2": res.sigma2}
        )
    rows = [["t", "value", "formula_id", "sigma2"]] + [
        [_f(r["t"]), _f(r["value"]), r["formula_id"], _f(r["sigma2"])] for r in out
    ]
    return {"limits": out}, rows


def _run_chain(cfg: RunConfig):
    P = stochastic.transition_matrix(cfg.b, cfg.sign)
    mu1 = stochastic.initial_distribution(cfg.b)
    sigma2 = stochastic.chain_sigma2(cfg.b, cfg.sign)
    covs = [stochastic.chain_cov(cfg.b, cfg.sign, i) for i in range(cfg.cov_terms + 1)]
    payload = {
        "b": cfg.b,
        "sign": cfg.sign,
        "mu1": [str(v) for v in mu1],
        "P": [[str(v) for v in row] for row in P],
        "P_float": [[float(v) for v in row] for row in P],
        "sigma2": float(sigma2),
        "sigma2_exact": str(sigma2),
        "cov": [{"n": i, "value": float(c), "exact": str(c)} for i, c in enumerate(covs)],
    }
    rows = [["kind", "i", "j", "exact", "value"]]
    for i, row in enumerate(P):
        for j, v in enumerate(row):
            rows.append(["P", str(i), str(j), str(v), _f(float(v))])
    for j, v in enumerate(mu1):
        rows.append(["mu1", "", str(j), str(v), _f(float(v))])
    rows.append(["sigma2", "", "", str(sigma2), _f(float(sigma2))])
    for i, c in enumerate(covs):
        rows.append(["cov", str(i), "", str(c), _f(float(c))])
    return payload, rows


def _run_mc(cfg: RunConfig):
    spec = cfg.spec()
    sigma2 = theory.phi_limit(spec, 1.0).sigma2
    out = []
    for n in cfg.n_list:
        ens = stochastic.sample_paths(spec, n, cfg.count, cfg.seed)
        z = ens.z_final()
        scaled = stochastic.scaled_phi_terms(z, n, spec.b)
        out.append(
            {
                "n": n,
                "count": cfg.count,
                "seed": cfg.seed,
                "mean_z": float(z.mean()),
                "var_z": float(z.var()),
                "ks_normal": stochastic.ks_normal(z / math.sqrt(n), sigma2),
                "scaled_phi_expectation": math.fsum(scaled.tolist()) / cfg.count,
            }
        )
    rows = [["n", "count", "seed", "mean_z", "var_z", "ks_normal", "scaled_phi_expectation"]]
    for r in out:
        rows.append(
            [
                str(r["n"]),
                str(r["count"]),
                str(r["seed"]),
                _f(r["mean_z"]),
                _f(r["var_z"]),
                _f(r["ks_normal"]),
                _f(r["scaled_phi_expectation"]),
            ]
        )
    return {"ensembles": out, "sigma2": sigma2}, rows


def _run_diagnose(cfg: RunConfig):
    spec = cfg.spec()
    residuals = [
        {"n": n, "max_abs_residual": stochastic.max_abs_martingale_residual(spec, n)}
        for n in range(1, cfg.max_n + 1)
    ]
    payload = {"martingale_residuals": residuals}
    path = stochastic.sample_paths(spec, cfg.path_n, 1, cfg.seed)[0]
    payload["equidistribution_ks"] = stochastic.equidistribution_stat(path, spec.b)
    if spec.base.kind.value == "trig":
        qv = stochastic.predictable_qv(spec, path)
        payload["qv_over_n"] = float(qv[-1] / cfg.path_n)
        payload["qv_checkpoints"] = [
            {"n": k, "qv_over_n": float(qv[k - 1] / k)}
            for k in (100, 1000, cfg.path_n)
            if k <= cfg.path_n
        ]
    rows = [["section", "key", "value"]]
    for r in residuals:
        rows.append(["martingale", str(r["n"]), _f(r["max_abs_residual"])])
    rows.append(["equidistribution", "ks", _f(payload["equidistribution_ks"])])
    if "qv_over_n" in payload:
        rows.append(["qv", "over_n", _f(payload["qv_over_n"])])
    return payload, rows


_HANDLERS = {
    "eval": _run_eval,
    "variation": _run_variation,
    "limit": _run_limit,
    "chain": _run_chain,
    "mc": _run_mc,
    "diagnose": _run_diagnose,
}


def render(cfg: RunConfig, payload, rows) -> str:
    if cfg.fmt == "json":
        config = asdict(cfg)
        config.pop("output")  # not part of the numeric configuration
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": cfg.command,
            "config": config,
            "results": payload,
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def run(cfg: RunConfig) -> int:
    """Execute a validated config; emits the report, returns the exit status."""
    payload, rows = _HANDLERS[cfg.command](cfg)
    text = render(cfg, payload, rows)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return run(cfg)
    except (PhiVarError, OverflowError, ValueError) as exc:
        err = {
            "schema_version": SCHEMA_VERSION,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        sys.stdout.write(json.dumps(err) + "\n")
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
