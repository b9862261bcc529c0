"""Command-line entry point.

Exit codes: 0 success, 1 computational or property failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Optional

from .arith import order_exact, order_numeric, period_generator
from .core import (
    BallPoint,
    Convention,
    ExactValue,
    HypersurfacePoint,
    ProjPoint,
    WeinsteinError,
    exact_to_real,
    parse_complex_list,
)
from .forms import QuadratureSpec
from .morphism import (
    MIN_REPORTED_SAMPLES,
    SamplerConfig,
    a_pointwise,
    average_mc,
    average_quadrature,
    discrepancy_report,
    lemma33_value,
)
from .projective import Chart, chart_inverse
from .verify import SUITES, run_suite

N_REPORT_MAX = 16


@dataclass(frozen=True)
class RunConfig:
    command: str
    convention: Convention
    fmt: str
    out: Optional[str]
    seed: int
    n: int = 2
    samples: int = 100_000
    workers: int = 1
    nodes: int = 32
    fd_step: float = 1e-5
    qmax: int = 10**6
    tol: float = 1e-9

    def validate(self) -> Optional[str]:
        """Return a usage-error message, or None when every field is in range."""
        if not 0 <= self.seed < 2**64:
            return "--seed must be an unsigned 64-bit integer"
        if self.n < 2:
            return "--n must be >= 2"
        if self.samples < MIN_REPORTED_SAMPLES:
            return f"--samples must be >= {MIN_REPORTED_SAMPLES}"
        if self.workers < 1:
            return "--workers must be >= 1"
        if self.nodes < 2:
            return "--nodes must be >= 2"
        if not 1e-7 <= self.fd_step <= 1e-3:
            return "--fd-step must lie in [1e-7, 1e-3]"
        if self.qmax < 1 or self.tol <= 0:
            return "--qmax must be >= 1 and --tol > 0"
        return None


# -- output ---------------------------------------------------------------------


def _flatten(obj, prefix="", out=None) -> dict:
    out = {} if out is None else out
    if isinstance(obj, dict) and not set(obj) == {"terms"}:
        for key, val in obj.items():
            _flatten(val, f"{prefix}.{key}" if prefix else key, out)
    elif isinstance(obj, dict):
        out[prefix] = str(ExactValue.from_json(obj))
    elif isinstance(obj, list):
        out[prefix] = "; ".join(str(v) for v in obj)
    else:
        out[prefix] = obj
    return out


def _fmt_text(val) -> str:
    if isinstance(val, float):
        return f"{val:.12g}"
    return str(val)


def render(records: list[dict], fmt: str, text: Optional[str] = None) -> str:
    if fmt == "json":
        body = records[0] if len(records) == 1 else records
        return json.dumps(body, indent=2) + "\n"
    flat = [_flatten(r) for r in records]
    if fmt == "csv":
        cols: list[str] = []
        for row in flat:
            cols.extend(c for c in row if c not in cols)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        writer.writerows({k: repr(v) if isinstance(v, float) else v for k, v in row.items()} for row in flat)
        return buf.getvalue()
    if text is not None:
        return text
    return "\n\n".join("\n".join(f"{k}: {_fmt_text(v)}" for k, v in row.items()) for row in flat) + "\n"


def emit(cfg: RunConfig, records: list[dict], text: Optional[str] = None) -> None:
    payload = render(records, cfg.fmt, text)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


# -- commands ---------------------------------------------------------------------


def cmd_average(cfg: RunConfig) -> int:
    est = average_mc(SamplerConfig(cfg.n, cfg.samples, cfg.seed, cfg.convention), workers=cfg.workers)
    quad = average_quadrature(cfg.n, cfg.convention)
    rec = {
        "command": "average",
        "n": cfg.n,
        "convention": cfg.convention.value,
        "mc": est.to_json(),
        "quadrature": quad,
        "mc_minus_quadrature": est.value - quad,
        "reduced": {"value": est.reduced, "period": est.period.to_json()},
    }
    emit(cfg, [rec])
    return 0


def cmd_pointwise(cfg: RunConfig, proj: Optional[str], ball: Optional[str], jacobian: str) -> int:
    quad = QuadratureSpec(cfg.nodes, cfg.nodes, cfg.fd_step)
    rec: dict = {"command": "pointwise", "convention": cfg.convention.value}
    if proj is not None:
        p = ProjPoint(parse_complex_list(proj))
        try:
            z = chart_inverse(Chart(p.n), p)
        except HypersurfacePoint:
            print("error: hypersurface point (last homogeneous coordinate is zero)", file=sys.stderr)
            return 1
        rec["proj"] = p.to_json()
        rec["closed_form"] = lemma33_value(p, cfg.convention)
    else:
        z = BallPoint(parse_complex_list(ball))
        rec["closed_form"] = a_pointwise(z, cfg.convention)
    if z.n < 2:
        raise ValueError("points need n >= 2")
    rec["ball"] = z.to_json()
    rec["numeric"] = a_pointwise(z, cfg.convention, "numeric", quad, jacobian)
    rec["gap"] = abs(rec["numeric"] - rec["closed_form"])
    emit(cfg, [rec])
    return 0


def cmd_verify(cfg: RunConfig, suite: str, trials: Optional[int], tol: Optional[float]) -> int:
    results = run_suite(suite, cfg.seed, trials, tol)
    records = [
        {"check": r.name, "passed": r.passed, "worst": r.worst, "tol": r.tol, "counterexample": r.counterexample or ""}
        for r in results
    ]
    text = "\n".join(r.line() for r in results) + "\n"
    emit(cfg, records, text)
    return 0 if all(r.passed for r in results) else 1


def cmd_report(cfg: RunConfig, n_min: int, n_max: int) -> int:
    rows = []
    for n in range(n_min, n_max + 1):
        rep = discrepancy_report(n, SamplerConfig(n, cfg.samples, cfg.seed, cfg.convention), workers=cfg.workers)
        rows.append(rep.to_json())
    header = f"{'n':>3}  {'paper':<28} {'paper order':<28} {'derived':<12} {'derived order':<14} {'quadrature':>16} {'mc':>16} {'stderr':>10}"
    lines = [header]
    for row in rows:
        paper = row["paper"]
        if paper == "singular":
            p_txt, p_ord = f"singular at n={row['n']}", "-"
        else:
            p_txt, p_ord = str(ExactValue.from_json(paper["exact"])), paper["order"]
        lines.append(
            f"{row['n']:>3}  {p_txt:<28} {p_ord:<28} {str(ExactValue.from_json(row['derived']['exact'])):<12} "
            f"{row['derived']['order']:<14} {row['quadrature']:>16.12g} {row['mc']['value']:>16.12g} {row['mc']['stderr']:>10.3g}"
        )
    lines.append("")
    for row in rows:
        lines.append(f"n={row['n']}: " + "; ".join(row["verdicts"]))
    lines.append("(exact verdicts use pi's transcendence; MC values can only bound an order)")
    emit(cfg, rows, "\n".join(lines) + "\n")
    return 0


def cmd_order(cfg: RunConfig, exact: Optional[str], value: Optional[float]) -> int:
    p = period_generator(cfg.n, cfg.convention)
    rec: dict = {"command": "order", "period": p.generator.to_json()}
    if exact is not None:
        v = ExactValue.parse(exact)
        rec["input"] = v.to_json()
        rec["real"] = exact_to_real(v)
        rec["exact"] = order_exact(v, p).to_json()
        rec["numeric"] = order_numeric(rec["real"], p, cfg.qmax, cfg.tol).to_json()
    else:
        rec["input"] = value
        rec["numeric"] = order_numeric(value, p, cfg.qmax, cfg.tol).to_json()
    emit(cfg, [rec])
    return 0


# -- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--convention", choices=[c.value for c in Convention], default="normalized")
    common.add_argument("--format", dest="fmt", choices=["json", "csv", "text"], default="json")
    common.add_argument("--out", default=None, help="write output to PATH instead of stdout")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(
        prog="weinstein",
        description="Weinstein morphism of the SU(2) 3-sphere in Ham(CP^n): averages, closed forms, orders.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("average", parents=[common], help="Monte-Carlo and quadrature average")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("pointwise", parents=[common], help="capped area of one orbit")
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--proj", help='homogeneous coordinates "re,im;re,im;..."')
    where.add_argument("--ball", help='ball coordinates "re,im;re,im;..."')
    p.add_argument("--nodes", type=int, default=32)
    p.add_argument("--fd-step", type=float, default=1e-5)
    p.add_argument("--jacobian", choices=["auto", "fd"], default="auto")

    p = sub.add_parser("verify", parents=[common], help="run property suites")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("report", parents=[common], help="paper vs derived vs oracles, per n")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("order", parents=[common], help="order of a value in R / <pi^2/2>")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--exact", help='power:coefficient pairs, e.g. "3:97/256,2:1/32"')
    what.add_argument("--value", type=float)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--qmax", type=int, default=10**6)
    p.add_argument("--tol", type=float, default=1e-9)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fields = {
        k: getattr(args, k)
        for k in ("n", "samples", "workers", "nodes", "qmax")
        if getattr(args, k, None) is not None
    }
    if args.command == "pointwise":
        fields["fd_step"] = args.fd_step
    if args.command == "order":
        fields["tol"] = args.tol
    cfg = RunConfig(args.command, Convention.parse(args.convention), args.fmt, args.out, args.seed, **fields)
    problem = cfg.validate()
    if problem:
        parser.error(problem)
    try:
        if args.command == "average":
            return cmd_average(cfg)
        if args.command == "pointwise":
            try:
                return cmd_pointwise(cfg, args.proj, args.ball, args.jacobian)
            except ValueError as exc:
                parser.error(str(exc))
        if args.command == "verify":
            if args.trials is not None and args.trials < 1:
                parser.error("--trials must be >= 1")
            return cmd_verify(cfg, args.suite, args.trials, args.tol)
        if args.command == "report":
            if not 2 <= args.n_min <= args.n_max <= N_REPORT_MAX:
                parser.error(f"n-range must satisfy 2 <= n-min <= n-max <= {N_REPORT_MAX}")
            return cmd_report(cfg, args.n_min, args.n_max)
        if args.command == "order":
            if args.exact is not None:
                try:
                    ExactValue.parse(args.exact)
                except (ValueError, ZeroDivisionError) as exc:
                    parser.error(f"bad --exact value: {exc}")
            return cmd_order(cfg, args.exact, args.value)
    except (WeinsteinError, FloatingPointError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
