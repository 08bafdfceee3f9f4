"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numeric or domain failure.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .boundary import Method, Q_MIN, boundary_curve, rho
from .coupling import coupling_diagnostics, spacing_law_check, spacing_tail_probability
from .errors import BracketError, DomainError
from .hc import hc_star
from .models import Family, ModelSpec, PValueSample, RareWeakParams, alpha
from .montecarlo import (
    DEFAULT_CAL_REPS,
    DEFAULT_LEVEL,
    DEFAULT_REPS,
    AggregateModelParams,
    RowModelParams,
    aggregate_experiment,
    power_sweep,
    rows_experiment,
)
from . import rng as rngmod

SEED_ENV = "RAREHC_SEED"
DEFAULT_SEED = 20200601
POWER_HEADER = "beta,r,n,reps,level,threshold,type1,type2,error_sum,se,best_error_sum,rho"
EXPERIMENT_HEADER = "variant," + POWER_HEADER.rsplit(",", 1)[0]
BOUNDARY_HEADER = "model,beta,rho,method,argmax_q,certificate_lo,certificate_hi"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ------------------------------------------------------------------ helpers


def fmt(x):
    """12 significant digits, '.' separator; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def parse_grid(text):
    """``lo:hi:step`` (hi included when reachable) or a comma list."""
    text = text.strip()
    if ":" not in text:
        return [float(v) for v in text.split(",") if v.strip()]
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like lo:hi:step, got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    if not step > 0 or hi < lo:
        raise ValueError(f"grid needs step > 0 and hi >= lo, got {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [float(f"{lo + k * step:.12g}") for k in range(count)]


def load_pvalues(path):
    """Read whitespace-separated P-values; errors name the line and column."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            col = 0
            for token in line.split():
                col = line.index(token, col) + 1
                try:
                    v = float(token)
                except ValueError:
                    raise DomainError(f"{path}: line {lineno}, column {col}: cannot parse {token!r}") from None
                if not 0.0 < v < 1.0:
                    raise DomainError(f"{path}: line {lineno}, column {col}: {token} is outside (0, 1)")
                values.append(v)
                col += len(token) - 1
    if not values:
        raise DomainError(f"{path}: no P-values found")
    return PValueSample(np.array(values))


def save_pvalues(path, sample):
    with open(path, "w", encoding="utf-8") as fh:
        for v in sample.pvalues:
            fh.write(f"{float(v)!r}\n")


def resolve_seed(flag_value):
    if flag_value is not None:
        return flag_value
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        return int(env)
    return DEFAULT_SEED


def make_model(args):
    sigma2 = getattr(args, "sigma2", 1.0)
    fam = Family(args.model)
    return ModelSpec(fam, sigma2 if fam is Family.HETEROSCEDASTIC else 1.0)


def provenance(command, config):
    return {"tool": "rarehc", "version": __version__, "command": command, "config": config}


class Output:
    def __init__(self, path):
        self.path = path
        self.lines = []

    def preamble_csv(self, prov):
        self.lines.append("# " + json.dumps(prov, sort_keys=True))

    def row(self, *fields):
        self.lines.append(",".join(fields))

    def json(self, obj):
        self.lines.append(json.dumps(obj, sort_keys=True))

    def close(self):
        text = "\n".join(self.lines) + "\n"
        if self.path in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(self.path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)


def _config(args):
    skip = {"func", "output", "workers", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ----------------------------------------------------------------- commands


def cmd_alpha(args):
    model = make_model(args)
    value = alpha(model, args.q, args.r)
    print(fmt(value))


def cmd_hc(args):
    sample = load_pvalues(args.input)
    ev = hc_star(sample, args.gamma0)
    out = Output(args.output)
    out.preamble_csv(provenance("hc", _config(args)))
    out.row("n", "gamma0", "hc_star", "argmax_index")
    out.row(fmt(ev.n), fmt(ev.gamma0), fmt(ev.hc_star), fmt(ev.argmax_index))
    out.close()


def cmd_boundary(args):
    model = make_model(args)
    betas = parse_grid(args.beta_grid)
    curve = boundary_curve(model, betas, args.tol, args.q_min, Method(args.method))
    out = Output(args.output)
    out.preamble_csv(provenance("boundary", _config(args)))
    out.row(BOUNDARY_HEADER)
    for p in curve.points:
        out.row(str(model), fmt(p.beta), fmt(p.rho), curve.method.value, fmt(p.argmax_q),
                fmt(p.certificate_lo), fmt(p.certificate_hi))
    out.close()


def _power_fields(e):
    return [fmt(e.beta), fmt(e.r), fmt(e.n), fmt(e.reps), fmt(e.level), fmt(e.threshold), fmt(e.type1),
            fmt(e.type2), fmt(e.error_sum), fmt(e.se), fmt(e.best_error_sum)]


def cmd_power(args):
    model = make_model(args)
    seed = resolve_seed(args.seed)
    grid = [(b, r) for b in parse_grid(args.beta_grid) for r in parse_grid(args.r_grid)]
    results = power_sweep(grid, args.n, model, args.level, args.reps, seed, args.gamma0, args.cal_reps, args.workers)
    rhos = {}
    for b, _ in grid:
        if b not in rhos:
            try:
                rhos[b] = rho(model, b)
            except (DomainError, BracketError):
                rhos[b] = math.nan
    out = Output(args.output)
    cfg = _config(args)
    cfg["seed"] = seed
    out.preamble_csv(provenance("power", cfg))
    out.row(POWER_HEADER)
    for (b, r), e in zip(grid, results):
        if e is None:
            out.row(fmt(b), fmt(r), fmt(args.n), fmt(args.reps), fmt(args.level), *["nan"] * 6, fmt(rhos[b]))
        else:
            out.row(*_power_fields(e), fmt(rhos[b]))
    out.close()


def cmd_couple(args):
    model = make_model(args)
    seed = resolve_seed(args.seed)
    params = RareWeakParams(args.n, args.beta, args.r, args.gamma0)
    records = coupling_diagnostics(params, model, args.draws, seed, args.workers)
    out = Output(args.output)
    cfg = _config(args)
    cfg["seed"] = seed
    out.json({"provenance": provenance("couple", cfg)})
    for rec in records:
        out.json({k: rec[k] for k in ("seed", "n", "beta", "r", "m", "hc0", "hc1", "sup_bound", "ordering_ok",
                                      "bound_ok")})
    out.close()
    applicable = [r for r in records if r["bound_ok"] is not None]
    violations = sum(1 for r in applicable if not r["bound_ok"])
    print(f"# draws={len(records)} applicable={len(applicable)} violations={violations}", file=sys.stderr)


def _experiment_output(args, command, seed, estimates):
    out = Output(args.output)
    cfg = _config(args)
    cfg["seed"] = seed
    out.preamble_csv(provenance(command, cfg))
    out.row(EXPERIMENT_HEADER)
    for e in estimates:
        out.row(e.variant, *_power_fields(e))
    out.close()


def cmd_rows(args):
    seed = resolve_seed(args.seed)
    params = RowModelParams(args.n, args.k, args.beta, args.r)
    est = rows_experiment(params, args.level, args.reps, seed, args.gamma0, args.cal_reps, args.workers)
    _experiment_output(args, "rows", seed, est)


def cmd_aggregate(args):
    seed = resolve_seed(args.seed)
    params = AggregateModelParams(args.n, args.beta, args.r, args.a_exponent)
    est = aggregate_experiment(params, args.level, args.reps, seed, args.gamma0, args.cal_reps, args.workers)
    _experiment_output(args, "aggregate", seed, est)


def cmd_spacings(args):
    seed = resolve_seed(args.seed)
    ks = spacing_law_check(args.n, args.reps, rngmod.substream(seed, rngmod.SPACING, 0))
    p, se = spacing_tail_probability(args.n, args.x, args.reps, rngmod.substream(seed, rngmod.SPACING, 1))
    exact = (1 - args.x / args.n) ** args.n if args.x < args.n else 0.0
    out = Output(args.output)
    cfg = _config(args)
    cfg["seed"] = seed
    out.preamble_csv(provenance("diagnose-spacings", cfg))
    out.row("n,reps,ks_exp1,x,tail_empirical,tail_se,tail_exact")
    out.row(fmt(args.n), fmt(args.reps), fmt(ks), fmt(args.x), fmt(p), fmt(se), fmt(exact))
    out.close()


# ------------------------------------------------------------------- parser


def _add_model(p, sigma=True):
    p.add_argument("--model", choices=[f.value for f in Family], default=Family.NORMAL_MEANS.value,
                   help="model family (default: %(default)s)")
    if sigma:
        p.add_argument("--sigma2", type=float, default=1.0,
                       help="non-null variance, heteroscedastic family only (default: %(default)s)")


def _add_run(p, reps=True):
    p.add_argument("--seed", type=int, default=None,
                   help=f"master seed; falls back to ${SEED_ENV}, then {DEFAULT_SEED} (default: %(default)s)")
    p.add_argument("--workers", type=int, default=1, help="worker processes, 0 = all cores (default: %(default)s)")
    p.add_argument("--output", "-o", default="-", help="output path, '-' for stdout (default: %(default)s)")
    if reps:
        p.add_argument("--level", type=float, default=DEFAULT_LEVEL, help="test level (default: %(default)s)")
        p.add_argument("--reps", type=int, default=DEFAULT_REPS,
                       help="replicates per error estimate (default: %(default)s)")
        p.add_argument("--cal-reps", type=int, default=DEFAULT_CAL_REPS,
                       help="null replicates for threshold calibration (default: %(default)s)")
        p.add_argument("--gamma0", type=float, default=0.1, help="HC truncation fraction (default: %(default)s)")


def build_parser():
    parser = _Parser(prog="rarehc", description="Higher Criticism powerlessness toolkit.")
    parser.add_argument("--version", action="version", version=f"rarehc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("alpha", help="evaluate the tail exponent alpha(q, r)")
    _add_model(p)
    p.add_argument("--q", type=float, required=True, help="scale exponent in (0, 1]")
    p.add_argument("--r", type=float, required=True, help="signal strength, > 0")
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("hc", help="HC statistic of a P-value file")
    p.add_argument("--input", required=True, help="whitespace-separated P-values")
    p.add_argument("--gamma0", type=float, default=0.1, help="HC truncation fraction (default: %(default)s)")
    p.add_argument("--output", "-o", default="-", help="output path, '-' for stdout (default: %(default)s)")
    p.set_defaults(func=cmd_hc)

    p = sub.add_parser("boundary", help="impossibility curve rho(beta) as CSV")
    _add_model(p)
    p.add_argument("--beta-grid", default="0.55:0.95:0.05", help="lo:hi:step or comma list (default: %(default)s)")
    p.add_argument("--tol", type=float, default=1e-6, help="bisection tolerance in r (default: %(default)s)")
    p.add_argument("--q-min", type=float, default=Q_MIN, help="lower end of the q search (default: %(default)s)")
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.NUMERIC.value,
                   help="solver (default: %(default)s)")
    p.add_argument("--output", "-o", default="-", help="output path, '-' for stdout (default: %(default)s)")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("power", help="error-sum sweep over a (beta, r) grid")
    _add_model(p)
    p.add_argument("--beta-grid", required=True, help="lo:hi:step or comma list")
    p.add_argument("--r-grid", required=True, help="lo:hi:step or comma list")
    p.add_argument("--n", type=int, default=10_000, help="number of tests (default: %(default)s)")
    _add_run(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("couple", help="per-draw coupling diagnostics as JSON lines")
    _add_model(p)
    p.add_argument("--n", type=int, default=10_000, help="number of tests (default: %(default)s)")
    p.add_argument("--beta", type=float, default=0.7, help="rarity exponent (default: %(default)s)")
    p.add_argument("--r", type=float, default=0.1, help="signal strength (default: %(default)s)")
    p.add_argument("--gamma0", type=float, default=0.1, help="HC truncation fraction (default: %(default)s)")
    p.add_argument("--draws", type=int, default=1000, help="coupled draws (default: %(default)s)")
    _add_run(p, reps=False)
    p.set_defaults(func=cmd_couple)

    p = sub.add_parser("rows", help="naive versus row-reduced P-values")
    p.add_argument("--n", type=int, default=10_000, help="rows (default: %(default)s)")
    p.add_argument("--k", type=int, default=16, help="cells per row (default: %(default)s)")
    p.add_argument("--beta", type=float, default=0.7, help="rarity exponent (default: %(default)s)")
    p.add_argument("--r", type=float, default=0.15, help="signal strength (default: %(default)s)")
    _add_run(p)
    p.set_defaults(func=cmd_rows)

    p = sub.add_parser("aggregate", help="HC versus sum of squares under a dense weak shift")
    p.add_argument("--n", type=int, default=10_000, help="number of tests (default: %(default)s)")
    p.add_argument("--beta", type=float, default=0.7, help="rarity exponent (default: %(default)s)")
    p.add_argument("--r", type=float, default=0.05, help="signal strength (default: %(default)s)")
    p.add_argument("--a-exponent", type=float, default=0.25, help="dense shift a_n = n**-a (default: %(default)s)")
    _add_run(p)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("diagnose-spacings", help="minimum uniform spacing versus its limit law")
    p.add_argument("--n", type=int, default=1000, help="sample size (default: %(default)s)")
    p.add_argument("--reps", type=int, default=10_000, help="replicates (default: %(default)s)")
    p.add_argument("--x", type=float, default=1.0, help="tail point for the exact check (default: %(default)s)")
    _add_run(p, reps=False)
    p.set_defaults(func=cmd_spacings)
    return parser


def _name_flag(exc, args):
    # module errors start with the parameter name; point at the matching flag
    msg = str(exc)
    first = msg.split(" ", 1)[0]
    for name in (first, first + "_grid"):
        if name in vars(args) and name not in {"func", "command"}:
            return f"--{name.replace('_', '-')}: {msg}"
    return msg


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        args.func(args)
    except (DomainError, BracketError, ArithmeticError) as exc:
        print(f"error: {_name_flag(exc, args)}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
