"""Command-line front end.

Every report is printed (or written to --output) as JSON with sorted keys and
the fully resolved configuration embedded, or as CSV for tabular results.
Exit codes: 0 success, 2 usage or parameter error, 3 data validation, 4
numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .dirichlet import PolyConfig
from .errors import DataValidationError, DomainError, NumericalError, ZetaLabError
from .landau_gonek import (
    aj_counts,
    bilinear_sum_check,
    coefficient_inequality_check,
    moment_bound_check,
    psi_power_identity_check,
    squarefree_split_check,
    zero_power_sum,
)
from .moments import moment_suite
from .primes import prime_reciprocal_sum, sieve_primes
from .random_model import (
    RandomModel,
    analytic_char_fn,
    decay_bound_check,
    exact_even_moment,
    mc_char_fn,
    mc_moment,
    sample_real_poly,
)
from .smoothing import SmoothingConfig, indicator_approx, sgn_error
from .stats import DEFAULT_INTERVALS, STATISTICS, clt_report, statistic_values
from .zeros import (
    default_threads,
    find_zeros,
    gap_fraction_curve,
    ingest_zeros,
    pair_correlation_histogram,
    save_zeros,
)
from .zeta import Shift

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 2, 3, 4
X_FLOOR = 10.0

CONFIG_KEYS = ("t_max", "X", "u", "v", "zero_source", "seed", "output", "format", "threads")
DEFAULTS = {
    "t_max": 1000.0,
    "X": "auto",
    "u": None,  # resolved to 1/(2 log X)
    "v": 0.0,
    "zero_source": "compute",
    "seed": 20240101,
    "output": None,
    "format": "json",
    "threads": None,
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    t_max: float
    X: float
    X_mode: str  # "auto" or "fixed"
    u: float
    v: float
    zero_source: str
    seed: int
    output: str | None
    format: str
    threads: int


class UsageError(ZetaLabError):
    pass


def auto_x(t_max: float) -> float:
    """max(10, t_max^(1/(16 Psi(t_max)^6))) with Psi(T) = sum_{p <= T} 1/p."""
    table = sieve_primes(max(int(t_max) + 1, 2))
    psi_t = prime_reciprocal_sum(table, t_max)
    return max(X_FLOOR, t_max ** (1.0 / (16.0 * psi_t**6)))


def resolve_config(args) -> RunConfig:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataValidationError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(data) - set(CONFIG_KEYS)
        if unknown:
            raise DataValidationError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    t_max = float(merged["t_max"])
    if merged["X"] in (None, "auto"):
        X, mode = auto_x(t_max), "auto"
    else:
        try:
            X, mode = float(merged["X"]), "fixed"
        except (TypeError, ValueError):
            raise UsageError(f"X must be a number or 'auto', got {merged['X']!r}") from None
        if X < 2:
            raise UsageError(f"X must be >= 2, got {X}")
    u = merged["u"] if merged["u"] is not None else 0.5 / math.log(X)
    Shift(float(u), float(merged["v"]), X)  # validates the shift
    threads = merged["threads"] or default_threads()
    if merged["format"] not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {merged['format']!r}")
    return RunConfig(
        t_max, float(X), mode, float(u), float(merged["v"]), str(merged["zero_source"]),
        int(merged["seed"]), merged["output"], merged["format"], int(threads),
    )


def load_zeros(cfg: RunConfig, t_max: float | None = None):
    t_max = cfg.t_max if t_max is None else t_max
    if cfg.zero_source == "compute":
        return find_zeros(t_max, threads=cfg.threads)
    zs = ingest_zeros(cfg.zero_source)
    return zs.restrict(t_max) if t_max < zs.t_max else zs


def _poly_config(cfg: RunConfig) -> PolyConfig:
    return PolyConfig(cfg.X, sieve_primes(max(int(cfg.X * cfg.X) + 1, int(cfg.t_max) + 1)))


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if not f.name.startswith("_")}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Fraction):
        return {"numerator": obj.numerator, "denominator": obj.denominator, "value": float(obj)}
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(float(obj.real)), "im": _jsonable(float(obj.imag))}
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def render(cfg: RunConfig, command: str, report, table=None) -> str:
    if cfg.format == "csv":
        rows = table if table is not None else _flatten(_jsonable(report))
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in rows:
            writer.writerow([_csv_cell(c) for c in row])
        return buf.getvalue()
    doc = {"command": command, "config": _jsonable(cfg), "report": _jsonable(report), "version": __version__}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _csv_cell(c):
    return repr(c) if isinstance(c, float) else c


def _flatten(obj, prefix=""):
    rows = [("key", "value")] if not prefix else []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows += _flatten(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            rows += _flatten(v, f"{prefix}{i}.")
    else:
        rows.append((prefix[:-1], obj))
    return rows


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _intervals(text: str | None):
    if not text:
        return DEFAULT_INTERVALS
    out = []
    for part in text.split(","):
        a, b = part.split(":")
        out.append((float(a), float(b)))
    return tuple(out)


def _grid(text: str) -> np.ndarray:
    lo, hi, n = text.split(":")
    return np.linspace(float(lo), float(hi), int(n))


# subcommands


def cmd_zeros(args, cfg: RunConfig):
    if args.zeros_command == "find":
        t_max = args.t_max if args.t_max is not None else cfg.t_max
        zs = find_zeros(t_max, threads=cfg.threads)
    else:
        zs = ingest_zeros(args.file)
    report = {
        "n_zeros": len(zs),
        "t_max": zs.t_max,
        "first": zs.ordinates[:5],
        "last": float(zs.ordinates[-1]) if len(zs) else None,
        "source": zs.source,
    }
    if args.out_file:
        save_zeros(zs, args.out_file)
        report["written_to"] = str(args.out_file)
    table = [("index", "ordinate")] + [(i + 1, float(g)) for i, g in enumerate(zs.ordinates)]
    return report, table


def cmd_lg_sum(args, cfg: RunConfig):
    zs = load_zeros(cfg, max(cfg.t_max, args.t) if cfg.zero_source == "compute" else None)
    res = zero_power_sum(zs, args.x, args.t)
    report = dataclasses.asdict(res) | {"residual": res.residual, "ratio": res.ratio}
    return report, None


def cmd_poly_stats(args, cfg: RunConfig):
    zs = load_zeros(cfg)
    pc = _poly_config(cfg)
    vals, psi = statistic_values("re-poly", zs, pc, Shift(cfg.u, cfg.v, cfg.X))
    reps = moment_suite(vals, args.k_max, T=zs.t_max, X=cfg.X, psi=psi, v=cfg.v)
    n = len(zs)
    report = {
        "psi": psi,
        "n_zeros": n,
        "T": zs.t_max,
        "moments": [dataclasses.asdict(r) | {"average": r.empirical / n} for r in reps],
    }
    table = [("k", "empirical", "predicted_main", "predicted_error_scale", "ratio", "average")]
    table += [(r.k, r.empirical, r.predicted_main, r.predicted_error_scale, r.ratio, r.empirical / n) for r in reps]
    return report, table


def cmd_clt(args, cfg: RunConfig):
    zs = load_zeros(cfg)
    pc = _poly_config(cfg)
    shift = Shift(cfg.u, cfg.v, cfg.X)
    vals, psi = statistic_values(args.statistic, zs, pc, shift, subset=args.subset)
    notes = ""
    if args.statistic in ("log-zeta", "log-zeta-prime"):
        notes = (
            f"computed on the first {vals.size} zeros; the convergence rate in the "
            "central limit theorem is not observable at this height, so the KS "
            "distance is informational"
        )
    rep = clt_report(
        vals, args.statistic, zs.t_max, psi, _intervals(args.intervals),
        scale=args.scale, center=args.center, notes=notes,
    )
    table = [("a", "b", "empirical", "gaussian", "difference")] + [tuple(r) for r in rep.interval_probs]
    return rep, table


def cmd_random_model(args, cfg: RunConfig):
    table = sieve_primes(max(int(cfg.X * cfg.X) + 1, 2))
    model = RandomModel(table, cfg.X, cfg.v, cfg.seed)
    samples = sample_real_poly(model, args.samples)
    omegas = _floats(args.omega_grid)
    char_rows = []
    for w in omegas:
        a = analytic_char_fn(model, w)
        e = mc_char_fn(samples, w)
        z = (e.value.real - a.real) / e.std_error.real if e.std_error.real else 0.0
        char_rows.append({"omega": w, "analytic": a.real, "mc": e.value, "mc_se": e.std_error, "z_real": z})
    mom_rows = []
    for k in (2, 4):
        e = mc_moment(samples, k)
        ex = exact_even_moment(model, k)
        mom_rows.append({"k": k, "exact": ex, "mc": e.value.real, "mc_se": e.std_error.real,
                         "z": (e.value.real - ex) / e.std_error.real})
    decay_grid = [w for w in omegas if 0 <= w <= 3] or [0.0]
    decay = decay_bound_check(model, decay_grid)
    report = {
        "n_primes": int(model.primes.size),
        "psi": model.psi,
        "samples": args.samples,
        "char_fn": char_rows,
        "moments": mom_rows,
        "decay": {"c_fit": decay.c_fit, "violations": decay.violations},
    }
    tab = [("omega", "analytic", "mc_real", "mc_imag", "se_real", "z_real")]
    tab += [(r["omega"], r["analytic"], r["mc"].real, r["mc"].imag, r["mc_se"].real, r["z_real"]) for r in char_rows]
    return report, tab


def cmd_smoothing(args, cfg: RunConfig):
    sc = SmoothingConfig(args.omega)
    grid = _grid(args.grid)
    rep = sgn_error(sc, grid)
    a, b = args.interval
    ind = []
    worst = 0.0
    for x in np.linspace(a - 2, b + 2, args.indicator_points):
        val, env = indicator_approx(sc, a, b, float(x))
        truth = 1.0 if a < x < b else (0.5 if x in (a, b) else 0.0)
        if env > 1e-8:
            worst = max(worst, abs(truth - val) / env)
        ind.append((float(x), val, env, truth))
    report = {
        "omega": args.omega,
        "c_fit": rep.c_fit,
        "max_error_off_envelope": rep.max_error_off_envelope,
        "grid_points": int(rep.x.size),
        "indicator": {"a": a, "b": b, "c_fit": worst},
    }
    table = [("x", "F", "abs_error", "envelope")]
    table += [(float(x), float(f), float(e), float(v)) for x, f, e, v in zip(rep.x, rep.f_values, rep.abs_error, rep.envelope)]
    return report, table


def cmd_pair_corr(args, cfg: RunConfig):
    zs = load_zeros(cfg)
    h = pair_correlation_histogram(zs, args.bins, args.x_max, scaling=args.scaling)
    gaps = gap_fraction_curve(zs, np.linspace(0.1, 2.0, 20))
    report = {"histogram": h, "gap_fraction": gaps}
    table = [("center", "density", "conjectured", "count")]
    table += [(float(c), float(d), float(m), int(n)) for c, d, m, n in zip(h.centers, h.density, h.conjectured, h.counts)]
    return report, table


def _random_coeffs(rng: random.Random, support, complex_values=True):
    out = {}
    for n in support:
        re = rng.uniform(-1, 1)
        im = rng.uniform(-1, 1) if complex_values else 0.0
        out[n] = complex(re, im)
    return out


def cmd_oracle(args, cfg: RunConfig):
    rng = random.Random(cfg.seed)
    if args.oracle_command == "aj":
        primes = [int(p) for p in args.primes.split(",")]
        counts = aj_counts(primes, args.j)
        lhs, rhs = psi_power_identity_check(primes, args.j)
        split = squarefree_split_check(primes, args.j) if args.j >= 1 else None
        report = {"counts": {str(n): c for n, c in sorted(counts.items())},
                  "identity": {"lhs": lhs, "rhs": rhs, "equal": lhs == rhs},
                  "squarefree_split": split}
        table = [("n", "a_j")] + sorted(counts.items())
        return report, table
    if args.oracle_command == "bilinear":
        zs = load_zeros(cfg)
        a = _random_coeffs(rng, range(1, args.n_support + 1))
        b = _random_coeffs(rng, range(1, args.m_support + 1))
        rep = bilinear_sum_check(zs, a, b, cfg.v, zs.t_max)
        return {"bilinear": rep, "normalized_residual": rep.normalized_residual}, None
    # moment-bound
    zs = load_zeros(cfg)
    table = sieve_primes(max(int(args.Y) + 1, 2))
    coeffs = _random_coeffs(rng, table.primes_upto(args.Y).tolist())
    rep = moment_bound_check(zs, coeffs, args.Y, args.k, enforce_range=not args.allow_out_of_range)
    ineq = coefficient_inequality_check(coeffs, args.k)
    return {"moment_bound": rep, "ratio": rep.ratio, "coefficient_inequality": {"lhs": ineq.lhs, "rhs": ineq.rhs, "holds": ineq.holds}}, None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _report_error("UsageError", message, EXIT_USAGE)
        sys.exit(EXIT_USAGE)


def _report_error(kind: str, message: str, code: int) -> None:
    sys.stderr.write(json.dumps({"error": kind, "exit_code": code, "message": message}, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with run configuration; flags override it")
    common.add_argument("--t-max", dest="t_max", type=float, help="height of the zero set")
    common.add_argument("--X", dest="X", help="polynomial length X, or 'auto'")
    common.add_argument("--u", type=float)
    common.add_argument("--v", type=float)
    common.add_argument("--zeros", dest="zero_source", help="zero file to ingest instead of computing")
    common.add_argument("--seed", type=int)
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--threads", type=int, help="worker cap (default: $ZETALAB_THREADS or 1)")

    p = _Parser(prog="zetalab", description="Numerical experiments on log zeta near its zeros.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    z = sub.add_parser("zeros", help="compute or ingest zero ordinates")
    zsub = z.add_subparsers(dest="zeros_command", required=True, parser_class=_Parser)
    zf = zsub.add_parser("find", parents=[common])
    zf.add_argument("--out-file", help="zero file to write")
    zi = zsub.add_parser("ingest", parents=[common])
    zi.add_argument("--file", required=True)
    zi.add_argument("--out-file", help="re-write the validated zeros here")

    lg = sub.add_parser("lg-sum", parents=[common], help="sum of x^(i gamma) over zeros")
    lg.add_argument("--x", type=float, required=True)
    lg.add_argument("--t", type=float, required=True)

    ps = sub.add_parser("poly-stats", parents=[common], help="moments of Re P_X over zeros")
    ps.add_argument("--k-max", type=int, default=6)

    c = sub.add_parser("clt", parents=[common], help="distribution of a per-zero statistic")
    c.add_argument("--statistic", choices=STATISTICS, default="re-poly")
    c.add_argument("--intervals", help="comma-separated a:b pairs")
    c.add_argument("--scale", choices=("loglog", "psi"), default="loglog")
    c.add_argument("--center", action="store_true", help="subtract the sample mean")
    c.add_argument("--subset", type=int, help="use only the first N zeros")

    rm = sub.add_parser("random-model", parents=[common], help="random Euler-product model checks")
    rm.add_argument("--samples", type=int, default=100000)
    rm.add_argument("--omega-grid", default="0.25,0.5,1.0")

    sm = sub.add_parser("smoothing-check", parents=[common], help="Beurling-Selberg sgn approximation")
    sm.add_argument("--omega", type=float, default=2.0)
    sm.add_argument("--grid", default="-5:5:1001", help="lo:hi:n")
    sm.add_argument("--interval", type=float, nargs=2, default=(-1.0, 1.0))
    sm.add_argument("--indicator-points", type=int, default=201)

    pc = sub.add_parser("pair-corr", parents=[common], help="pair correlation histogram")
    pc.add_argument("--bins", type=int, default=40)
    pc.add_argument("--x-max", type=float, default=3.0)
    pc.add_argument("--scaling", choices=("unfolded", "log_t"), default="unfolded")

    o = sub.add_parser("oracle", help="exact combinatorial checks")
    osub = o.add_subparsers(dest="oracle_command", required=True, parser_class=_Parser)
    oa = osub.add_parser("aj", parents=[common])
    oa.add_argument("--primes", default="2,3,5,7")
    oa.add_argument("--j", type=int, default=3)
    ob = osub.add_parser("bilinear", parents=[common])
    ob.add_argument("--n-support", type=int, default=20)
    ob.add_argument("--m-support", type=int, default=20)
    om = osub.add_parser("moment-bound", parents=[common])
    om.add_argument("--k", type=int, default=2)
    om.add_argument("--Y", type=float, default=20.0)
    om.add_argument("--allow-out-of-range", action="store_true",
                    help="run even when Y^(3k) > T/log T")
    return p


_COMMANDS = {
    "zeros": cmd_zeros,
    "lg-sum": cmd_lg_sum,
    "poly-stats": cmd_poly_stats,
    "clt": cmd_clt,
    "random-model": cmd_random_model,
    "smoothing-check": cmd_smoothing,
    "pair-corr": cmd_pair_corr,
    "oracle": cmd_oracle,
}
_TABULAR = {"pair-corr"}  # csv unless --format json is given


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in _TABULAR and args.format is None:
            args.format = "csv"
        cfg = resolve_config(args)
        report, table = _COMMANDS[args.command](args, cfg)
        emit(cfg, render(cfg, args.command, report, table))
    except (UsageError, DomainError) as exc:
        _report_error(type(exc).__name__, str(exc), EXIT_USAGE)
        return EXIT_USAGE
    except DataValidationError as exc:
        _report_error(type(exc).__name__, str(exc), EXIT_DATA)
        return EXIT_DATA
    except NumericalError as exc:
        _report_error(type(exc).__name__, str(exc), EXIT_NUMERIC)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
