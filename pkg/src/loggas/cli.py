"""Command-line entry point.

Exit codes: 0 success, 1 inequality violated, 2 usage or parse error,
3 numerical failure.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np
from scipy import stats

from . import asymptotics, trials
from .circle import w2_circle_optimal, w2_circle_result
from .config import ExperimentConfig, is_circular, parse_kernel, parse_measure, parse_potential
from .energy import continuous_energy, delta_n
from .ensemble import RngSpec, monte_carlo
from .errors import AlignmentError, ConvergenceError, DomainError, QuadratureError, SpecError
from .fekete import fekete_points
from .inequalities import check_circle, check_haar, check_line, check_semicircular
from .measures import w2_result

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

VERIFY_KINDS = ("line", "semicircle", "discrete", "fekete", "circle")


class UsageError(Exception):
    pass


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    return repr(o)


def _finite(x):
    # JSON has no infinities; keep them readable and parseable as strings.
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def _clean(d):
    if isinstance(d, dict):
        return {k: _clean(v) for k, v in d.items()}
    if isinstance(d, list):
        return [_clean(v) for v in d]
    return _finite(d)


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def _out_dir(cfg):
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


# -- commands --------------------------------------------------------------


def cmd_w2(cfg, out=sys.stdout):
    if len(cfg.measures) != 2:
        raise UsageError("w2 needs exactly two measure specs")
    a, b = (parse_measure(s) for s in cfg.measures)
    if is_circular(a) != is_circular(b):
        raise UsageError("cannot compare a line measure with a circle measure")
    if is_circular(a):
        if cfg.kind == "optimal":
            res = w2_circle_optimal(a, b)
        else:
            res, _ = w2_circle_result(a, b, cfg.metric)
    else:
        res = w2_result(a, b)
    out.write(_dump(res.to_dict()))
    return EXIT_OK


def cmd_energy(cfg, out=sys.stdout):
    if len(cfg.measures) != 1:
        raise UsageError("energy needs exactly one measure spec")
    m = parse_measure(cfg.measures[0])
    value = continuous_energy(m, parse_potential(cfg.potential), parse_kernel(cfg.kernel), tol=1e-7)
    out.write(_dump(_clean(value.to_dict())))
    return EXIT_OK


def _closed_form_fekete_energy(Q, n):
    # For Q = c x^2 the minimal energy is Delta_n + log(2c)/2 (rescale x^2/2).
    if Q.label.startswith("quadratic:"):
        c = float(Q.label.split(":")[1])
        return delta_n(n) + 0.5 * math.log(2.0 * c)
    return None


def cmd_fekete(cfg, out=sys.stdout):
    if cfg.n < 2:
        raise UsageError("fekete needs --n >= 2")
    Q = parse_potential(cfg.potential)
    if Q.on_circle:
        raise UsageError("Fekete points are computed on the line only")
    res = fekete_points(cfg.n, Q, tol=1e-10)
    d = _out_dir(cfg)
    res.write_csv(os.path.join(d, "fekete_points.csv"))
    summary = res.to_dict()
    summary["delta_n_closed_form"] = _closed_form_fekete_energy(Q, cfg.n)
    _write(os.path.join(d, "fekete.json"), _dump(summary))
    out.write(_dump(summary))
    return EXIT_OK


def _single_check(cfg, m):
    Q = parse_potential(cfg.potential)
    if cfg.kind == "semicircle":
        return check_semicircular(m)
    if cfg.kind == "line":
        if Q.minimizer is None or Q.on_circle:
            raise UsageError("line checks need a quadratic potential")
        return check_line(m, Q, Q.minimizer, Q.min_energy)
    if cfg.kind == "circle":
        if not is_circular(m):
            raise UsageError("circle checks need a circle measure")
        if Q.label == "zero":
            return check_haar(m)
        if not Q.on_circle:
            raise UsageError("circle checks need the zero or cosine potential")
        return check_circle(m, Q, Q.minimizer, Q.min_energy, Q.rho)
    raise UsageError(f"--measure is not supported for verify {cfg.kind}")


def cmd_verify(cfg, out=sys.stdout):
    if cfg.kind not in VERIFY_KINDS:
        raise UsageError(f"verify needs one of {', '.join(VERIFY_KINDS)}")
    if cfg.measures:
        reports = [_single_check(cfg, parse_measure(s)) for s in cfg.measures]
    else:
        kind = cfg.kind
        if kind == "circle" and cfg.potential == "zero":
            kind = "haar"
        n = cfg.n if kind in ("discrete", "fekete") else None
        reports = trials.run_trials(kind, cfg.reps, cfg.seed, n)
    # --tol replaces the fixed floor; quadrature error bounds stay in.
    from .inequalities import TOLERANCE_FLOOR

    rows, violations = [], 0
    for i, r in enumerate(reports):
        tol = r.tolerance - TOLERANCE_FLOOR + cfg.tol
        ok = r.slack >= -tol
        violations += not ok
        rows.append([i, r.lhs, r.rhs, r.slack, tol, int(ok)])
    d = _out_dir(cfg)
    path = os.path.join(d, f"verify_{cfg.kind}.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trial", "lhs", "rhs", "slack", "tolerance", "ok"])
        for row in rows:
            writer.writerow([row[0]] + [format(float(v), ".17g") for v in row[1:5]] + [row[5]])
    with open(os.path.join(d, f"verify_{cfg.kind}.jsonl"), "w") as fh:
        for r in reports:
            fh.write(json.dumps(_clean(r.to_dict()), sort_keys=True, default=_json_default) + "\n")
    slacks = [row[3] for row in rows]
    summary = {"kind": cfg.kind, "trials": len(rows), "violations": violations,
               "min_slack": _finite(float(min(slacks))), "csv": path}
    out.write(_dump(summary))
    return EXIT_VIOLATION if violations else EXIT_OK


def _run(cfg):
    if cfg.n < 2 or cfg.reps < 1 or not cfg.beta > 0:
        raise UsageError("experiments need --n >= 2, --reps >= 1 and --beta > 0")
    return monte_carlo(cfg.n, cfg.beta, cfg.reps, RngSpec(cfg.seed, cfg.stream), cfg.workers)


def _experiment_lln(cfg, d):
    run = _run(cfg)
    run.write_csv(os.path.join(d, "lln_samples.csv"))
    s = run.summary()
    s["deviation"] = abs(s["mean"] - s["target_mean"])
    s["within_0.05"] = s["deviation"] < 0.05
    return s


def _experiment_clt(cfg, d):
    run = _run(cfg)
    run.write_csv(os.path.join(d, "clt_samples.csv"))
    lln = asymptotics.lln_constant(cfg.beta)
    x = math.sqrt(cfg.n) * (run.centered - lln)
    std = (x - x.mean()) / x.std(ddof=1) if x.size > 1 else x * 0
    counts, edges = np.histogram(std, bins=np.linspace(-4, 4, 33))
    with open(os.path.join(d, "clt_histogram.csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lo", "hi", "count", "normal_expected"])
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            expect = x.size * (stats.norm.cdf(hi) - stats.norm.cdf(lo))
            writer.writerow([format(lo, ".17g"), format(hi, ".17g"), int(c), format(expect, ".17g")])
    return {
        "n": cfg.n, "beta": cfg.beta, "reps": int(x.size), "seed": cfg.seed,
        "variance": float(np.var(x, ddof=1)) if x.size > 1 else math.nan,
        "stated_variance": asymptotics.clt_variance(cfg.beta),
        "exact_limit_variance": asymptotics.clt_variance_limit(cfg.beta),
        "finite_n_variance": cfg.n ** 3 * asymptotics.energy_cumulants(cfg.n, cfg.beta)[1],
        "standardized": {"mean": float(np.mean(std)), "variance": float(np.var(std, ddof=1)) if x.size > 1 else math.nan,
                         "skew": float(stats.skew(std)) if x.size > 2 else math.nan,
                         "kurtosis": float(stats.kurtosis(std)) if x.size > 3 else math.nan},
    }


def _experiment_ldp(cfg, d):
    beta = cfg.beta
    curve = asymptotics.ldp_curve(beta)
    curve.write_csv(os.path.join(d, "ldp_rate.csv"), os.path.join(d, "ldp_conjugate.csv"))
    zs = (-0.5, 0.25 * beta)
    ns = (20, 50, 100)
    with open(os.path.join(d, "ldp_scaled_mgf.csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["z", "n", "scaled_log_mgf", "R"])
        for z in zs:
            for n in ns:
                writer.writerow([format(z, ".17g"), n, format(asymptotics.scaled_log_mgf(z, n, beta), ".17g"),
                                 format(asymptotics.rate_function(z, beta), ".17g")])
    t0 = asymptotics.lln_constant(beta)
    return {"beta": beta, "lln_constant": t0, "R_star_at_lln": asymptotics.legendre_transform(t0, beta),
            "R_min_second_difference": float(np.min(np.diff(curve.R, 2))),
            "R_star_min_second_difference": float(np.min(np.diff(curve.R_star, 2)))}


def cmd_experiment(cfg, out=sys.stdout):
    runners = {"lln": _experiment_lln, "clt": _experiment_clt, "ldp": _experiment_ldp}
    if cfg.kind not in runners:
        raise UsageError("experiment needs one of lln, clt, ldp")
    d = _out_dir(cfg)
    summary = _clean(runners[cfg.kind](cfg, d))
    _write(os.path.join(d, f"{cfg.kind}_summary.json"), _dump(summary))
    out.write(_dump(summary))
    return EXIT_OK


COMMANDS = {"w2": cmd_w2, "energy": cmd_energy, "fekete": cmd_fekete, "verify": cmd_verify,
            "experiment": cmd_experiment}


# -- argument parsing ------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    # Defaults are None so that config-file values survive unless overridden.
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--stream", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")
    p.add_argument("--config", help="JSON config file; command-line flags take precedence")
    p.add_argument("--potential")
    p.add_argument("--kernel")
    p.add_argument("--measure", action="append", dest="measure")
    p.add_argument("--metric", choices=("angular", "chordal"))


def build_parser():
    parser = _Parser(prog="loggas", description="Log-gas energies, transport inequalities and beta ensembles.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    p = sub.add_parser("w2", help="W2 distance between two measure specs")
    p.add_argument("specs", nargs="*")
    p.add_argument("--optimal", action="store_true", help="true optimal circle W2 instead of the mean-aligned cut")
    _common(p)
    p = sub.add_parser("energy", help="continuous energy of a measure spec")
    p.add_argument("specs", nargs="*")
    _common(p)
    p = sub.add_parser("fekete", help="Fekete points of a potential")
    _common(p)
    p = sub.add_parser("verify", help="randomized checks of a transport inequality")
    p.add_argument("kind", choices=VERIFY_KINDS)
    _common(p)
    p = sub.add_parser("experiment", help="Monte Carlo and large-deviation experiments")
    p.add_argument("kind", choices=("lln", "clt", "ldp"))
    _common(p)
    return parser


def config_from_args(args):
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    specs = list(getattr(args, "specs", None) or []) + list(args.measure or [])
    kind = getattr(args, "kind", None)
    if args.command == "w2" and getattr(args, "optimal", False):
        kind = "optimal"
    overrides = {"command": args.command, "kind": kind, "n": args.n, "beta": args.beta, "reps": args.reps,
                 "seed": args.seed, "stream": args.stream, "workers": args.workers, "tol": args.tol,
                 "out": args.out, "potential": args.potential, "kernel": args.kernel,
                 "measures": specs or None, "metric": args.metric}
    return cfg.merged(overrides)


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg, out)
    except (UsageError, SpecError, DomainError) as exc:
        print(f"loggas: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, ConvergenceError, AlignmentError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"loggas: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
