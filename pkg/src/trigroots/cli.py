"""Command-line entry point: ``trigroots <subcommand> [flags]``.

Machine-readable tables go to ``--output`` (or stdout); a short human
summary goes to stderr.  Exit codes: 0 on success, 1 on usage errors and
2 when a run is flagged unreliable or a check fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager
from typing import Sequence

import numpy as np

from . import covariance, edgeworth, ergodic, montecarlo, roots
from .coefficients import CoefficientDistribution, moment_table, stream, y_star
from .polynomial import TrigPolynomialSample

EXIT_OK, EXIT_USAGE, EXIT_UNRELIABLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# argument handling

_CONFIG_KEYS = {
    "dist", "p", "v1", "v2", "reference", "n", "m", "seed", "workers", "epsilon",
    "theta", "output", "format", "timing", "chunk_size", "t", "s",
}


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="base seed (default 0)")
    parser.add_argument("--output", default=None, help="write the table here instead of stdout")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--config", default=None, help="JSON file whose keys override flags")


def _dist_flags(parser: argparse.ArgumentParser, default: str) -> None:
    parser.add_argument("--dist", default=default, help="gaussian, uniform or mixture")
    parser.add_argument("--p", type=float, default=None)
    parser.add_argument("--v1", type=float, default=None)
    parser.add_argument("--v2", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trigroots", description="Root counts of random trigonometric polynomials.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="Monte Carlo root-count ensembles")
    _common(p)
    _dist_flags(p, "gaussian")
    p.add_argument("--n", type=int, action="append", help="degree (repeatable)")
    p.add_argument("--m", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--epsilon", type=float, action="append", help="cluster-diagnostic window (repeatable)")
    p.add_argument("--theta", type=float, action="append", help="small-ball exponent (repeatable)")
    p.add_argument("--timing", action="store_true", help="record wall-clock seconds")

    p = sub.add_parser("compare", help="variance shift of a law against Gaussian coefficients")
    _common(p)
    _dist_flags(p, "uniform")
    p.add_argument("--reference", default="gaussian")
    p.add_argument("--n", type=int, action="append")
    p.add_argument("--m", type=int, default=2000)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("ergodic-verify", help="weighted ergodic averages at large n")
    _common(p)
    p.add_argument("--n", type=int, action="append")

    p = sub.add_parser("edgeworth-verify", help="expansion residuals and cancellation enumeration")
    _common(p)
    _dist_flags(p, "uniform")
    p.add_argument("--n", type=int, action="append")
    p.add_argument("--m", type=int, default=20000)

    p = sub.add_parser("covariance", help="covariance of the rescaled pair statistic")
    _common(p)
    p.add_argument("--n", type=int, action="append")
    p.add_argument("--epsilon", type=float, action="append", help="lag floor for the determinant bound")

    p = sub.add_parser("kacrice-demo", help="root count vs smoothed Kac-Rice count")
    _common(p)
    _dist_flags(p, "gaussian")
    p.add_argument("--n", type=int, action="append")
    p.add_argument("--m", type=int, default=5)

    p = sub.add_parser("constants", help="exact rational constants of the variance shift")
    _common(p)
    return parser


def _apply_config(args: argparse.Namespace) -> None:
    if not args.config:
        return
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    cfg = dict(cfg)
    if "n_list" in cfg:
        cfg["n"] = cfg.pop("n_list")
    if "base_seed" in cfg:
        cfg["seed"] = cfg.pop("base_seed")
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if isinstance(cfg.get("dist"), dict):
        inner = dict(cfg.pop("dist"))
        cfg["dist"] = inner.pop("dist", inner.pop("kind", "gaussian"))
        cfg.update(inner)
    for key in ("n", "epsilon", "theta"):
        if key in cfg and not isinstance(cfg[key], list):
            cfg[key] = [cfg[key]]
    for key, value in cfg.items():
        if key in ("t", "s") or hasattr(args, key):
            setattr(args, key, value)
        else:
            raise UsageError(f"config key {key!r} does not apply to {args.command}")


def _dist(args, attr: str = "dist") -> CoefficientDistribution:
    cfg = {"dist": getattr(args, attr)}
    if attr == "dist":
        cfg.update({k: getattr(args, k) for k in ("p", "v1", "v2") if getattr(args, k, None) is not None})
    try:
        return CoefficientDistribution.from_config(cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _seed(args) -> int:
    return 0 if args.seed is None else int(args.seed)


@contextmanager
def _sink(path: str | None):
    if path is None:
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc
    with fh:
        yield fh


def _emit(args, rows: list[dict], columns: Sequence[str]) -> None:
    with _sink(args.output) as fh:
        montecarlo.write_table(rows, fh, args.format, columns)


def _say(*parts) -> None:
    print(*parts, file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands


def _simulate(args) -> int:
    dist = _dist(args)
    n_list = args.n or [64]
    seed = _seed(args)
    if args.epsilon or args.theta:
        rows = []
        for n in n_list:
            a, b = montecarlo.draw_coefficients(dist, n, seed, 0, args.m)
            for eps in args.epsilon or []:
                rows.append(roots.cluster_diagnostic((a, b), eps, seed=seed).as_row())
            for theta in args.theta or []:
                rows.append(roots.small_ball_diagnostic((a, b), theta, seed=seed).as_row())
        _emit(args, rows, ("n", "epsilon_or_theta", "estimate", "stderr", "n_samples", "seed"))
        _say(f"{dist.name}: {len(rows)} diagnostic rows over m={args.m} samples")
        return EXIT_OK
    config = montecarlo.ExperimentConfig(dist, n_list, args.m, seed, args.workers)
    summary = montecarlo.run_ensemble(config, timing=args.timing)
    _emit(args, [r.as_row() for r in summary.rows], montecarlo.CSV_COLUMNS)
    for r in summary.rows:
        _say(f"{r.dist} n={r.n}: mean/n={r.mean_over_n:.5f} +- {r.stderr_mean:.5f}, "
             f"var/n={r.var_over_n:.5f} +- {r.stderr_var:.5f}, excluded {r.suspicious}")
    if not dist.doeblin_ok:
        _say(f"note: {dist.doeblin_note}")
    if summary.unreliable:
        _say("run flagged unreliable: more than 0.1% of samples excluded")
        return EXIT_UNRELIABLE
    return EXIT_OK


def _compare(args) -> int:
    dist_y = _dist(args)
    dist_g = _dist(args, "reference")
    n_list = args.n or [64, 128, 256]
    seed = _seed(args)
    sy = montecarlo.run_ensemble(montecarlo.ExperimentConfig(dist_y, n_list, args.m, seed, args.workers))
    sg = montecarlo.run_ensemble(montecarlo.ExperimentConfig(dist_g, n_list, args.m, seed, args.workers))
    table_y, table_g = moment_table(dist_y), moment_table(dist_g)
    if y_star(table_g) != 0:
        _say("note: the reference law is not Gaussian; the prediction uses y* of the first law only")
    report = montecarlo.compare_to_theory(sy, sg, table_y)
    rows = [dict(r.as_row(), row=f"n={r.n}") for r in report.rows]
    if report.extrapolated is not None:
        rows.append(dict(report.extrapolated.as_row(), n="", row="extrapolated"))
    _emit(args, rows, ("row", "n", "observed_shift", "predicted_shift", "stderr", "z"))
    _say(f"{dist_y.name} vs {dist_g.name}: predicted shift y*/60 = {report.predicted_shift:.6g}")
    for r in report.rows:
        _say(f"  n={r.n}: observed {r.observed_shift:+.5f} +- {r.stderr:.5f} (z={r.z:+.2f})")
    if report.extrapolated is not None:
        e = report.extrapolated
        _say(f"  1/n -> 0: {e.observed_shift:+.5f} +- {e.stderr:.5f} (z={e.z:+.2f})")
    _say(f"caveat: {report.caveat}")
    return EXIT_UNRELIABLE if sy.unreliable or sg.unreliable else EXIT_OK


def _angles(args) -> tuple[float, float]:
    t, s = getattr(args, "t", None), getattr(args, "s", None)
    if t is not None and s is not None:
        return float(t), float(s)
    if args.seed is None:
        return 1.0, math.sqrt(2.0)
    u = stream(args.seed, "angles", 0).uniform(0.5, 3.0, 2)
    return float(u[0]), float(u[1])


def ergodic_rows(n: int, t: float, s: float) -> list[dict]:
    """Every ergodic check at one length as table rows with tolerances."""
    rows = []

    def add(check, case, value, limit, tol):
        err = abs(value - limit)
        rows.append({"check": check, "case": case, "n": n, "value": value, "limit": limit,
                     "abs_error": err, "tolerance": tol, "passed": err <= tol})

    for i in (1, 2):
        for j in (1, 2):
            for l in (1, 2):
                for l2 in (1, 2):
                    add("quartic", f"{i}{j}{l}{l2}", ergodic.quartic_average(i, j, l, l2, t, s, n),
                        ergodic.quartic_limit(i, j), 1e-2)
    for i in (1, 2):
        for j in (1, 2):
            for l in (1, 2):
                add("cross-square", f"{i}{j}{l}", ergodic.mixed_average("cross-square", (i, j, l), t, s, n), 0.0, 1e-2)
            add("cross-cross", f"{i}{j}", ergodic.mixed_average("cross-cross", (i, j), t, s, n), 0.0, 1e-2)
    for rows_idx, cols_idx in (((1, 1, 1), (1, 1, 2)), ((1, 2, 2), (1, 2, 1)), ((2, 2, 1), (1, 2, 2)),
                               ((1, 1, 2), (2, 2, 2)), ((2, 1, 2), (1, 1, 1))):
        case = "".join(map(str, rows_idx)) + "/" + "".join(map(str, cols_idx))
        add("triple", case, ergodic.mixed_average("triple", (rows_idx, cols_idx), t, s, n), 0.0, 1e-2)
    for f in ergodic.TEST_FUNCTIONS:
        for q in range(5):
            query = ergodic.ErgodicQuery(t, q, n, f)
            add("weighted", f"{f},q={q}", ergodic.weighted_average(query), query.limit, 5e-3)
    for b in (t, s, t + s, t - s):
        for i in (0, 1, 2):
            ts = ergodic.trig_sum(b, i, n)
            add("trig-sum", f"b={b:.6g},i={i}", ts.value, 0.0, ts.bound)
    return rows


def _ergodic(args) -> int:
    t, s = _angles(args)
    rows = []
    for n in args.n or [10**6]:
        rows.extend(ergodic_rows(n, t, s))
    _emit(args, rows, ("check", "case", "n", "value", "limit", "abs_error", "tolerance", "passed"))
    failed = [r for r in rows if not r["passed"]]
    _say(f"angles t={t:.6g}, s={s:.6g}: {len(rows) - len(failed)}/{len(rows)} checks within tolerance")
    return EXIT_UNRELIABLE if failed else EXIT_OK


def _edgeworth(args) -> int:
    dist = _dist(args)
    n_list = args.n or [64, 128, 256]
    seed = _seed(args)
    report = edgeworth.cancellation_survivors()
    rows = edgeworth.edgeworth_residual(edgeworth.first_coordinate_quartic, dist, "identity", n_list,
                                        m=args.m, base_seed=seed)
    _emit(args, [r.as_row() for r in rows], list(rows[0].as_row()))
    _say(f"cancellation: {report.surviving_pairs} of {report.total_pairs} ordered pairs survive, "
         f"{len(report.survivors)} patterns, closed-form families {'match' if report.exact else 'DIFFER'}")
    coeffs = edgeworth.corrector_coefficients(dist, edgeworth.identity_mixing(n_list[0]))
    first = edgeworth.first_order_term(edgeworth.first_coordinate_quartic, coeffs, base_seed=seed)
    _say(f"first-order term for f = x1^4: quadrature {first.quadrature:.3g}, "
         f"Monte Carlo {first.monte_carlo:.3g} +- {first.stderr:.3g}")
    ok = report.exact
    for r0, r1 in zip(rows, rows[1:]):
        slack = 2 * math.hypot(r0.stderr_times_n, r1.stderr_times_n)
        trend = r1.residual_times_n <= r0.residual_times_n + slack
        ok &= trend
        _say(f"residual*n: n={r0.n} {r0.residual_times_n:.4g} -> n={r1.n} {r1.residual_times_n:.4g} "
             f"({'non-increasing' if trend else 'increasing'} within 2 SE)")
    return EXIT_OK if ok else EXIT_UNRELIABLE


def _covariance(args) -> int:
    rows = []
    us = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 1e3, 1e6]
    for u in us:
        lim = covariance.sigma_limit(u)
        rows.append({"quantity": "det_limit", "argument": u, "value": lim.det()})
        rows.append({"quantity": "min_eigenvalue_limit", "argument": u, "value": lim.min_eigenvalue()})
    for n in args.n or [64, 256, 1024]:
        for u in (0.5, 2.0, 10.0):
            gap = np.max(np.abs(covariance.sigma_n(n, u, 0.0).entries - covariance.sigma_limit(u).entries))
            rows.append({"quantity": f"max_entry_gap_n={n}", "argument": u, "value": float(gap)})
    for eps in args.epsilon or [0.5]:
        floor = covariance.det_floor(eps)
        rows.append({"quantity": "det_floor", "argument": eps, "value": floor.value})
    vc = covariance.gaussian_variance_constant()
    rows.append({"quantity": "variance_constant", "argument": "", "value": vc.value})
    rows.append({"quantity": "variance_constant_full_period", "argument": "", "value": vc.full_period_value})
    _emit(args, rows, ("quantity", "argument", "value"))
    _say(f"C(G) on [0, pi): {vc.value:.6f}; on [0, 2 pi): {vc.full_period_value:.6f}")
    _say(f"det at u=1e6: {covariance.sigma_limit(1e6).det():.10f} (limit 1/9 = {1 / 9:.10f})")
    return EXIT_OK


def _kacrice(args) -> int:
    dist = _dist(args)
    seed = _seed(args)
    rows = []
    for n in args.n or [64]:
        a, b = montecarlo.draw_coefficients(dist, n, seed, 0, args.m)
        for j in range(args.m):
            sample = TrigPolynomialSample(a[j], b[j])
            res = roots.count_roots(sample, locate=False)
            kr = roots.kac_rice_count(sample)
            crit = roots.count_roots(sample.derivative(), locate=False).count
            rows.append({"sample": j, "n": n, "count": res.count, "kac_rice": kr.value, "delta": kr.delta,
                         "bound": 1 + crit, "flagged": res.flagged,
                         "match": round(kr.value) == res.count and abs(kr.value - res.count) < 1e-6,
                         "seed": seed})
    _emit(args, rows, ("sample", "n", "count", "kac_rice", "delta", "bound", "flagged", "match", "seed"))
    bad = [r for r in rows if not r["flagged"] and not r["match"]]
    over = [r for r in rows if r["kac_rice"] > r["bound"] + 1e-9]
    _say(f"{len(rows) - len(bad)}/{len(rows)} samples: smoothed count equals the root count; "
         f"{len(over)} exceed 1 + #zeros(p')")
    return EXIT_UNRELIABLE if bad or over else EXIT_OK


def _constants(args) -> int:
    chain = edgeworth.assemble_constants()
    rows = [{"step": label, "value": value} for label, value in chain.steps]
    rows += [
        {"step": "inner_sum", "value": str(chain.inner_sum)},
        {"step": "gamma_prime_limit", "value": str(chain.gamma_prime_limit)},
        {"step": "theorem_constant", "value": str(chain.theorem_constant)},
        {"step": "iid_constant", "value": str(chain.iid_constant)},
    ]
    _emit(args, rows, ("step", "value"))
    _say(f"{chain.inner_sum} -> {chain.gamma_prime_limit} -> {chain.theorem_constant}; "
         f"i.i.d.: (E Y^4 - 3) * {chain.iid_constant}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _simulate,
    "compare": _compare,
    "ergodic-verify": _ergodic,
    "edgeworth-verify": _edgeworth,
    "covariance": _covariance,
    "kacrice-demo": _kacrice,
    "constants": _constants,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv`` and run the subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args)
        if args.output:
            try:
                open(args.output, "a", encoding="utf-8").close()
            except OSError as exc:
                raise UsageError(f"cannot write {args.output}: {exc}") from exc
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        _say(str(exc))
        return EXIT_USAGE
    except ValueError as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
