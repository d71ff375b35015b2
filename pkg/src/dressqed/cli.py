"""``dressqed`` command line: solve, sweep and verify.

Exit codes: 0 success, 1 configuration error, 2 non-convergence,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config
from .dressing import ModelParams, write_csv
from .quadrature import AccuracyWarning
from .solver import solve_fixed_point
from .verification import certified_checks, observable_checks, run_battery

__all__ = ["main", "run_solve", "run_sweep", "run_verify",
           "EXIT_OK", "EXIT_CONFIG", "EXIT_NOT_CONVERGED", "EXIT_VERIFY"]

EXIT_OK, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("dressqed")

SWEEP_COLUMNS = ["alpha", "lambda_over_m0", "Y", "epsilon", "delta", "theoretical_rate",
                 "iterations", "Z", "m_over_m0", "theorem_margin", "certified", "status"]


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _write_lines(path, items):
    with Path(path).open("w", newline="\n") as fh:
        for k, v in items:
            fh.write(f"{k}: {_fmt(v)}\n")


def _params(cfg):
    return ModelParams.from_ratio(cfg.alpha, cfg.lambda_over_m0, cfg.m0)


def _solve(cfg):
    params = _params(cfg)
    f, report = solve_fixed_point(params, tol=cfg.tol, max_iter=cfg.max_iter,
                                  n_grid=cfg.grid_n, u_min_ratio=cfg.u_min_ratio)
    return params, f, report


def run_solve(cfg):
    """Solve one point; write solution.csv and report.txt under cfg.output_dir."""
    params, f, report = _solve(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    items = [("alpha", cfg.alpha), ("lambda_over_m0", cfg.lambda_over_m0), ("m0", cfg.m0),
             ("grid_n", cfg.grid_n), ("u_min_ratio", cfg.u_min_ratio),
             ("mode", "certified" if report.certified else "non-certified")]
    items += list(report.items().items())
    items.append(("residuals", ",".join(f"{r:.17g}" for r in report.residuals)))
    items.append(("measured_rates", ",".join(f"{r:.17g}" for r in report.measured_rates)))

    verdicts = []
    if report.converged:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AccuracyWarning)
            obs, checks = observable_checks(f, params, report)
        verdicts = certified_checks(f, params, report) + checks
        items += list(obs.items().items())
        items += [(f"check_{c.name}", c.status) for c in verdicts]
        write_csv(f, out / "solution.csv", {"dispersion": obs.dispersion})
    else:
        write_csv(f, out / "solution.csv", {"dispersion": np.hypot(f.g0, f.g1)})
    _write_lines(out / "report.txt", items)

    if not report.converged:
        log.error("no convergence after %d iterations (residual %.3e)",
                  report.iterations, report.final_residual)
        return EXIT_NOT_CONVERGED
    failed = [c.name for c in verdicts if not c.ok]
    if failed:
        log.error("verification failed: %s", ", ".join(failed))
        return EXIT_VERIFY
    return EXIT_OK


def sweep_point(cfg):
    """One sweep row as a dict; never raises."""
    row = {"alpha": cfg.alpha, "lambda_over_m0": cfg.lambda_over_m0}
    try:
        params, f, report = _solve(cfg)
        c = report.contraction
        row.update(Y=c.Y, epsilon=c.epsilon, delta=c.delta,
                   theoretical_rate=c.theoretical_rate, iterations=report.iterations,
                   certified=report.certified)
        if not report.converged:
            row["status"] = "not_converged"
            return row
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AccuracyWarning)
            obs, checks = observable_checks(f, params, report)
        checks = certified_checks(f, params, report) + checks
        row.update(Z=obs.Z, m_over_m0=obs.m_over_m0, theorem_margin=obs.theorem.margin)
        bad = [ch.name for ch in checks if not ch.ok]
        row["status"] = "ok" if not bad else "failed:" + "+".join(bad)
    except Exception as exc:  # recorded in the status column, sweep continues
        row["status"] = f"error:{type(exc).__name__}: {exc}".replace(",", ";")
    return row


def run_sweep(cfg):
    if not cfg.sweep:
        log.error("sweep needs a non-empty sweep specification")
        return EXIT_CONFIG
    points = [cfg.with_point(a, lam) for a, lam in cfg.sweep]
    if cfg.workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, len(points))) as pool:
            rows = list(pool.map(sweep_point, points))
    else:
        rows = [sweep_point(p) for p in points]

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "sweep.csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row.get(k, "nan")) for k in SWEEP_COLUMNS])
    failed = [r for r in rows if r["status"] != "ok"]
    for r in failed:
        log.error("alpha = %g, lambda_over_m0 = %g: %s", r["alpha"], r["lambda_over_m0"],
                  r["status"])
    return EXIT_NOT_CONVERGED if failed else EXIT_OK


def run_verify(cfg):
    outcome = run_battery(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify.txt").write_text(outcome.to_text())
    if not outcome.converged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK if outcome.passed else EXIT_VERIFY


_COMMANDS = {"solve": run_solve, "sweep": run_sweep, "verify": run_verify}


def _set_pair(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    return key.strip(), value.strip()


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat 'key = value' config file")
    common.add_argument("--alpha", help="coupling, e.g. 1/137")
    common.add_argument("--lambda-over-m0", help="cutoff ratio, e.g. e^10")
    common.add_argument("--m0", help="bare mass (default 1)")
    common.add_argument("--grid-n", help="number of grid nodes")
    common.add_argument("--u-min-ratio", help="smallest node / cutoff")
    common.add_argument("--tol", help="sup-distance tolerance")
    common.add_argument("--max-iter", help="iteration cap")
    common.add_argument("--out", dest="output_dir", help="output directory")
    common.add_argument("--workers", help="parallel sweep workers")
    common.add_argument("--set", dest="overrides", action="append", type=_set_pair,
                        default=[], metavar="KEY=VALUE", help="override any config key")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="dressqed", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve one (alpha, lambda_over_m0) point")
    sub.add_parser("sweep", parents=[common], help="solve a list of parameter points")
    sub.add_parser("verify", parents=[common], help="run the property battery")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    flags = {k: getattr(args, k) for k in
             ("alpha", "lambda_over_m0", "m0", "grid_n", "u_min_ratio", "tol",
              "max_iter", "output_dir", "workers")}
    flags.update(dict(args.overrides))
    try:
        cfg = load_config(args.config, flags)
    except ConfigError as exc:
        print(f"dressqed: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code = _COMMANDS[args.command](cfg)
    if code == EXIT_OK and args.command == "solve":
        log.info("wrote %s", Path(cfg.output_dir).resolve())
    return code


if __name__ == "__main__":
    sys.exit(main())
