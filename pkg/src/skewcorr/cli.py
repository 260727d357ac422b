"""Command-line entry point: ``skewcorr compute|sweep|gen|verify``.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 analytic method requested but no theorem applies.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import correlations, oracle, states
from .errors import InvariantViolation, NoAnalyticTheorem, ParseError, SkewCorrError
from .states import DEFAULT_TOL

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INVALID, EXIT_NOT_APPLICABLE = 0, 1, 2, 3

SWEEP_HEADER = [
    "x", "sqd_analytic", "sqd_numeric", "smin_analytic", "smin_numeric",
    "sqd_branch", "smin_branch", "sqd_dev", "smin_dev",
]
VERIFY_CLASSES = ("general-smin", "x-sqd", "block-sqd")


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    s = format(float(v), ".17g")
    return "0" if s == "-0" else s


def _measures(choice: str) -> list[str]:
    return ["sqd", "smin"] if choice == "both" else [choice]


def _methods(choice: str) -> list[str]:
    return ["analytic", "numeric"] if choice == "both" else [choice]


# --- compute ----------------------------------------------------------------

def cmd_compute(args, out) -> int:
    rho = states.load_state(args.input)
    cls = states.classify(rho, args.tol)
    print(f"structure: {cls.structure.value}", file=out)
    print(f"degenerate_A: {cls.degenerate_a}  degenerate_B: {cls.degenerate_b}", file=out)
    status = EXIT_OK
    for measure in _measures(args.measure):
        label = measure.upper()
        analytic = numeric = None
        if "analytic" in _methods(args.method):
            try:
                res = correlations.sqd_analytic(rho, args.tol) if measure == "sqd" else correlations.smin_analytic(rho, args.tol)
            except NoAnalyticTheorem as exc:
                print(f"{label} analytic: {exc}", file=out)
                status = EXIT_NOT_APPLICABLE
            else:
                analytic = res.value
                print(f"{label} analytic: {fmt(res.value)}  branch={res.branch}", file=out)
                if res.warning:
                    print(f"{label} warning: {res.warning}", file=out)
        if "numeric" in _methods(args.method):
            cfg = oracle.OptimizerConfig()
            res = oracle.sqd_numeric(rho, cfg) if measure == "sqd" else oracle.smin_numeric(rho, cfg, args.tol)
            numeric = res.value
            print(
                f"{label} numeric: {fmt(res.value)}  evaluations={res.evaluations} converged={res.converged}",
                file=out,
            )
        if analytic is not None and numeric is not None:
            print(f"{label} deviation: {fmt(abs(analytic - numeric))}", file=out)
    return status


# --- sweep ------------------------------------------------------------------

@dataclass
class SweepRecord:
    x: float
    sqd_analytic: float | None = None
    sqd_numeric: float | None = None
    smin_analytic: float | None = None
    smin_numeric: float | None = None
    sqd_branch: str = ""
    smin_branch: str = ""
    sqd_dev: float | None = None
    smin_dev: float | None = None

    def row(self) -> list[str]:
        return [fmt(getattr(self, name)) for name in SWEEP_HEADER]


def family_state(family: str, x: float, mix_base=None):
    if family == "werner":
        return states.werner(x)
    if family in states.EXAMPLE_MATRICES:
        return states.example_state(family, x)
    if family.startswith("mix:"):
        return states.mix_with_identity(mix_base, x)
    raise ValueError(f"unknown family {family!r}")


def family_grid(family: str, points: int) -> np.ndarray:
    lo = -1.0 if family == "werner" else 0.0
    if points == 1:
        return np.array([1.0])
    return np.array([lo + (1.0 - lo) * i / (points - 1) for i in range(points)])


def sweep_records(family: str, points: int, measure: str, method: str = "both",
                  tol: float = DEFAULT_TOL, cfg: oracle.OptimizerConfig | None = None) -> list[SweepRecord]:
    """One record per grid point of the family's parameter range."""
    cfg = cfg or oracle.OptimizerConfig()
    mix_base = states.load_state(family[4:]) if family.startswith("mix:") else None
    records = []
    for x in family_grid(family, points):
        rho = family_state(family, float(x), mix_base)
        rec = SweepRecord(float(x))
        for m in _measures(measure):
            analytic = numeric = None
            if "analytic" in _methods(method):
                try:
                    res = correlations.sqd_analytic(rho, tol) if m == "sqd" else correlations.smin_analytic(rho, tol)
                    analytic = res.value
                    setattr(rec, f"{m}_branch", res.branch)
                except NoAnalyticTheorem:
                    setattr(rec, f"{m}_branch", "none")
            if "numeric" in _methods(method):
                res = oracle.sqd_numeric(rho, cfg) if m == "sqd" else oracle.smin_numeric(rho, cfg, tol)
                numeric = res.value
            setattr(rec, f"{m}_analytic", analytic)
            setattr(rec, f"{m}_numeric", numeric)
            if analytic is not None and numeric is not None:
                setattr(rec, f"{m}_dev", abs(analytic - numeric))
        records.append(rec)
    return records


def write_sweep_csv(records: list[SweepRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for rec in records:
            writer.writerow(rec.row())


def cmd_sweep(args, out) -> int:
    records = sweep_records(args.family, args.points, args.measure, args.method, args.tol)
    write_sweep_csv(records, args.output)
    for m in _measures(args.measure):
        devs = [getattr(r, f"{m}_dev") for r in records if getattr(r, f"{m}_dev") is not None]
        if devs:
            print(f"{m.upper()} max |analytic - numeric| = {fmt(max(devs))}", file=out)
    print(f"wrote {len(records)} rows to {args.output}", file=out)
    return EXIT_OK


# --- gen --------------------------------------------------------------------

def cmd_gen(args, out) -> int:
    rho = states.gen_random(args.kind, args.seed)
    states.save_state(rho, args.output)
    cls = states.classify(rho, args.tol)
    print(f"structure: {cls.structure.value}", file=out)
    print(f"degenerate_A: {cls.degenerate_a}  degenerate_B: {cls.degenerate_b}", file=out)
    return EXIT_OK


# --- verify -----------------------------------------------------------------

@dataclass
class VerifyReport:
    trials: int
    state_class: str
    max_dev: float
    mean_dev: float
    failures: list[tuple[int, float]]
    tolerance: float
    rows: list[dict] = field(default_factory=list)
    variant_failures: dict | None = None

    @property
    def passing_variants(self) -> list:
        if self.variant_failures is None:
            return []
        return [v for v, n in self.variant_failures.items() if n == 0]


SMIN_KINDS = ("general", "degenerate-AB", "degenerate-A", "degenerate-B")


def verify_state(state_class: str, trial: int, seed: int):
    """Deterministic test state for one campaign trial; returns (kind, state)."""
    if state_class == "x-sqd":
        return "x_type", states.gen_random("x_type", seed)
    if state_class == "block-sqd":
        rho = states.gen_random("block_diagonal", seed)
        if trial % 2:
            return "block_diagonal_swapped", states.swap_subsystems(rho)
        return "block_diagonal", rho
    if state_class == "general-smin":
        kind = SMIN_KINDS[trial % len(SMIN_KINDS)]
        if kind == "general":
            return kind, states.gen_random("general", seed)
        return kind, states.gen_degenerate(seed, kind.split("-")[1])
    raise ValueError(f"unknown class {state_class!r}; choose from {VERIFY_CLASSES}")


def run_verify(state_class: str, trials: int, seed: int, tolerance: float,
               cfg: oracle.OptimizerConfig | None = None, tol: float = DEFAULT_TOL) -> VerifyReport:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    cfg = cfg or oracle.OptimizerConfig()
    rows, failures = [], []
    variant_failures = {v: 0 for v in correlations.BLOCK_VARIANTS} if state_class == "block-sqd" else None
    for i in range(trials):
        s = seed + i
        kind, rho = verify_state(state_class, i, s)
        if state_class == "general-smin":
            res = correlations.smin_analytic(rho, tol)
            numeric = oracle.smin_numeric(rho, cfg, tol).value
        elif state_class == "x-sqd":
            res = correlations.sqd_x_analytic(rho, tol)
            numeric = oracle.sqd_numeric(rho, cfg).value
        else:
            res = correlations.sqd_block_analytic(rho, tol)
            numeric = oracle.sqd_numeric(rho, cfg).value
            for v in variant_failures:
                alt = correlations.sqd_block_analytic(rho, tol, variant=v).value
                if abs(alt - numeric) > tolerance:
                    variant_failures[v] += 1
        dev = abs(res.value - numeric)
        rows.append({"trial": i, "seed": s, "kind": kind, "analytic": res.value,
                     "numeric": numeric, "deviation": dev, "branch": res.branch})
        if dev > tolerance:
            failures.append((s, dev))
    devs = [r["deviation"] for r in rows]
    return VerifyReport(trials, state_class, max(devs), float(np.mean(devs)), failures, tolerance,
                        rows, variant_failures)


def cmd_verify(args, out) -> int:
    report = run_verify(args.state_class, args.trials, args.seed, args.tolerance, tol=args.tol)
    print(f"class: {report.state_class}  trials: {report.trials}  tolerance: {fmt(report.tolerance)}", file=out)
    print(f"max_dev: {fmt(report.max_dev)}  mean_dev: {fmt(report.mean_dev)}", file=out)
    print(f"failures: {len(report.failures)}", file=out)
    for s, dev in report.failures:
        print(f"  seed {s}: deviation {fmt(dev)}", file=out)
    status = EXIT_OK if not report.failures else EXIT_VERIFY_FAILED
    if report.variant_failures is not None:
        for v, n in report.variant_failures.items():
            print(f"block variant source={v.source} y_sign={v.y_sign:+d}: {n} failures", file=out)
        passing = report.passing_variants
        certified = passing == [correlations.DEFAULT_BLOCK_VARIANT]
        print(f"block variant certified: {certified}", file=out)
        if not certified:
            status = EXIT_VERIFY_FAILED
    if args.output:
        with open(args.output, "w", newline="", encoding="utf-8") as fh:
            cols = ["trial", "seed", "kind", "analytic", "numeric", "deviation", "branch"]
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(cols)
            for r in report.rows:
                writer.writerow([r[c] if isinstance(r[c], (int, str)) else fmt(r[c]) for c in cols])
    return status


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewcorr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="SQD/SMIN of a state file")
    p.add_argument("--input", required=True)
    p.add_argument("--measure", choices=("sqd", "smin", "both"), default="both")
    p.add_argument("--method", choices=("analytic", "numeric", "both"), default="both")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="tabulate a one-parameter family to CSV")
    p.add_argument("--family", required=True, help="werner, example1, example3, example4 or mix:PATH")
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--measure", choices=("sqd", "smin", "both"), default="both")
    p.add_argument("--method", choices=("analytic", "numeric", "both"), default="both")
    p.add_argument("--output", required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="write a seeded random state file")
    p.add_argument("--kind", choices=states.GEN_KINDS, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="analytic vs numerical campaign over random states")
    p.add_argument("--class", dest="state_class", choices=VERIFY_CLASSES, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.add_argument("--output")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="structure/degeneracy tolerance")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "family", "").startswith("mix:") and not Path(args.family[4:]).exists():
        print(f"error: no such state file {args.family[4:]}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args, out)
    except (ParseError, InvariantViolation, OSError, ValueError, SkewCorrError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
