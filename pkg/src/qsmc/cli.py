"""Command-line front end.

Exit codes: 0 success, 1 acceptance failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .errors import QSMCError
from .period import JM_csv, J_csv, M_csv, bloch_bound_csv, three_level_worst_case
from .reproduce import TARGETS
from .scenario import load_scenario, run_scenario

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def write_atomic(path: Path, text: str, force: bool) -> None:
    path = Path(path)
    if path.exists() and not force:
        raise UsageError(f"{path} exists; pass --force to overwrite")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_reproduce(args) -> int:
    if args.target not in TARGETS:
        raise UsageError(f"unknown target {args.target!r}; choose from {', '.join(TARGETS)}")
    target = TARGETS[args.target](seed=args.seed, trials=args.trials)
    out = Path(args.out)
    files = {f"{target.name}.json": json.dumps(target.to_dict(), indent=2) + "\n"}
    files.update(target.artifacts)
    for name in files:
        if (out / name).exists() and not args.force:
            raise UsageError(f"{out / name} exists; pass --force to overwrite")
    for name, text in files.items():
        write_atomic(out / name, text, True)

    print(f"{target.name}:")
    for check in target.checks:
        print("  " + check.line())
    for name in files:
        print(f"  wrote {out / name}")
    return EXIT_OK if target.passed else EXIT_FAIL


def cmd_run(args) -> int:
    scenario = load_scenario(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if changes:
        scenario = scenario.replace(**changes)
    out = Path(args.out)
    targets = [out / "report.json"] + ([out / "log.csv"] if args.log_csv else [])
    for path in targets:
        if path.exists() and not args.force:
            raise UsageError(f"{path} exists; pass --force to overwrite")

    report = run_scenario(scenario, workers=args.workers)
    write_atomic(out / "report.json", report.to_json() + "\n", True)
    if args.log_csv:
        write_atomic(out / "log.csv", report.log_csv(), True)
    lo, hi = report.interval
    print(f"p_hat = {report.p_hat:.6g}  (95% Wilson [{lo:.6g}, {hi:.6g}], "
          f"{report.n_failures}/{report.n_measurements} measurements)")
    print(f"acceptance bound {report.acceptance_bound:.6g}: {'PASS' if report.accepted else 'FAIL'}")
    print(f"wall time {report.wall_time:.2f} s", file=sys.stderr)
    if args.enforce and not report.accepted:
        return EXIT_FAIL
    return EXIT_OK


def cmd_curves(args) -> int:
    if args.epsilon < 0:
        raise UsageError("--epsilon must be non-negative")
    if args.kind == "bloch-bound":
        text = bloch_bound_csv(args.epsilon, n=args.points)
    else:
        worst = three_level_worst_case(args.epsilon, step=args.step)
        text = {"J": J_csv, "M": M_csv, "JM": JM_csv}[args.kind](worst)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        out = Path(args.out or f"{args.kind}.csv")
        write_atomic(out, text, args.force)
        print(f"wrote {out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    scenario = load_scenario(args.config)
    print(f"{args.config}: ok ({scenario.model}, good={sorted(scenario.good)}, "
          f"p0={scenario.p0}, reach={scenario.reach})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsmc", description="Sliding-mode control of quantum systems")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reproduce", help="recompute a published number and compare")
    r.add_argument("target", help=", ".join(TARGETS))
    r.add_argument("--out", default="qsmc-out", help="output directory (default: qsmc-out)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--trials", type=int, default=10000, help="Monte Carlo trials")
    r.add_argument("--force", action="store_true", help="overwrite existing outputs")
    r.set_defaults(func=cmd_reproduce)

    r = sub.add_parser("run", help="run a closed-loop scenario from a JSON config")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--trials", type=int)
    r.add_argument("--out", default="qsmc-run")
    r.add_argument("--log-csv", action="store_true", help="also write the per-trial outcome log")
    r.add_argument("--enforce", action="store_true", help="exit 1 if p_hat exceeds the bound")
    r.add_argument("--workers", type=int, help="worker threads (default: $QSMC_THREADS or 1)")
    r.add_argument("--force", action="store_true")
    r.set_defaults(func=cmd_run)

    r = sub.add_parser("curves", help="export design curves as CSV")
    r.add_argument("kind", choices=["bloch-bound", "J", "M", "JM"])
    r.add_argument("--epsilon", type=float, default=0.1)
    r.add_argument("--step", type=float, default=1e-3, help="RK4 step for J/M")
    r.add_argument("--points", type=int, default=501, help="samples for bloch-bound")
    r.add_argument("--out", help="output file, '-' for stdout (default: <kind>.csv)")
    r.add_argument("--force", action="store_true")
    r.set_defaults(func=cmd_curves)

    r = sub.add_parser("validate-config", help="check a scenario config")
    r.add_argument("config")
    r.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qsmc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QSMCError, ValueError, OSError) as exc:
        print(f"qsmc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
