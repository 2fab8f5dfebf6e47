"""Command-line front end.

Four subcommands:

* ``check RELFILE MATFILE``: parse a relation file and an assignment,
  print a verdict table, exit 1 when any relation is unsatisfied.
* ``approx RELFILE MATFILE --procedure ... --schedule ...``: run a
  compression procedure and report residual curves (CSV via --out).
* ``experiment NAME``: run one randomized experiment (--seed required)
  and report pass/fail against its threshold.
* ``reproduce``: run the whole fixed-seed inequality suite.

Exit codes: 0 success, 1 an unsatisfied relation or a failed
experiment threshold, 2 usage errors, 3 unreadable or unparsable input
files.  Human-readable tables go to stdout; machine-readable output
(JSON lines, CSV) only ever goes to files named by --out.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from . import matcalc, verify
from .approx import CompressionSchedule, residual_curves, write_residual_csv
from .matcalc import TolerancePolicy
from .ncpoly import ParseError
from .relations import check_all, describe, load_assignment, load_relations
from .verify import Ensemble, ExperimentReport, write_reports

EXPERIMENT_NAMES = ("expnorm", "heinz", "monotone-sqrt", "monotone-square",
                    "commutator", "positivity")

MAX_DIM = 512


@dataclass(frozen=True)
class RunConfig:
    """Validated bundle of options for one invocation."""

    command: str
    tol_eq: float = 1e-9
    tol_psd: float = 1e-9
    seed: int | None = None
    dim: int | None = None
    count: int | None = None
    budget: int | None = None
    out: str | None = None
    schedule: str | None = None
    cutoff: str = "sharp"
    name: str | None = None
    paths: tuple[str, ...] = field(default=())

    def policy(self) -> TolerancePolicy:
        return TolerancePolicy(tol_eq=self.tol_eq, tol_psd=self.tol_psd)


class UsageError(ValueError):
    pass


def _paths(args: argparse.Namespace) -> tuple[str, ...]:
    if hasattr(args, "relfile"):
        return (args.relfile, args.matfile)
    return tuple(getattr(args, "paths", ()) or ())


def _config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        tol_eq=getattr(args, "tol_eq", 1e-9),
        tol_psd=getattr(args, "tol_psd", 1e-9),
        seed=getattr(args, "seed", None),
        dim=getattr(args, "dim", None),
        count=getattr(args, "count", None),
        budget=getattr(args, "budget", None),
        out=getattr(args, "out", None),
        schedule=getattr(args, "schedule", None),
        cutoff=getattr(args, "cutoff", "sharp"),
        name=getattr(args, "name", None),
        paths=_paths(args),
    )
    if cfg.dim is not None and not 1 <= cfg.dim <= MAX_DIM:
        raise UsageError(f"--dim must lie in [1, {MAX_DIM}]")
    for label in ("count", "budget"):
        value = getattr(cfg, label)
        if value is not None and value < 1:
            raise UsageError(f"--{label} must be at least 1")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matrel",
        description="Check matrix relations, compress assignments, and run "
                    "operator-norm inequality experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tols(p):
        p.add_argument("--tol-eq", dest="tol_eq", type=float, default=1e-9,
                       help="relative equality tolerance (default 1e-9)")
        p.add_argument("--tol-psd", dest="tol_psd", type=float, default=1e-9,
                       help="relative positivity tolerance (default 1e-9)")

    p_check = sub.add_parser("check", help="check an assignment against a "
                                           "relation file")
    p_check.add_argument("relfile", metavar="RELFILE")
    p_check.add_argument("matfile", metavar="MATFILE")
    add_tols(p_check)

    p_approx = sub.add_parser("approx", help="run a compression procedure "
                                             "and report residual curves")
    p_approx.add_argument("relfile", metavar="RELFILE")
    p_approx.add_argument("matfile", metavar="MATFILE")
    p_approx.add_argument("--procedure", required=True, dest="name",
                          choices=("loewner", "quasicentral"))
    p_approx.add_argument("--schedule", required=True,
                          help="comma-separated ranks, e.g. 8,16,32")
    p_approx.add_argument("--cutoff", default="sharp",
                          help="sharp or ramp:WIDTH (default sharp)")
    p_approx.add_argument("--out", help="write residual curves as CSV")
    add_tols(p_approx)

    p_exp = sub.add_parser("experiment", help="run one randomized experiment")
    p_exp.add_argument("name", choices=EXPERIMENT_NAMES)
    p_exp.add_argument("paths", nargs="*", metavar="RELFILE",
                       help="relation file (positivity only)")
    p_exp.add_argument("--seed", type=int, required=True)
    p_exp.add_argument("--dim", type=int)
    p_exp.add_argument("--count", type=int)
    p_exp.add_argument("--budget", type=int)
    p_exp.add_argument("--out", help="write JSON lines here")
    add_tols(p_exp)

    p_rep = sub.add_parser("reproduce", help="run the fixed-seed suite")
    p_rep.add_argument("--budget", type=int, default=20000,
                       help="ratio evaluations per search dimension")
    p_rep.add_argument("--out", help="write JSON lines here")
    add_tols(p_rep)
    return parser


def _print_verdict_table(relations, verdict) -> None:
    width = max([len(describe(r)) for r in relations] + [24])
    print(f"{'relation':<{width}}  {'ok':<3} {'margin':>13} {'residual':>13}")
    for rel, part in zip(relations, verdict.parts):
        ok = "yes" if part.satisfied else "NO"
        print(f"{describe(rel):<{width}}  {ok:<3} {part.margin:>13.6e} "
              f"{part.residual:>13.6e}")


def _cmd_check(cfg: RunConfig) -> int:
    _, relations = load_relations(cfg.paths[0])
    assignment = load_assignment(cfg.paths[1])
    verdict = check_all(relations, assignment, cfg.policy())
    _print_verdict_table(relations, verdict)
    print(("satisfied" if verdict.satisfied else "unsatisfied")
          + f" ({verdict.detail}, worst margin {verdict.margin:.6e})")
    return 0 if verdict.satisfied else 1


def _cmd_approx(cfg: RunConfig) -> int:
    _, relations = load_relations(cfg.paths[0])
    assignment = load_assignment(cfg.paths[1])
    schedule = CompressionSchedule.parse(cfg.schedule, cfg.cutoff)
    rows = residual_curves(assignment, relations, schedule, cfg.name,
                           cfg.policy())
    if cfg.out:
        write_residual_csv(cfg.out, rows)
        print(f"wrote {len(rows)} rows to {cfg.out}")
    else:
        print(f"{'rank':>5} {'residual':>13} {'alpha':>9} {'defect':>9}  relation")
        for row in rows:
            print(f"{row['rank']:>5} {row['residual']:>13.6e} "
                  f"{row['alpha']:>9.6f} {row['defect']:>9.3e}  {row['relation']}")
    final = max(r["rank"] for r in rows)
    worst = max(r["residual"] for r in rows if r["rank"] == final)
    print(f"final rank {final}: worst residual {worst:.6e}")
    return 0


def _run_experiment(cfg: RunConfig) -> list[ExperimentReport]:
    seed = cfg.seed
    name = cfg.name
    if name == "expnorm":
        e = Ensemble("general", cfg.dim or 6, seed, cfg.count or 1000)
        return [verify.exp_norm_experiment(e)]
    if name == "heinz":
        e = Ensemble("general", cfg.dim or 4, seed, cfg.count or 125)
        return [verify.heinz_experiment(e)]
    if name == "monotone-sqrt":
        e = Ensemble("order-pair", cfg.dim or 4, seed, cfg.count or 1000)
        return [verify.monotone_experiment(0.5, e)]
    if name == "monotone-square":
        e = Ensemble("order-pair", cfg.dim or 2, seed, cfg.count or 200)
        return [verify.monotone_experiment(2.0, e)]
    if name == "commutator":
        return [verify.commutator_sqrt_search(cfg.dim or 4, seed,
                                              cfg.budget or 20000)]
    if name == "positivity":
        if cfg.paths:
            from pathlib import Path
            text = Path(cfg.paths[0]).read_text()
        else:
            text = verify.DEFAULT_POSITIVITY_RELATIONS
        dims = [cfg.dim] if cfg.dim else [2, 3, 4, 5, 6]
        return [verify.positivity_transfer_check(
            text, dims=dims, seed=seed, count=cfg.count or 40,
            policy=cfg.policy())]
    raise UsageError(f"unknown experiment {name!r}")


def _report_lines(reports: list[ExperimentReport]) -> bool:
    all_passed = True
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        if rep.threshold is None:
            status = "INFO"
        threshold = "none" if rep.threshold is None else f"{rep.threshold:g}"
        print(f"{status} {rep.id}: max_violation={rep.max_violation:.6e} "
              f"threshold={threshold} samples={rep.samples} "
              f"({rep.runtime_ms:.0f} ms)")
        all_passed = all_passed and rep.passed
    return all_passed


def _cmd_experiment(cfg: RunConfig) -> int:
    reports = _run_experiment(cfg)
    ok = _report_lines(reports)
    if cfg.out:
        write_reports(cfg.out, reports)
        print(f"wrote {len(reports)} report(s) to {cfg.out}")
    return 0 if ok else 1


def _cmd_reproduce(cfg: RunConfig) -> int:
    reports = verify.run_reproduction(commutator_budget=cfg.budget or 20000)
    ok = _report_lines(reports)
    if cfg.out:
        write_reports(cfg.out, reports)
        print(f"wrote {len(reports)} report(s) to {cfg.out}")
    return 0 if ok else 1


_COMMANDS = {
    "check": _cmd_check,
    "approx": _cmd_approx,
    "experiment": _cmd_experiment,
    "reproduce": _cmd_reproduce,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return _COMMANDS[cfg.command](cfg)
    except (ParseError, matcalc.MatrixError) as err:
        print(f"parse error: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"cannot read input: {err}", file=sys.stderr)
        return 3
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
