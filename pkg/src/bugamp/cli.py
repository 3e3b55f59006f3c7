"""Command-line entry point.

    bugamp run      --problems RaceToWait --methods bf,ens --budget 1300 ...
    bugamp describe LockOrderInversion [--json]
    bugamp trace    RaceToWait --params 1,0.3,0.05,0.32,0.05 --seed 1
    bugamp report   --records out/records.csv --out fresh_dir

Configuration may come from a file (flat key=value lines or JSON); command
line flags override file values.  The effective configuration, with the
source of every field, is echoed to `config_effective.json` in the output
directory, alongside the derived per-trial seed tree for exact replay.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

from . import protocol, report
from .errors import BoundsViolation, BugampError, ConfigError, UnknownProblem
from .problems import PROBLEM_NAMES, build_problem
from .protocol import (DESK_BUDGET, DESK_TRIALS, DESK_VALIDATION_RUNS,
                       FULL_BUDGET, FULL_TRIALS, DEFAULT_VALIDATION_RUNS,
                       METHODS)
from .sim.scheduler import simulate_trial, trace_to_csv

PROFILES = {
    "desk": {"budget": DESK_BUDGET, "trials": DESK_TRIALS,
             "validation_runs": DESK_VALIDATION_RUNS},
    "full": {"budget": FULL_BUDGET, "trials": FULL_TRIALS,
             "validation_runs": DEFAULT_VALIDATION_RUNS},
}

_FIELD_TYPES = {
    "problems": str, "methods": str, "budget": int, "trials": int,
    "seed": int, "noise": float, "validation_runs": int, "out": str,
    "profile": str, "jobs": int,
}


@dataclass
class RunConfig:
    problems: list[str]
    methods: list[str]
    budget: int
    trials: int
    seed: int
    noise: float | None
    validation_runs: int
    out: str
    jobs: int
    sources: dict[str, str] = field(default_factory=dict)


def _parse_config_file(path: str) -> dict:
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    if path.endswith(".json"):
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigError("config: JSON root must be an object")
        return data
    data = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config: line {lineno} is not key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        data[key] = value
    return data


def _coerce(key: str, value):
    caster = _FIELD_TYPES.get(key)
    if caster is None:
        raise ConfigError(f"config: unknown field {key!r}")
    try:
        return caster(value)
    except (TypeError, ValueError):
        raise ConfigError(f"config: field {key!r} expects "
                          f"{caster.__name__}, got {value!r}") from None


def resolve_run_config(args) -> RunConfig:
    """Defaults, then profile, then config file, then flags."""
    values = {
        "problems": "all", "methods": ",".join(METHODS),
        "budget": FULL_BUDGET, "trials": FULL_TRIALS, "seed": 0,
        "noise": None, "validation_runs": DEFAULT_VALIDATION_RUNS,
        "out": os.environ.get("BUGAMP_OUT", "bugamp_out"), "jobs": 1,
    }
    sources = {key: "default" for key in values}
    if os.environ.get("BUGAMP_OUT"):
        sources["out"] = "env:BUGAMP_OUT"

    if args.profile:
        if args.profile not in PROFILES:
            raise ConfigError(f"profile: unknown profile {args.profile!r}")
        for key, val in PROFILES[args.profile].items():
            values[key] = val
            sources[key] = f"profile:{args.profile}"

    if args.config:
        for key, val in _parse_config_file(args.config).items():
            values[key] = _coerce(key, val)
            sources[key] = f"file:{args.config}"

    for key in _FIELD_TYPES:
        flag = getattr(args, key, None)
        if flag is not None and key != "profile":
            values[key] = flag
            sources[key] = "flag"

    problems = (list(PROBLEM_NAMES) if values["problems"] == "all"
                else [p.strip() for p in str(values["problems"]).split(",")
                      if p.strip()])
    for name in problems:
        if name not in PROBLEM_NAMES:
            raise ConfigError(
                f"problems: unknown problem {name!r}; valid names: "
                f"{', '.join(PROBLEM_NAMES)}")
    methods = [m.strip().lower() for m in str(values["methods"]).split(",")
               if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"methods: unknown method {m!r}; "
                              f"valid: {', '.join(METHODS)}")
    if int(values["budget"]) < 100:
        raise ConfigError("budget: must be at least 100")
    if int(values["trials"]) < 1:
        raise ConfigError("trials: must be at least 1")
    if int(values["validation_runs"]) < 1:
        raise ConfigError("validation_runs: must be at least 1")
    if values["noise"] is not None and float(values["noise"]) < 0:
        raise ConfigError("noise: must be nonnegative")
    if int(values["jobs"]) < 1:
        raise ConfigError("jobs: must be at least 1")

    return RunConfig(
        problems=problems, methods=methods, budget=int(values["budget"]),
        trials=int(values["trials"]), seed=int(values["seed"]),
        noise=None if values["noise"] is None else float(values["noise"]),
        validation_runs=int(values["validation_runs"]),
        out=str(values["out"]), jobs=int(values["jobs"]), sources=sources)


def _echo_config(cfg: RunConfig) -> None:
    payload = {
        "problems": cfg.problems, "methods": cfg.methods,
        "budget": cfg.budget, "trials": cfg.trials, "seed": cfg.seed,
        "noise": cfg.noise, "validation_runs": cfg.validation_runs,
        "out": cfg.out, "jobs": cfg.jobs,
        "checkpoints": protocol.checkpoint_schedule(cfg.budget),
        "sources": cfg.sources,
    }
    with open(os.path.join(cfg.out, "config_effective.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _echo_seeds(cfg: RunConfig) -> None:
    tree = {
        problem: {
            method: {str(t): protocol.run_trial_seed(cfg.seed, problem,
                                                     method, t)
                     for t in range(cfg.trials)}
            for method in cfg.methods}
        for problem in cfg.problems}
    with open(os.path.join(cfg.out, "seeds.json"), "w") as fh:
        json.dump(tree, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(args) -> int:
    cfg = resolve_run_config(args)
    os.makedirs(cfg.out, exist_ok=True)
    _echo_config(cfg)
    _echo_seeds(cfg)
    result = protocol.run_matrix(
        cfg.problems, cfg.methods, cfg.budget, cfg.trials, cfg.seed,
        validation_runs=cfg.validation_runs, noise_factor=cfg.noise,
        jobs=cfg.jobs)
    report.emit_reports(result.records, result.validations, cfg.out,
                        problems=cfg.problems)
    final = {}
    for v in result.validations:
        if v.rank == 1:
            final.setdefault((v.problem, v.method), []).append(v.score)
    for problem in cfg.problems:
        parts = []
        for method in cfg.methods:
            scores = final.get((problem, method), [])
            mean = sum(scores) / len(scores) if scores else math.nan
            parts.append(f"{method}={mean:.3f}")
        print(f"{problem}: " + " ".join(parts))
    print(f"wrote {cfg.out}/records.csv and reports")
    return 0


def cmd_describe(args) -> int:
    spec = build_problem(args.problem)
    if args.json:
        print(spec.manifest_json())
        return 0
    m = spec.manifest()
    print(f"{m['name']}: dim={m['dim']}")
    print(f"  effects: {', '.join(m['effects'])}")
    print(f"  root cause: {m['root_cause']}")
    print(f"  bounds: {m['bounds']}")
    print(f"  bug witness:  {m['bug_witness']}")
    print(f"  pass witness: {m['pass_witness']}")
    print(f"  noise factor: {m['noise_factor']}")
    print(f"  insight: {m['insight']}")
    return 0


def cmd_trace(args) -> int:
    spec = build_problem(args.problem)
    params = tuple(float(v) for v in args.params.split(","))
    outcome = simulate_trial(spec, params, args.seed,
                             noise_factor=args.noise, record_trace=True)
    sys.stdout.write(trace_to_csv(outcome.trace))
    bug = f"/{outcome.bug.value}" if outcome.bug else ""
    print(f"outcome: {outcome.kind.value}{bug} at t={outcome.final_time:.6g} "
          f"after {outcome.steps} steps")
    return 0


def _parse_records_csv(path: str):
    rows = open(path, encoding="utf-8").read().splitlines()
    records = []
    for line in rows[1:]:
        head, params_json = line.split(',"', 1)
        (method, problem, trial, checkpoint, spent, best, fifth,
         tenth) = head.split(",")
        params = json.loads(params_json.rstrip('"'))
        records.append(protocol.ExperimentRecord(
            method=method, problem=problem, trial=int(trial),
            checkpoint=int(checkpoint), spent=int(spent),
            best_score=float(best), fifth_score=float(fifth),
            tenth_score=float(tenth),
            best_params=tuple(params) if params else None))
    return records


def _parse_validation_csv(path: str):
    rows = open(path, encoding="utf-8").read().splitlines()
    out = []
    for line in rows[1:]:
        head, params_json = line.split(',"', 1)
        method, problem, trial, rank, score, runs = head.split(",")
        out.append(protocol.ValidationRecord(
            method=method, problem=problem, trial=int(trial), rank=int(rank),
            params=tuple(json.loads(params_json.rstrip('"'))),
            score=float(score), runs=int(runs)))
    return out


def cmd_report(args) -> int:
    records = _parse_records_csv(args.records)
    validation_path = args.validation or os.path.join(
        os.path.dirname(args.records), "validation.csv")
    validations = (_parse_validation_csv(validation_path)
                   if os.path.exists(validation_path) else [])
    out = args.out or os.path.dirname(args.records) or "."
    report.emit_reports(records, validations, out)
    print(f"re-emitted reports into {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bugamp",
        description="Amplify seeded concurrency bugs in a virtual-time "
                    "simulator with four black-box search strategies.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiment matrix")
    run.add_argument("--problems", help="comma-separated names or 'all'")
    run.add_argument("--methods", help=f"subset of {','.join(METHODS)}")
    run.add_argument("--budget", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--noise", type=float,
                     help="distortion amplitude as a fraction of the speed "
                          "coefficient (default: per-problem)")
    run.add_argument("--validation-runs", dest="validation_runs", type=int)
    run.add_argument("--out")
    run.add_argument("--profile", choices=sorted(PROFILES))
    run.add_argument("--config", help="key=value or JSON config file")
    run.add_argument("--jobs", type=int, help="worker processes")
    run.set_defaults(func=cmd_run)

    describe = sub.add_parser("describe", help="print a problem manifest")
    describe.add_argument("problem")
    describe.add_argument("--json", action="store_true")
    describe.set_defaults(func=cmd_describe)

    trace = sub.add_parser("trace", help="dump one trial's event trace")
    trace.add_argument("problem")
    trace.add_argument("--params", required=True,
                       help="comma-separated parameter vector")
    trace.add_argument("--seed", type=int, default=0)
    trace.add_argument("--noise", type=float, default=None)
    trace.set_defaults(func=cmd_trace)

    rep = sub.add_parser("report", help="re-emit reports from records")
    rep.add_argument("--records", required=True)
    rep.add_argument("--validation")
    rep.add_argument("--out")
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UnknownProblem, BoundsViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BugampError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
