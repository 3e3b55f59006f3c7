"""Experiment harness: budget schedule, repeated trials, checkpoint
snapshots, top-k extraction, and final validation under one accounting.

Checkpoints replay each method's cumulative execution log, so methods run
to completion and the analysis extracts their ranking as of each
checkpoint afterwards.  Per-checkpoint best scores are the running best of
the method's own estimates (monotone by construction); the expensive
fresh-seed validation happens once, on the final ranking's top candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .learn.amplifier import EnsConfig, ens_search, final_validation
from .problems import build_problem
from .rng import derive_seed
from .search.anneal import sa_search
from .search.brute import brute_force
from .search.genetic import GAConfig, ga_search

METHODS = ("bf", "sa", "ga", "ens")
TOP_RANKS = (1, 5, 10)
FULL_BUDGET = 3900
FULL_TRIALS = 50
DESK_BUDGET = 1300
DESK_TRIALS = 10
DEFAULT_VALIDATION_RUNS = 1000
DESK_VALIDATION_RUNS = 300


def checkpoint_schedule(budget: int) -> list[int]:
    """100, 300, 500, ... up to and always including the full budget."""
    if budget < 100:
        raise ValueError("budget must be at least 100")
    points = list(range(100, budget + 1, 200))
    if points[-1] != budget:
        points.append(budget)
    return points


@dataclass
class ExperimentRecord:
    method: str
    problem: str
    trial: int
    checkpoint: int
    spent: int
    best_score: float
    fifth_score: float          # NaN when fewer than 5 candidates ranked
    tenth_score: float
    best_params: tuple[float, ...] | None
    validated_best: float = math.nan    # final checkpoint only
    validated_fifth: float = math.nan
    validated_tenth: float = math.nan


@dataclass
class ValidationRecord:
    method: str
    problem: str
    trial: int
    rank: int
    params: tuple[float, ...]
    score: float
    runs: int


def top_k(ranking, k: int):
    """The k-th best candidate (1-indexed) or None when the ranking is
    shorter than k; downstream renders the absence as NaN."""
    if k < 1:
        raise ValueError("k is 1-indexed")
    if len(ranking) < k:
        return None
    return ranking[k - 1]


def run_trial_seed(master_seed: int, problem: str, method: str,
                   trial: int) -> int:
    return derive_seed(master_seed, problem, method, trial)


def _run_method(method: str, problem_spec, budget: int, seed: int,
                noise_factor):
    if method == "bf":
        return brute_force(problem_spec, budget, seed,
                           noise_factor=noise_factor)
    if method == "sa":
        return sa_search(problem_spec, budget, seed, noise_factor=noise_factor)
    if method == "ga":
        return ga_search(problem_spec, budget, seed, GAConfig(),
                         noise_factor=noise_factor)
    if method == "ens":
        return ens_search(problem_spec, budget, seed, EnsConfig(),
                          noise_factor=noise_factor)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def run_experiment(problem: str, method: str, budget: int = FULL_BUDGET,
                   trials: int = FULL_TRIALS, master_seed: int = 0,
                   checkpoints: Optional[list[int]] = None,
                   validation_runs: int = DEFAULT_VALIDATION_RUNS,
                   noise_factor: Optional[float] = None,
                   ) -> tuple[list[ExperimentRecord], list[ValidationRecord]]:
    """All trials of one (problem, method) pair: one record per
    (trial, checkpoint) plus the final-ranking validation records."""
    points = checkpoints or checkpoint_schedule(budget)
    records: list[ExperimentRecord] = []
    validations: list[ValidationRecord] = []
    for trial in range(trials):
        recs, vals = run_single_trial(
            problem, method, trial, budget, master_seed, points,
            validation_runs, noise_factor)
        records.extend(recs)
        validations.extend(vals)
    return records, validations


def run_single_trial(problem: str, method: str, trial: int, budget: int,
                     master_seed: int, checkpoints: list[int],
                     validation_runs: int, noise_factor=None,
                     ) -> tuple[list[ExperimentRecord], list[ValidationRecord]]:
    spec = build_problem(problem)
    seed = run_trial_seed(master_seed, problem, method, trial)
    run = _run_method(method, spec, budget, seed, noise_factor)

    records: list[ExperimentRecord] = []
    best_so_far = -math.inf
    best_params = None
    for point in checkpoints:
        ranking = run.ranking_at(point)
        head = top_k(ranking, 1)
        if head is not None and head[1] > best_so_far:
            best_so_far = head[1]
            best_params = head[0]
        fifth = top_k(ranking, 5)
        tenth = top_k(ranking, 10)
        records.append(ExperimentRecord(
            method=method, problem=problem, trial=trial, checkpoint=point,
            spent=min(run.spent, point),
            best_score=best_so_far if best_so_far > -math.inf else math.nan,
            fifth_score=fifth[1] if fifth else math.nan,
            tenth_score=tenth[1] if tenth else math.nan,
            best_params=best_params))

    final = run.final_ranking()
    validations: list[ValidationRecord] = []
    val_seed = derive_seed(master_seed, problem, method, trial, "validation")
    by_rank: dict[int, float] = {}
    for rank in TOP_RANKS:
        cand = top_k(final, rank)
        if cand is None:
            continue
        result = final_validation(spec, [cand[0]], validation_runs, val_seed + rank,
                                  noise_factor=noise_factor)[0]
        by_rank[rank] = result.score
        validations.append(ValidationRecord(
            method=method, problem=problem, trial=trial, rank=rank,
            params=cand[0], score=result.score, runs=validation_runs))
    last = records[-1]
    last.validated_best = by_rank.get(1, math.nan)
    last.validated_fifth = by_rank.get(5, math.nan)
    last.validated_tenth = by_rank.get(10, math.nan)
    return records, validations


@dataclass
class MatrixResult:
    records: list[ExperimentRecord] = field(default_factory=list)
    validations: list[ValidationRecord] = field(default_factory=list)


def _matrix_cell(args):
    problem, method, trial, budget, master_seed, points, validation_runs, nf = args
    return run_single_trial(problem, method, trial, budget, master_seed,
                            points, validation_runs, nf)


def run_matrix(problems: list[str], methods: list[str], budget: int,
               trials: int, master_seed: int,
               validation_runs: int = DEFAULT_VALIDATION_RUNS,
               noise_factor: Optional[float] = None,
               checkpoints: Optional[list[int]] = None,
               jobs: int = 1) -> MatrixResult:
    """The full cross product.  Trials are independent, so they fan out
    across processes; results merge in deterministic key order regardless
    of completion order."""
    points = checkpoints or checkpoint_schedule(budget)
    cells = [(p, m, t, budget, master_seed, points, validation_runs,
              noise_factor)
             for p in problems for m in methods for t in range(trials)]
    if jobs > 1 and len(cells) > 1:
        import multiprocessing as mp
        with mp.get_context("spawn").Pool(jobs) as pool:
            outputs = pool.map(_matrix_cell, cells, chunksize=1)
    else:
        outputs = [_matrix_cell(c) for c in cells]

    result = MatrixResult()
    for recs, vals in outputs:
        result.records.extend(recs)
        result.validations.extend(vals)
    result.records.sort(key=lambda r: (r.problem, r.method, r.trial,
                                       r.checkpoint))
    result.validations.sort(key=lambda v: (v.problem, v.method, v.trial,
                                           v.rank))
    return result
