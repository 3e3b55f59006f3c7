"""Baseline: uniform-random candidates, each scored by repeated execution."""

from __future__ import annotations

import numpy as np

from ..params import uniform_in_bounds
from ..rng import derive_seed
from .budget import (BudgetLedger, CandidateEvaluation, Executor, SearchRun,
                     estimate_score)

DEFAULT_REPEATS = 30


class BruteForceRun(SearchRun):
    """Ranking counts only fully scored candidates: floor(count / k) of
    them exist after `count` executions."""

    def __init__(self, method, executor, budget, k, candidates):
        super().__init__(method, executor, budget)
        self.k = k
        self.candidates = candidates

    def ranking_at(self, count: int) -> list[tuple[tuple, float]]:
        complete = self.candidates[: count // self.k]
        ranked = [(c.params, c.score) for c in complete]
        ranked.sort(key=lambda pair: -pair[1])
        return ranked


def brute_force(problem, budget: int, run_seed: int, k: int = DEFAULT_REPEATS,
                noise_factor=None) -> BruteForceRun:
    """Score floor(budget/k) random vectors with k runs each; rank by
    estimated failure frequency, ties by generation order."""
    if budget < k:
        raise ValueError(f"budget {budget} below one evaluation of k={k}")
    ledger = BudgetLedger(budget)
    executor = Executor(problem, ledger, run_seed, noise_factor)
    rng = np.random.default_rng(derive_seed(run_seed, "bf-sample"))
    candidates: list[CandidateEvaluation] = []
    for _ in range(budget // k):
        vec = tuple(uniform_in_bounds(rng, problem.bounds))
        candidates.append(estimate_score(executor, vec, k))
    return BruteForceRun("bf", executor, budget, k, candidates)
