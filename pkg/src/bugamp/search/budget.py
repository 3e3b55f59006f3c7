"""Execution budgeting and the shared bookkeeping all strategies emit.

Every simulator execution a strategy performs goes through an `Executor`,
which charges the ledger, derives a fresh seed per execution, audits
bounds, and logs the (params, outcome) pair.  Strategies return a
`SearchRun` that can reconstruct their candidate ranking as of any
execution count, which is how checkpoint snapshots are taken without
pausing the methods.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import BudgetExhausted
from ..params import check_bounds
from ..rng import derive_seed
from ..sim.scheduler import simulate_trial


@dataclass
class CandidateEvaluation:
    """A parameter vector with its estimated failure probability."""

    params: tuple[float, ...]
    score: float
    executions_spent: int
    seeds_used: list[int] = field(default_factory=list)


@dataclass
class BudgetLedger:
    limit: int
    spent: int = 0

    @property
    def remaining(self) -> int:
        return self.limit - self.spent

    def charge(self, n: int = 1) -> None:
        if self.spent + n > self.limit:
            raise BudgetExhausted(
                f"needs {n} executions, {self.remaining} remain of {self.limit}")
        self.spent += n


@dataclass
class ExecRecord:
    index: int                 # execution count after this run (1-based)
    params: tuple[float, ...]
    hit: bool
    seed: int


class Executor:
    """Runs the simulator against one problem under a ledger, logging every
    execution.  Seeds derive from (run seed, execution index), so repeated
    evaluations of the same vector see independent noise."""

    def __init__(self, problem, ledger: BudgetLedger, run_seed: int,
                 noise_factor=None, step_cap: int = 10_000):
        self.problem = problem
        self.ledger = ledger
        self.run_seed = run_seed
        self.noise_factor = noise_factor
        self.step_cap = step_cap
        self.log: list[ExecRecord] = []

    def run_one(self, params) -> bool:
        vec = tuple(params)
        check_bounds(vec, self.problem.bounds)
        self.ledger.charge(1)
        seed = derive_seed(self.run_seed, "exec", len(self.log))
        outcome = simulate_trial(self.problem, vec, seed,
                                 step_cap=self.step_cap,
                                 noise_factor=self.noise_factor)
        hit = self.problem.is_failure(outcome)
        self.log.append(ExecRecord(len(self.log) + 1, vec, hit, seed))
        return hit


def estimate_score(executor: Executor, params, k: int) -> CandidateEvaluation:
    """Estimate a vector's failure probability as the failure frequency
    over k executions with distinct derived seeds.  Charges k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if executor.ledger.remaining < k:
        raise BudgetExhausted(
            f"estimate needs {k}, {executor.ledger.remaining} remain")
    vec = tuple(params)
    hits = 0
    seeds = []
    for _ in range(k):
        hits += executor.run_one(vec)
        seeds.append(executor.log[-1].seed)
    return CandidateEvaluation(vec, hits / k, k, seeds)


def _key(params: tuple[float, ...]) -> tuple[float, ...]:
    """Pooling key for repeat executions of the same point."""
    return tuple(round(v, 12) for v in params)


def pooled_ranking(records: list[ExecRecord]) -> list[tuple[tuple, float]]:
    """Group executions by vector and rank by pooled failure frequency,
    ties broken by first execution (stable)."""
    stats: dict[tuple, list] = {}
    order: list[tuple] = []
    for rec in records:
        key = _key(rec.params)
        if key not in stats:
            stats[key] = [rec.params, 0, 0]
            order.append(key)
        entry = stats[key]
        entry[1] += rec.hit
        entry[2] += 1
    ranked = [(stats[k][0], stats[k][1] / stats[k][2]) for k in order]
    ranked.sort(key=lambda pair: -pair[1])  # stable: preserves first-seen order
    return ranked


class SearchRun:
    """The full record of one strategy run: every execution in order, plus
    the strategy's candidate ranking as of any execution count."""

    def __init__(self, method: str, executor: Executor, budget: int):
        self.method = method
        self.log = executor.log
        self.spent = executor.ledger.spent
        self.budget = budget

    def ranking_at(self, count: int) -> list[tuple[tuple, float]]:
        """Candidates ranked by estimated score using only the first
        `count` executions.  Default: pooled failure frequency."""
        return pooled_ranking(self.log[:count])

    def final_ranking(self) -> list[tuple[tuple, float]]:
        return self.ranking_at(self.spent)
