"""Model-guided search: explore randomly, learn where failures live,
exploit the model's ranking, retrain, repeat.

Every iteration executes 100 fresh random inputs and the 100 highest
model-ranked inputs from a large unexecuted candidate pool, each exactly
once.  The stacked classifier refits on the whole labeled history (after
minority oversampling) at the start of every iteration.  Rankings are
snapshotted at each refit so checkpoint analysis can replay them without
pausing the run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SingleClassData
from ..params import uniform_in_bounds
from ..rng import derive_seed
from ..search.budget import BudgetLedger, CandidateEvaluation, Executor, SearchRun
from ..sim.scheduler import simulate_trial
from .sampling import smote_oversample
from .stack import StackedModel


@dataclass(frozen=True)
class EnsConfig:
    bootstrap: int = 200
    explore_per_iter: int = 100
    exploit_per_iter: int = 100
    pool_size: int = 10_000
    smote: bool = True
    smote_neighbors: int = 5
    passthrough: bool = True


class EnsRun(SearchRun):
    """Adds model-probability snapshots to the execution log.  Rankings at
    a checkpoint use the latest snapshot taken at or before it; before the
    first refit, observed labels order the candidates."""

    def __init__(self, executor, budget, snapshots, sources, iterations):
        super().__init__("ens", executor, budget)
        self.snapshots = snapshots          # [(exec_count, probs ndarray)]
        self.sources = sources              # per-execution "random"/"ranked"
        self.iterations = iterations        # per-execution iteration id

    def _snapshot_for(self, count: int):
        chosen = None
        for c, probs in self.snapshots:
            if c <= count:
                chosen = (c, probs)
            else:
                break
        return chosen

    def ranking_at(self, count: int) -> list[tuple[tuple, float]]:
        count = min(count, len(self.log))
        snap = self._snapshot_for(count)
        if snap is None:
            ranked = [(rec.params, float(rec.hit)) for rec in self.log[:count]]
            ranked.sort(key=lambda pair: -pair[1])
            return ranked
        c, probs = snap
        ranked = [(rec.params, float(probs[i]))
                  for i, rec in enumerate(self.log[:c])]
        ranked.sort(key=lambda pair: -pair[1])
        return ranked

    def dataset_rows(self):
        """Debug dump: one (iteration, source, params, label) per execution."""
        for rec, src, it in zip(self.log, self.sources, self.iterations):
            yield it, src, rec.params, int(rec.hit)


def _fit_model(X_rows, labels, cfg: EnsConfig, seed: int,
               rng: np.random.Generator):
    X = np.asarray(X_rows, dtype=float)
    y = np.asarray(labels, dtype=int)
    if y.min() == y.max():
        raise SingleClassData("need both outcomes to fit")
    if cfg.smote:
        X, y = smote_oversample(X, y, rng, cfg.smote_neighbors)
    return StackedModel(seed=seed, passthrough=cfg.passthrough).fit(X, y)


def _exploit_batch(model, bounds, executed_keys, n, pool_size,
                   rng: np.random.Generator) -> list[tuple]:
    """Top-n unexecuted pool candidates by model probability."""
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    pool = lo + rng.random((pool_size, len(bounds))) * (hi - lo)
    keep = [i for i in range(pool_size)
            if tuple(round(v, 12) for v in pool[i]) not in executed_keys]
    pool = pool[keep]
    probs = model.predict_proba(pool)
    order = np.argsort(-probs, kind="mergesort")[:n]
    return [tuple(pool[i]) for i in order]


def ens_search(problem, budget: int, run_seed: int,
               cfg: EnsConfig = EnsConfig(), noise_factor=None) -> EnsRun:
    """Model-guided amplification under an exact execution budget."""
    per_iter = cfg.explore_per_iter + cfg.exploit_per_iter
    if budget < per_iter:
        raise ValueError(f"budget {budget} below one iteration of {per_iter}")
    ledger = BudgetLedger(budget)
    executor = Executor(problem, ledger, run_seed, noise_factor)
    rng = np.random.default_rng(derive_seed(run_seed, "ens-sample"))
    bounds = problem.bounds

    rows: list[tuple] = []
    labels: list[int] = []
    sources: list[str] = []
    iterations: list[int] = []
    executed_keys: set = set()
    snapshots: list[tuple[int, np.ndarray]] = []

    def execute(vec: tuple, source: str, iteration: int) -> None:
        hit = executor.run_one(vec)
        rows.append(vec)
        labels.append(int(hit))
        sources.append(source)
        iterations.append(iteration)
        executed_keys.add(tuple(round(v, 12) for v in vec))

    def refit(iteration: int):
        try:
            model = _fit_model(rows, labels, cfg,
                               derive_seed(run_seed, "model", iteration), rng)
        except SingleClassData:
            return None
        snapshots.append((len(rows),
                          np.asarray(model.predict_proba(np.asarray(rows)))))
        return model

    def run_batch(model, iteration: int, n_explore: int, n_exploit: int):
        for _ in range(n_explore):
            execute(tuple(uniform_in_bounds(rng, bounds)), "random", iteration)
        if n_exploit <= 0:
            return
        if model is None:
            for _ in range(n_exploit):
                execute(tuple(uniform_in_bounds(rng, bounds)), "random",
                        iteration)
        else:
            picks = _exploit_batch(model, bounds, executed_keys, n_exploit,
                                   cfg.pool_size, rng)
            for vec in picks:
                execute(vec, "ranked", iteration)

    iteration = 0
    for _ in range(cfg.bootstrap):
        execute(tuple(uniform_in_bounds(rng, bounds)), "random", iteration)

    while ledger.remaining >= per_iter:
        iteration += 1
        model = refit(iteration)
        run_batch(model, iteration, cfg.explore_per_iter, cfg.exploit_per_iter)

    remainder = ledger.remaining
    if remainder > 0:
        iteration += 1
        model = refit(iteration)
        run_batch(model, iteration, remainder // 2, remainder - remainder // 2)

    refit(iteration + 1)  # final ranking model over the complete history
    return EnsRun(executor, budget, snapshots, sources, iterations)


def final_validation(problem, candidates, runs: int, seed: int,
                     noise_factor=None) -> list[CandidateEvaluation]:
    """Re-estimate candidate failure probabilities with fresh seeds, far
    beyond the search budget.  Reporting only; never charged to a ledger."""
    if runs < 1:
        raise ValueError("validation runs must be >= 1")
    out = []
    for j, params in enumerate(candidates):
        vec = tuple(params)
        hits = 0
        seeds = []
        for i in range(runs):
            s = derive_seed(seed, "validate", j, i)
            outcome = simulate_trial(problem, vec, s,
                                     noise_factor=noise_factor)
            hits += problem.is_failure(outcome)
            seeds.append(s)
        out.append(CandidateEvaluation(vec, hits / runs, runs, seeds))
    return out
