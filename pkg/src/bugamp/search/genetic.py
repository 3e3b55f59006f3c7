"""Genetic algorithm over real-valued delay vectors.

Population of 50, tournament-of-4 selection, two-point crossover at 0.5,
uniform mutation of up to 10 components at 0.15, single-individual
elitism, and an early stop after 100 generations without improvement of
the best fitness.  Fitness is one binary execution per individual per
generation, which keeps the budget arithmetic exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimMismatch
from ..params import uniform_in_bounds
from ..rng import derive_seed
from .budget import BudgetLedger, Executor, SearchRun


@dataclass(frozen=True)
class GAConfig:
    population: int = 50
    crossover_prob: float = 0.5
    mutation_prob: float = 0.15
    mutation_points: int = 10
    tournament: int = 4
    elitism: int = 1
    stagnation_limit: int = 100


def two_point_crossover(a: np.ndarray, b: np.ndarray,
                        rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Swap the slice [p, q) between the parents, cuts chosen uniformly
    over 0 <= p < q <= dim."""
    if len(a) != len(b):
        raise DimMismatch(f"{len(a)} vs {len(b)}")
    dim = len(a)
    p, q = sorted(rng.choice(dim + 1, size=2, replace=False))
    child_a = a.copy()
    child_b = b.copy()
    child_a[p:q], child_b[p:q] = b[p:q].copy(), a[p:q].copy()
    return child_a, child_b


def uniform_npoint_mutation(x: np.ndarray, bounds, rng: np.random.Generator,
                            prob: float = 0.15, points: int = 10) -> np.ndarray:
    """With probability `prob`, resample min(points, dim) distinct
    components uniformly within their bounds; otherwise return x unchanged."""
    if rng.random() >= prob:
        return x
    dim = len(x)
    n = min(points, dim)
    idx = rng.choice(dim, size=n, replace=False)
    out = x.copy()
    for j in sorted(idx):
        lo, hi = bounds[j]
        out[j] = lo + rng.random() * (hi - lo)
    return out


def tournament_select(population: list[np.ndarray], fitness: list[float],
                      rng: np.random.Generator, size: int = 4) -> np.ndarray:
    """Sample `size` with replacement; return the fittest, ties to the
    lowest population index."""
    drawn = rng.integers(0, len(population), size=size)
    best = min(drawn, key=lambda i: (-fitness[i], i))
    return population[int(best)]


def ga_search(problem, budget: int, run_seed: int,
              config: GAConfig = GAConfig(), noise_factor=None) -> SearchRun:
    """Evolve floor(budget/population) generations, re-evaluating the whole
    population (elite included) each generation with one binary run per
    individual.  Stops early after `stagnation_limit` generations without
    best-fitness improvement, leaving the remainder unspent."""
    pop_size = config.population
    if budget < pop_size:
        raise ValueError(f"budget {budget} below one generation of {pop_size}")
    ledger = BudgetLedger(budget)
    executor = Executor(problem, ledger, run_seed, noise_factor)
    rng = np.random.default_rng(derive_seed(run_seed, "ga-sample"))
    bounds = problem.bounds

    population = [uniform_in_bounds(rng, bounds) for _ in range(pop_size)]
    generations = budget // pop_size
    best_ever = -1.0
    stagnant = 0

    for _ in range(generations):
        fitness = [1.0 if executor.run_one(tuple(ind)) else 0.0
                   for ind in population]
        gen_best = max(fitness)
        if gen_best > best_ever:
            best_ever = gen_best
            stagnant = 0
        else:
            stagnant += 1
            if stagnant >= config.stagnation_limit:
                break

        elite_idx = min(range(pop_size), key=lambda i: (-fitness[i], i))
        next_pop = [population[elite_idx].copy()]
        while len(next_pop) < pop_size:
            pa = tournament_select(population, fitness, rng, config.tournament)
            pb = tournament_select(population, fitness, rng, config.tournament)
            if rng.random() < config.crossover_prob:
                ca, cb = two_point_crossover(pa, pb, rng)
            else:
                ca, cb = pa.copy(), pb.copy()
            for child in (ca, cb):
                if len(next_pop) < pop_size:
                    next_pop.append(uniform_npoint_mutation(
                        child, bounds, rng, config.mutation_prob,
                        config.mutation_points))
        population = next_pop

    return SearchRun("ga", executor, budget)
