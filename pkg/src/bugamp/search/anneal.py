"""Annealing-style neighborhood search over the delay space.

Each step samples k points in a shrinking ball around the current center,
runs each once, and moves away from the non-triggering centroid while
steering toward the triggering one.  The sampling radius decays
geometrically, narrowing the search as it proceeds.
"""

from __future__ import annotations

import numpy as np

from ..params import clamp, uniform_in_bounds
from ..rng import derive_seed
from .budget import BudgetLedger, Executor, SearchRun

EPSILON_START = 0.1
EPSILON_END = 0.01


def sample_in_ball(rng: np.random.Generator, center: np.ndarray,
                   epsilon: float, bounds) -> np.ndarray:
    """Uniform draw from the Euclidean ball around `center`, clamped to the
    bounds box.  Direction is a normalized Gaussian; radius is
    epsilon * U^(1/dim), which makes the pre-clamp draw uniform in volume."""
    dim = len(center)
    direction = rng.standard_normal(dim)
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        direction = np.ones(dim)
        norm = float(np.linalg.norm(direction))
    radius = epsilon * rng.random() ** (1.0 / dim)
    return clamp(center + direction / norm * radius, bounds)


def sa_next_point(executor: Executor, u: np.ndarray, epsilon: float,
                  rng: np.random.Generator, k: int = 30) -> np.ndarray:
    """One neighborhood step: run k in-ball points once each, then move to
    (P + (2u - N)) / 2 where N and P are the centroids of the quiet and
    triggering samples.  If either class is empty, fall back to the first
    sampled point, which stays inside the ball."""
    bounds = executor.problem.bounds
    samples = []
    hits = []
    for _ in range(k):
        x = sample_in_ball(rng, u, epsilon, bounds)
        samples.append(x)
        hits.append(executor.run_one(tuple(x)))
    pos = [x for x, h in zip(samples, hits) if h]
    neg = [x for x, h in zip(samples, hits) if not h]
    if not pos or not neg:
        return samples[0]
    p_mean = np.mean(pos, axis=0)
    n_mean = np.mean(neg, axis=0)
    w_prime = 2.0 * u - n_mean
    return clamp((p_mean + w_prime) / 2.0, bounds)


def epsilon_schedule(steps: int, start: float = EPSILON_START,
                     end: float = EPSILON_END) -> list[float]:
    """Geometric decay from `start` to exactly `end` across `steps` values."""
    if steps <= 1:
        return [start] * max(steps, 0)
    ratio = (end / start) ** (1.0 / (steps - 1))
    return [start * ratio ** i for i in range(steps)]


def sa_search(problem, budget: int, run_seed: int, k: int = 30,
              epsilon0: float = EPSILON_START, noise_factor=None) -> SearchRun:
    """floor(budget/k) neighborhood steps from a uniform-random start.
    Every executed point is logged; the final ranking pools repeat points
    by failure frequency."""
    if budget < k:
        raise ValueError(f"budget {budget} below one step of k={k}")
    ledger = BudgetLedger(budget)
    executor = Executor(problem, ledger, run_seed, noise_factor)
    rng = np.random.default_rng(derive_seed(run_seed, "sa-sample"))
    steps = budget // k
    u = uniform_in_bounds(rng, problem.bounds)
    for eps in epsilon_schedule(steps, epsilon0, EPSILON_END):
        u = sa_next_point(executor, u, eps, rng, k)
    return SearchRun("sa", executor, budget)
