"""Registry of the 17 benchmark concurrency problems."""

from __future__ import annotations

from ..errors import UnknownProblem
from ..params import uniform_in_bounds
from ..rng import derive_seed
from ..sim.scheduler import simulate_trial
from .catalog import BUILDERS
from .spec import Effect, ProblemSpec, RootCause

PROBLEM_NAMES: tuple[str, ...] = tuple(sorted(BUILDERS))


def list_problems() -> list[str]:
    """All problem names in their stable (alphabetical) order."""
    return list(PROBLEM_NAMES)


def build_problem(name: str) -> ProblemSpec:
    try:
        builder = BUILDERS[name]
    except KeyError:
        raise UnknownProblem(
            f"unknown problem {name!r}; valid names: {', '.join(PROBLEM_NAMES)}"
        ) from None
    return builder()


def classify(name: str) -> tuple[frozenset[Effect], RootCause]:
    """The problem's effect set and root cause in the two-axis taxonomy."""
    spec = build_problem(name)
    return spec.effects, spec.root_cause


def taxonomy_cells() -> set[tuple[Effect, RootCause]]:
    """All (effect, root cause) cells covered by the registry."""
    cells = set()
    for name in PROBLEM_NAMES:
        effects, cause = classify(name)
        for e in effects:
            cells.add((e, cause))
    return cells


def random_failure_rate(spec: ProblemSpec, trials: int, seed: int,
                        noise_factor: float | None = None) -> float:
    """Empirical failure frequency under uniform-random in-bounds inputs
    with default noise.  Used by the bug-rarity calibration gate."""
    import numpy as np

    rng = np.random.default_rng(derive_seed(seed, "rarity", spec.name))
    failures = 0
    for i in range(trials):
        vec = tuple(uniform_in_bounds(rng, spec.bounds))
        outcome = simulate_trial(spec, vec, derive_seed(seed, spec.name, i),
                                 noise_factor=noise_factor)
        failures += spec.is_failure(outcome)
    return failures / trials


__all__ = [
    "Effect",
    "ProblemSpec",
    "RootCause",
    "PROBLEM_NAMES",
    "build_problem",
    "classify",
    "list_problems",
    "random_failure_rate",
    "taxonomy_cells",
]
