"""Benchmark problem descriptors and their taxonomy labels."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from types import SimpleNamespace
from typing import Callable, Optional

from ..sim.scheduler import TrialOutcome


class Effect(enum.Enum):
    DEADLOCK = "Deadlock"
    UNEXPECTED_DATA = "UnexpectedData"
    CONCURRENT_ACCESS = "ConcurrentAccess"


class RootCause(enum.Enum):
    MISSING_WEAK_GUARD = "MissingWeakGuard"
    NON_ATOMIC_OP = "NonAtomicOp"
    INCORRECT_ORDERING = "IncorrectOrdering"
    MISUSE_OF_PRIMITIVES = "MisuseOfPrimitives"


DEFAULT_NOISE_FACTOR = 0.1
DEFAULT_STEP_CAP = 10_000


@dataclass(frozen=True)
class ProblemSpec:
    """One seeded concurrency bug: thread programs, shared-state initializer,
    invariant, parameter space, taxonomy cell, and hand-verified witnesses.

    Immutable after construction; a fresh store and fresh generators are
    created per trial, so specs are safe to share across parallel trials.
    """

    name: str
    dim: int
    bounds: tuple[tuple[float, float], ...]
    init: Callable[[], SimpleNamespace]
    threads: tuple[Callable, ...]
    invariant: Optional[Callable[[SimpleNamespace], bool]]
    effects: frozenset[Effect]
    root_cause: RootCause
    bug_witness: tuple[float, ...]
    pass_witness: tuple[float, ...]
    insight: str
    noise_factor: float = DEFAULT_NOISE_FACTOR
    horizon_is_failure: bool = field(default=False)

    def __post_init__(self):
        if len(self.bounds) != self.dim:
            raise ValueError(f"{self.name}: bounds/dim mismatch")
        if len(self.bug_witness) != self.dim or len(self.pass_witness) != self.dim:
            raise ValueError(f"{self.name}: witness/dim mismatch")

    def is_failure(self, outcome: TrialOutcome) -> bool:
        """Classify a trial outcome as bug or no-bug.  Hitting the step cap
        counts as non-failure unless the problem overrides it."""
        if outcome.is_bug:
            return True
        from ..sim.scheduler import OutcomeKind
        return self.horizon_is_failure and outcome.kind is OutcomeKind.HORIZON

    def manifest(self) -> dict:
        """JSON-ready description consumed by the CLI and docs."""
        return {
            "name": self.name,
            "dim": self.dim,
            "bounds": [list(b) for b in self.bounds],
            "effects": sorted(e.value for e in self.effects),
            "root_cause": self.root_cause.value,
            "bug_witness": list(self.bug_witness),
            "pass_witness": list(self.pass_witness),
            "insight": self.insight,
            "noise_factor": self.noise_factor,
        }

    def manifest_json(self) -> str:
        return json.dumps(self.manifest(), indent=2, sort_keys=True)
