"""Bounded real vectors of delay parameters: the search-space element.

A vector's first component is the global speed coefficient; the remaining
components are the per-site nominal delays a problem's threads consume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundsViolation, DimMismatch

Bounds = tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class ParamVector:
    """An ordered tuple of reals with per-dimension closed bounds."""

    values: tuple[float, ...]
    bounds: Bounds

    def __post_init__(self):
        if len(self.values) != len(self.bounds):
            raise DimMismatch(
                f"{len(self.values)} values vs {len(self.bounds)} bounds")
        for j, (v, (lo, hi)) in enumerate(zip(self.values, self.bounds)):
            if not (lo <= v <= hi):
                raise BoundsViolation(
                    f"component {j}: {v} outside [{lo}, {hi}]")

    @property
    def dim(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def check_bounds(values, bounds: Bounds) -> None:
    """Raise BoundsViolation unless lo_j <= v_j <= hi_j for all j."""
    if len(values) != len(bounds):
        raise BoundsViolation(
            f"expected {len(bounds)} components, got {len(values)}")
    for j, (v, (lo, hi)) in enumerate(zip(values, bounds)):
        if not (lo <= v <= hi):
            raise BoundsViolation(f"component {j}: {v} outside [{lo}, {hi}]")


def clamp(values: np.ndarray, bounds: Bounds) -> np.ndarray:
    """Project a vector onto the bounds box."""
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    return np.clip(values, lo, hi)


def uniform_in_bounds(rng: np.random.Generator, bounds: Bounds) -> np.ndarray:
    """Draw one vector uniformly from the bounds box."""
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    return lo + rng.random(len(bounds)) * (hi - lo)
