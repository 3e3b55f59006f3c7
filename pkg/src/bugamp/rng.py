"""Seed derivation and the deterministic noise stream used by the simulator.

Every random decision in the system flows from a single master seed through
`derive_seed`, which hashes an arbitrary component path (strings and ints)
into a 64-bit seed.  The hash is sha256-based, so the derivation is stable
across platforms and Python versions, unlike `hash()`.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(*components: int | str) -> int:
    """Map a component path to a 64-bit seed, stably across platforms."""
    h = hashlib.sha256()
    for part in components:
        if isinstance(part, bool) or not isinstance(part, (int, str)):
            raise TypeError(f"seed component must be int or str, got {part!r}")
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest()[:8], "big")


class NoiseSource:
    """A seeded uniform-draw stream owned by a single simulated trial.

    Identical seeds produce identical draw sequences on every platform
    (Mersenne Twister via `random.Random`, whose stream is guaranteed stable
    by the stdlib).  Each trial owns its own instance; streams are never
    shared between trials.
    """

    __slots__ = ("seed", "_rng")

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    def uniform(self, amplitude: float) -> float:
        """One draw uniform on [0, amplitude).  Always consumes exactly one
        underlying draw, even for amplitude 0, so call sequences stay aligned
        across parameterizations."""
        return self._rng.random() * amplitude


def distortion(noise: NoiseSource, amplitude: float) -> float:
    """Random delay perturbation: uniform on [0, amplitude), one draw."""
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    return noise.uniform(amplitude)
