import numpy as np
import pytest

from bugamp.problems.spec import Effect, ProblemSpec, RootCause
from types import SimpleNamespace


def _spec(threads, init=None, invariant=None, dim=3, bounds=None,
          name="TestProblem"):
    return ProblemSpec(
        name=name,
        dim=dim,
        bounds=bounds or tuple((0.0, 1.0) for _ in range(dim)),
        init=init or (lambda: SimpleNamespace()),
        threads=tuple(threads),
        invariant=invariant,
        effects=frozenset({Effect.UNEXPECTED_DATA}),
        root_cause=RootCause.NON_ATOMIC_OP,
        bug_witness=tuple([1.0] + [0.0] * (dim - 1)),
        pass_witness=tuple([0.0] * dim),
        insight="test double",
        noise_factor=0.0,
    )


@pytest.fixture
def make_spec():
    return _spec


@pytest.fixture
def never_failing_spec():
    """One thread, two quick delays, always passes."""

    def quiet(ctx):
        yield ctx.d(1)
        yield ctx.d(2)

    return _spec([quiet], name="NeverFails")


@pytest.fixture
def threshold_spec():
    """Deterministic bug whenever the second parameter exceeds 0.7;
    noise-free, so search behavior is easy to predict.  The speed
    coefficient is pinned to 1 so nominal(1) reads the raw parameter."""

    def tripwire(ctx):
        yield ctx.d(1)
        assert ctx.nominal(1) <= 0.7, "region hit"

    spec = _spec([tripwire], name="Threshold", dim=2,
                 bounds=((1.0, 1.0), (0.0, 1.0)))
    return spec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
