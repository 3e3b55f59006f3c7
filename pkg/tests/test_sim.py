"""Scheduler semantics: selection order, lock/condition behavior, noise,
and the replay/monotonicity/conservation properties."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bugamp.errors import MalformedProgram, NoRunnable, BoundsViolation
from bugamp.problems import PROBLEM_NAMES, build_problem
from bugamp.params import uniform_in_bounds
from bugamp.rng import NoiseSource, derive_seed, distortion
from bugamp.sim import (Acquire, Wait, OutcomeKind, BugKind, SchedulerState,
                        apply_yield, next_runnable, simulate_trial)

import numpy as np


def test_constant_delays_interleave_by_wake_time(make_spec):
    schedule = []

    def ticker(label, delay_site, n):
        def run(ctx):
            for _ in range(n):
                schedule.append((label, ctx.now()))
                yield ctx.d(delay_site)
        return run

    spec = make_spec([ticker("T0", 1, 4), ticker("T1", 2, 2)],
                     bounds=((1.0, 1.0), (1.0, 1.0), (3.0, 3.0)), dim=3)
    out = simulate_trial(spec, (1.0, 1.0, 3.0), seed=0, noise_factor=0.0)
    assert out.kind is OutcomeKind.PASS
    # both threads prime at t=0 (T0 first by index); then wake times rule
    assert schedule == [("T0", 0.0), ("T1", 0.0), ("T0", 1.0), ("T0", 2.0),
                        ("T0", 3.0), ("T1", 3.0)]


def test_tie_breaks_step_lowest_index_first(make_spec):
    order = []

    def t(label):
        def run(ctx):
            order.append(label)
            yield 0.5
        return run

    spec = make_spec([t("a"), t("b")], dim=1, bounds=((0.0, 1.0),))
    simulate_trial(spec, (0.5,), seed=0, noise_factor=0.0)
    assert order == ["a", "b"]


def test_next_runnable_minimum_and_ties():
    state = SchedulerState(n_threads=3)
    state.wake = [5.0, 3.0, 7.0]
    assert next_runnable(state) == 1
    state.wake = [2.0, 2.0, 9.0]
    assert next_runnable(state) == 0
    state.wake = [math.inf, 4.0, math.inf]
    state.finished = [True, False, True]
    assert next_runnable(state) == 1
    state.finished = [True, True, True]
    with pytest.raises(NoRunnable):
        next_runnable(state)


def test_acquire_free_lock_keeps_thread_runnable():
    state = SchedulerState(n_threads=2)
    state.now = 1.5
    apply_yield(state, 0, Acquire("m"))
    assert state.lock_owner["m"] == 0
    assert not state.is_blocked(0)
    assert state.wake[0] == 1.5


def test_acquire_held_lock_blocks_until_release():
    state = SchedulerState(n_threads=2)
    apply_yield(state, 0, Acquire("m"))
    apply_yield(state, 1, Acquire("m"))
    assert state.is_blocked(1)
    from bugamp.sim.scheduler import _release
    state.now = 2.0
    _release(state, 0, "m", None, 0)
    assert state.lock_owner["m"] == 1
    assert not state.is_blocked(1)
    assert state.wake[1] == 2.0


def test_self_reacquire_blocks_forever(make_spec):
    def greedy(ctx):
        yield Acquire("m")
        yield Acquire("m")

    spec = make_spec([greedy], dim=1, bounds=((0.0, 1.0),))
    out = simulate_trial(spec, (0.5,), seed=0, noise_factor=0.0)
    assert out.kind is OutcomeKind.BUG
    assert out.bug is BugKind.DEADLOCK


def test_release_without_ownership_is_malformed(make_spec):
    def rogue(ctx):
        yield 0.1
        ctx.release("m")

    spec = make_spec([rogue], dim=1, bounds=((0.0, 1.0),))
    with pytest.raises(MalformedProgram):
        simulate_trial(spec, (0.5,), seed=0, noise_factor=0.0)


def test_lost_signal_then_wait_blocks_forever(make_spec):
    def signaler(ctx):
        ctx.notify_all("cv")
        yield 0.1

    def waiter(ctx):
        yield 0.5
        yield Wait("cv")

    spec = make_spec([signaler, waiter], dim=1, bounds=((0.0, 1.0),))
    out = simulate_trial(spec, (0.0,), seed=0, noise_factor=0.0)
    assert out.kind is OutcomeKind.BUG
    assert out.bug is BugKind.DEADLOCK


def test_notify_with_no_waiters_changes_nothing_but_trace():
    state = SchedulerState(n_threads=2)
    state.now = 3.0
    before = (list(state.wake), dict(state.blocked_cv), dict(state.cv_queue))
    from bugamp.sim.scheduler import _notify
    trace = []
    _notify(state, 0, "cv", True, trace, 7)
    after = (list(state.wake), dict(state.blocked_cv), dict(state.cv_queue))
    assert before == after
    assert len(trace) == 1 and trace[0].detail == "cv:woke=0"


def test_monitor_wait_reacquires_lock_on_notify(make_spec):
    """Hand-traced monitor handoff: the waiter holds the lock again before
    resuming, and only after the notifier releases it."""
    events = []

    def consumer(ctx):
        yield 0.0
        yield Acquire("m")
        events.append(("consumer-acquired", ctx.now()))
        yield Wait("cv", "m")
        events.append(("consumer-woke", ctx.now()))
        ctx.release("m")

    def producer(ctx):
        yield 1.0
        yield Acquire("m")
        events.append(("producer-acquired", ctx.now()))
        ctx.notify_all("cv")
        yield 2.0
        events.append(("producer-releasing", ctx.now()))
        ctx.release("m")

    spec = make_spec([consumer, producer], dim=1, bounds=((0.0, 1.0),))
    out = simulate_trial(spec, (0.0,), seed=0, noise_factor=0.0)
    assert out.kind is OutcomeKind.PASS
    assert events == [("consumer-acquired", 0.0), ("producer-acquired", 1.0),
                      ("producer-releasing", 3.0), ("consumer-woke", 3.0)]


def test_notify_one_wakes_longest_waiter_first(make_spec):
    woken = []

    def waiter(label, start):
        def run(ctx):
            yield start
            yield Wait("cv")
            woken.append(label)
        return run

    def caller(ctx):
        yield 5.0
        ctx.notify("cv")
        yield 1.0
        ctx.notify("cv")
        yield 0.1

    spec = make_spec([waiter("late", 2.0), waiter("early", 1.0), caller],
                     dim=1, bounds=((0.0, 1.0),))
    out = simulate_trial(spec, (0.0,), seed=0, noise_factor=0.0)
    assert out.kind is OutcomeKind.PASS
    assert woken == ["early", "late"]


def test_negative_delay_clamped_to_zero(make_spec):
    def rewinder(ctx):
        yield -0.5
        yield 0.1

    spec = make_spec([rewinder], dim=1, bounds=((0.0, 1.0),))
    out = simulate_trial(spec, (0.0,), seed=0, noise_factor=0.0,
                         record_trace=True)
    assert out.kind is OutcomeKind.PASS
    assert out.final_time == pytest.approx(0.1)
    assert "(clamped)" in out.trace[0].detail


def test_bounds_violation_rejected():
    spec = build_problem("RaceToWait")
    bad = tuple(hi + 1.0 for _, hi in spec.bounds)
    with pytest.raises(BoundsViolation):
        simulate_trial(spec, bad, seed=0)


def test_horizon_exceeded_at_step_cap(make_spec):
    def forever(ctx):
        while True:
            yield 1.0

    spec = make_spec([forever], dim=1, bounds=((0.0, 1.0),))
    out = simulate_trial(spec, (0.0,), seed=0, noise_factor=0.0, step_cap=37)
    assert out.kind is OutcomeKind.HORIZON
    assert out.steps == 37


# --- distortion -------------------------------------------------------------

def test_distortion_zero_amplitude_is_zero():
    assert distortion(NoiseSource(1), 0.0) == 0.0


def test_distortion_deterministic_for_seed():
    a = [distortion(NoiseSource(99), 0.7) for _ in range(3)]
    b = [distortion(NoiseSource(99), 0.7) for _ in range(3)]
    assert a == b


def test_distortion_mean_approaches_half_amplitude():
    noise = NoiseSource(7)
    n = 100_000
    mean = sum(noise.uniform(1.0) for _ in range(n)) / n
    assert abs(mean - 0.5) < 0.01


def test_distortion_rejects_negative_amplitude():
    with pytest.raises(ValueError):
        distortion(NoiseSource(1), -1.0)


# --- whole-registry properties ----------------------------------------------

@settings(max_examples=25, deadline=None)
@given(name=st.sampled_from(PROBLEM_NAMES), seed=st.integers(0, 2**32),
       pick=st.integers(0, 2**32))
def test_replay_determinism(name, seed, pick):
    spec = build_problem(name)
    rng = np.random.default_rng(pick)
    vec = tuple(uniform_in_bounds(rng, spec.bounds))
    a = simulate_trial(spec, vec, seed, record_trace=True)
    b = simulate_trial(spec, vec, seed, record_trace=True)
    assert (a.kind, a.bug, a.final_time, a.steps) == \
        (b.kind, b.bug, b.final_time, b.steps)
    assert a.trace == b.trace


@settings(max_examples=15, deadline=None)
@given(name=st.sampled_from(PROBLEM_NAMES), seed=st.integers(0, 2**32))
def test_time_monotone_and_threads_conserved(name, seed):
    spec = build_problem(name)
    rng = np.random.default_rng(derive_seed(seed, "vec"))
    vec = tuple(uniform_in_bounds(rng, spec.bounds))
    last = [0.0]
    n = len(spec.threads)

    def check(state):
        assert state.now >= last[0]
        last[0] = state.now
        r, b, d = state.counts()
        assert r + b + d == n

    simulate_trial(spec, vec, seed, on_step=check)


@settings(max_examples=15, deadline=None)
@given(name=st.sampled_from(PROBLEM_NAMES), seed=st.integers(0, 2**32))
def test_deadlock_stable_under_larger_step_cap(name, seed):
    spec = build_problem(name)
    rng = np.random.default_rng(derive_seed(seed, "cap"))
    vec = tuple(uniform_in_bounds(rng, spec.bounds))
    out = simulate_trial(spec, vec, seed)
    if out.bug is BugKind.DEADLOCK:
        bigger = simulate_trial(spec, vec, seed, step_cap=50_000)
        assert bigger.bug is BugKind.DEADLOCK
        assert bigger.final_time == out.final_time
