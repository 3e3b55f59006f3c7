"""Deterministic virtual-time scheduler for generator-modeled threads.

The scheduler repeatedly steps the runnable thread with the lowest wake
time (ties to the lowest index), applies the yielded event, and evaluates
the problem invariant.  Time is purely logical: delays advance a clock,
nothing ever sleeps.  Two runs with the same (problem, params, seed,
step cap) produce identical outcomes and identical traces.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from ..errors import BoundsViolation, MalformedProgram, NoRunnable
from ..params import check_bounds
from ..rng import NoiseSource
from .events import Acquire, TraceEvent, Wait

_INF = math.inf


class OutcomeKind(enum.Enum):
    PASS = "pass"
    BUG = "bug"
    HORIZON = "horizon"


class BugKind(enum.Enum):
    ASSERTION = "assertion"
    INVARIANT = "invariant"
    DEADLOCK = "deadlock"


@dataclass(frozen=True)
class TrialOutcome:
    kind: OutcomeKind
    bug: Optional[BugKind]
    final_time: float
    steps: int
    trace: tuple[TraceEvent, ...] = ()

    @property
    def is_bug(self) -> bool:
        return self.kind is OutcomeKind.BUG


@dataclass
class SchedulerState:
    """Book-keeping for one trial.

    A thread is in exactly one of three states: runnable (finite wake time,
    no blocking record), blocked (on a lock or condition variable), or done
    (infinite wake time).
    """

    n_threads: int
    now: float = 0.0
    steps_taken: int = 0
    wake: list[float] = field(default_factory=list)
    finished: list[bool] = field(default_factory=list)
    # thread -> lock/cv it is blocked on
    blocked_lock: dict[int, str] = field(default_factory=dict)
    blocked_cv: dict[int, str] = field(default_factory=dict)
    # lock -> owning thread (absent/None means free)
    lock_owner: dict[str, int] = field(default_factory=dict)
    # lock -> [(block_time, thread)] waiting to acquire
    lock_queue: dict[str, list[tuple[float, int]]] = field(default_factory=dict)
    # cv -> [(wait_time, thread)] currently waiting
    cv_queue: dict[str, list[tuple[float, int]]] = field(default_factory=dict)
    # thread -> lock to re-acquire when its wait is notified
    reacquire: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.wake:
            self.wake = [0.0] * self.n_threads
        if not self.finished:
            self.finished = [False] * self.n_threads

    def is_blocked(self, t: int) -> bool:
        return t in self.blocked_lock or t in self.blocked_cv

    def runnable(self) -> list[int]:
        return [
            t for t in range(self.n_threads)
            if not self.finished[t] and not self.is_blocked(t)
        ]

    def counts(self) -> tuple[int, int, int]:
        """(runnable, blocked, done) thread counts."""
        r = len(self.runnable())
        d = sum(self.finished)
        b = self.n_threads - r - d
        return r, b, d


def next_runnable(state: SchedulerState) -> int:
    """The runnable thread with minimal wake time; ties to lowest index."""
    best = -1
    best_wake = _INF
    for t in range(state.n_threads):
        if state.finished[t] or state.is_blocked(t):
            continue
        w = state.wake[t]
        if w < best_wake:
            best, best_wake = t, w
    if best < 0:
        raise NoRunnable("no runnable thread")
    return best


def _grant_next(state: SchedulerState, lock: str) -> Optional[int]:
    """Hand a freed lock to its longest-blocked waiter (ties by index)."""
    queue = state.lock_queue.get(lock)
    if not queue:
        state.lock_owner.pop(lock, None)
        return None
    i = min(range(len(queue)), key=lambda j: queue[j])
    _, t = queue.pop(i)
    state.lock_owner[lock] = t
    del state.blocked_lock[t]
    state.wake[t] = state.now
    return t


def _release(state: SchedulerState, thread: int, lock: str,
             trace: Optional[list], step: int) -> None:
    if state.lock_owner.get(lock) != thread:
        raise MalformedProgram(
            f"thread {thread} released lock {lock!r} it does not own")
    granted = _grant_next(state, lock)
    if trace is not None:
        detail = f"{lock}:free" if granted is None else f"{lock}:to=T{granted}"
        trace.append(TraceEvent(step, state.now, thread, "release", detail))


def _block_on_lock(state: SchedulerState, thread: int, lock: str) -> None:
    state.blocked_lock[thread] = lock
    state.lock_queue.setdefault(lock, []).append((state.now, thread))


def _notify(state: SchedulerState, thread: int, cv: str, wake_all: bool,
            trace: Optional[list], step: int) -> None:
    """Wake waiter(s).  With no waiters the signal is lost (state unchanged).
    Woken waiters move to their lock's queue, or run immediately if their
    wait held no lock."""
    queue = state.cv_queue.get(cv, [])
    woken = 0
    while queue:
        i = min(range(len(queue)), key=lambda j: queue[j])
        _, t = queue.pop(i)
        del state.blocked_cv[t]
        woken += 1
        lock = state.reacquire.pop(t, None)
        if lock is None:
            state.wake[t] = state.now
        elif lock not in state.lock_owner:
            state.lock_owner[lock] = t
            state.wake[t] = state.now
        else:
            _block_on_lock(state, t, lock)
        if not wake_all:
            break
    if trace is not None:
        trace.append(TraceEvent(step, state.now, thread, "notify",
                                f"{cv}:woke={woken}"))


def apply_yield(state: SchedulerState, thread: int, event,
                trace: Optional[list] = None, step: int = -1) -> None:
    """Apply one yielded event for the thread just stepped.

    Numbers are delays (negative values clamp to zero).  Acquiring a free
    lock keeps the thread runnable at the current time; acquiring a held
    lock blocks it, including the lock it already owns, which blocks it
    forever.  Waits release their held lock and park on the condition
    variable.  `None` marks the thread done.
    """
    if isinstance(event, (int, float)):
        amt = float(event)
        clamped = amt < 0
        if clamped:
            amt = 0.0
        if math.isinf(amt) or math.isnan(amt):
            raise MalformedProgram(f"thread {thread} yielded delay {event!r}")
        state.wake[thread] = state.now + amt
        if trace is not None:
            detail = f"{amt:.9g}" + (" (clamped)" if clamped else "")
            trace.append(TraceEvent(step, state.now, thread, "delay", detail))
    elif isinstance(event, Acquire):
        lock = event.lock
        owner = state.lock_owner.get(lock)
        if owner is None:
            state.lock_owner[lock] = thread
            state.wake[thread] = state.now
            detail = f"{lock}:granted"
        else:
            # owner == thread models non-reentrant self-deadlock
            _block_on_lock(state, thread, lock)
            detail = f"{lock}:blocked"
        if trace is not None:
            trace.append(TraceEvent(step, state.now, thread, "acquire", detail))
    elif isinstance(event, Wait):
        if event.lock is not None:
            _release(state, thread, event.lock, None, step)
        state.blocked_cv[thread] = event.cv
        state.cv_queue.setdefault(event.cv, []).append((state.now, thread))
        if event.lock is not None:
            state.reacquire[thread] = event.lock
        if trace is not None:
            detail = event.cv if event.lock is None else f"{event.cv}-{event.lock}"
            trace.append(TraceEvent(step, state.now, thread, "wait", detail))
    elif event is None:
        state.finished[thread] = True
        state.wake[thread] = _INF
        if trace is not None:
            trace.append(TraceEvent(step, state.now, thread, "done", ""))
    else:
        raise MalformedProgram(
            f"thread {thread} yielded unsupported event {event!r}")


class ThreadContext:
    """What a thread program sees: shared state, parameterized delays, and
    immediate synchronization side effects."""

    __slots__ = ("store", "_params", "_noise", "_amp", "_state",
                 "_trace", "_self_step", "_self_thread")

    def __init__(self, store, params, noise: NoiseSource, noise_amplitude: float,
                 state: SchedulerState, trace: Optional[list]):
        self.store = store
        self._params = params
        self._noise = noise
        self._amp = noise_amplitude
        self._state = state
        self._trace = trace
        self._self_step = 0    # current step index, kept fresh by the loop
        self._self_thread = 0  # thread being stepped right now

    def d(self, i: int) -> float:
        """Delay for parameter site i: speed coefficient times the site's
        nominal delay, plus one noise draw."""
        p = self._params
        return p[0] * p[i] + self._noise.uniform(self._amp)

    def nominal(self, i: int) -> float:
        """Noise-free duration for site i, e.g. for deadline arithmetic."""
        p = self._params
        return p[0] * p[i]

    def now(self) -> float:
        return self._state.now

    def release(self, lock: str) -> None:
        _release(self._state, self._self_thread, lock, self._trace,
                 self._self_step)

    def notify(self, cv: str) -> None:
        _notify(self._state, self._self_thread, cv, False, self._trace,
                self._self_step)

    def notify_all(self, cv: str) -> None:
        _notify(self._state, self._self_thread, cv, True, self._trace,
                self._self_step)


def simulate_trial(problem, params, seed: int, step_cap: int = 10_000,
                   noise_factor: Optional[float] = None,
                   record_trace: bool = False,
                   on_step: Optional[Callable[[SchedulerState], None]] = None,
                   ) -> TrialOutcome:
    """Run one simulated execution of a benchmark problem.

    Returns the first bug encountered (assertion, invariant violation, or
    deadlock), Pass if every thread finishes, or HorizonExceeded at the
    step cap.  `noise_factor` scales the distortion amplitude relative to
    the speed coefficient; None uses the problem default.
    """
    if step_cap < 1:
        raise ValueError("step_cap must be >= 1")
    values = tuple(params.values) if hasattr(params, "values") else tuple(params)
    check_bounds(values, problem.bounds)
    factor = problem.noise_factor if noise_factor is None else noise_factor
    if factor < 0:
        raise ValueError("noise_factor must be nonnegative")

    store = problem.init()
    state = SchedulerState(n_threads=len(problem.threads))
    trace: Optional[list[TraceEvent]] = [] if record_trace else None
    noise = NoiseSource(seed)
    ctx = ThreadContext(store, values, noise, factor * values[0], state, trace)
    gens = [program(ctx) for program in problem.threads]

    def finish(kind, bug):
        rows = tuple(trace) if trace is not None else ()
        return TrialOutcome(kind, bug, state.now, state.steps_taken, rows)

    while True:
        alive = [t for t in range(state.n_threads) if not state.finished[t]]
        if not alive:
            return finish(OutcomeKind.PASS, None)
        runnable = [t for t in alive if not state.is_blocked(t)]
        if not runnable:
            return finish(OutcomeKind.BUG, BugKind.DEADLOCK)
        if state.steps_taken >= step_cap:
            return finish(OutcomeKind.HORIZON, None)

        t = min(runnable, key=lambda i: (state.wake[i], i))
        state.now = state.wake[t]
        step = state.steps_taken
        ctx._self_step = step
        ctx._self_thread = t
        try:
            event = next(gens[t])
        except StopIteration:
            event = None
        except AssertionError:
            state.steps_taken += 1
            if trace is not None:
                trace.append(TraceEvent(step, state.now, t, "assert", ""))
            return finish(OutcomeKind.BUG, BugKind.ASSERTION)
        apply_yield(state, t, event, trace, step)
        state.steps_taken += 1
        if on_step is not None:
            on_step(state)
        if problem.invariant is not None and not problem.invariant(store):
            if trace is not None:
                trace.append(TraceEvent(step, state.now, t, "invariant", ""))
            return finish(OutcomeKind.BUG, BugKind.INVARIANT)


def trace_to_csv(trace: Iterable[TraceEvent]) -> str:
    """Render a trace as `step,time,thread,kind,detail` CSV lines."""
    lines = ["step,time,thread,kind,detail"]
    lines.extend(ev.as_csv_row() for ev in trace)
    return "\n".join(lines) + "\n"
