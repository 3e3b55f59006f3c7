"""The seventeen seeded concurrency problems.

Each builder transcribes one buggy multithreaded scenario into generator
threads for the virtual-time scheduler.  Delay parameters: component 0 is
the global speed coefficient, the rest are per-site nominal delays; a
thread sleeps `ctx.d(i)` before each atomic action group.  Every problem
ships a zero-noise bug witness and pass witness, verified by the test
suite, plus bounds tuned so uniform-random inputs fail rarely.
"""

from __future__ import annotations

from types import SimpleNamespace

from ..sim.events import Acquire, Wait
from .spec import Effect, ProblemSpec, RootCause

UNIT = (0.0, 1.0)


def _ns(**kw) -> SimpleNamespace:
    return SimpleNamespace(**kw)


# --- lock-free data races ---------------------------------------------------

def build_atomicity_bypass() -> ProblemSpec:
    """Both workers guard a counter with a hand-rolled busy-wait flag, but
    drop the flag before writing back.  Lost increments surface as a final
    assert on the counter."""

    def init():
        return _ns(busy=False, counter=0, finished=0)

    def worker(off: int, gap: int):
        def run(ctx):
            s = ctx.store
            while True:
                yield ctx.d(off)
                if not s.busy:
                    break
            yield ctx.d(gap)
            s.busy = True
            yield ctx.d(gap)
            local = s.counter
            yield ctx.d(gap)
            s.busy = False          # unlock lands before the write-back
            yield ctx.d(gap)
            s.counter = local + 1
            s.finished += 1
            if s.finished == 2:
                assert s.counter == 2, "lost update"
        return run

    return ProblemSpec(
        name="AtomicityBypass",
        dim=5,
        bounds=(UNIT, UNIT, (0.0, 0.04), UNIT, (0.0, 0.04)),
        init=init,
        threads=(worker(1, 2), worker(3, 4)),
        invariant=None,
        effects=frozenset({Effect.UNEXPECTED_DATA}),
        root_cause=RootCause.MISUSE_OF_PRIMITIVES,
        bug_witness=(1.0, 0.40, 0.02, 0.41, 0.02),
        pass_witness=(1.0, 0.10, 0.02, 0.80, 0.02),
        insight="Using a lock-shaped flag is not using a lock: the guard "
                "must span the whole read-modify-write.",
    )


def build_racy_increment() -> ProblemSpec:
    """Two threads increment a shared counter non-atomically, then treat
    `a == 1` as an exclusive-entry ticket; interleaved read/write lets both
    threads claim it."""

    def init():
        return _ns(a=0, entered=0)

    def worker(off: int, gap: int):
        def run(ctx):
            s = ctx.store
            yield ctx.d(off)
            local = s.a
            yield ctx.d(gap)
            s.a = local + 1
            yield ctx.d(off)
            if s.a == 1:
                s.entered += 1
        return run

    return ProblemSpec(
        name="RacyIncrement",
        dim=5,
        bounds=(UNIT, UNIT, (0.0, 0.07), UNIT, (0.0, 0.07)),
        init=init,
        threads=(worker(1, 2), worker(3, 4)),
        invariant=lambda s: s.entered <= 1,
        effects=frozenset({Effect.UNEXPECTED_DATA, Effect.CONCURRENT_ACCESS}),
        root_cause=RootCause.NON_ATOMIC_OP,
        bug_witness=(1.0, 0.30, 0.05, 0.32, 0.05),
        pass_witness=(1.0, 0.10, 0.05, 0.50, 0.05),
        insight="Read-increment-write is three operations, not one; both "
                "threads can observe the same pre-increment value.",
    )


def build_delayed_write() -> ProblemSpec:
    """A writer repeatedly sets x, later verifies it kept its value; a second
    writer landing between the last write and the check trips the assert."""

    WRITES = 4

    def init():
        return _ns(x=0)

    def setter(ctx):
        s = ctx.store
        for _ in range(WRITES):
            yield ctx.d(1)
            s.x = 3
        yield ctx.d(2)
        if s.x != 3:
            yield ctx.d(3)
            assert s.x == 3, "stale value observed"

    def clobber(ctx):
        s = ctx.store
        yield ctx.d(4)
        s.x = 7

    return ProblemSpec(
        name="DelayedWrite",
        dim=5,
        bounds=(UNIT, (0.0, 0.25), (0.0, 0.3), UNIT, UNIT),
        init=init,
        threads=(setter, clobber),
        invariant=None,
        effects=frozenset({Effect.UNEXPECTED_DATA, Effect.CONCURRENT_ACCESS}),
        root_cause=RootCause.INCORRECT_ORDERING,
        bug_witness=(1.0, 0.10, 0.30, 0.10, 0.50),
        pass_witness=(1.0, 0.10, 0.30, 0.10, 0.95),
        insight="A value checked after a delay is a different value: nothing "
                "ordered the competing write before the verification.",
    )


def build_shared_counter() -> ProblemSpec:
    """Two dragons bump an unprotected counter and enter their lairs at
    magic values 5 and 3; racy increments let both lairs be occupied at
    once."""

    ROUNDS = 6

    def init():
        return _ns(counter=0, in_cs=0)

    def dragon(off: int, gap: int, dwell: int, magic: int):
        def run(ctx):
            s = ctx.store
            for _ in range(ROUNDS):
                yield ctx.d(off)
                local = s.counter
                yield ctx.d(gap)
                s.counter = local + 1
                yield ctx.d(off)
                if s.counter == magic:
                    s.in_cs += 1
                    yield ctx.d(dwell)
                    s.in_cs -= 1
        return run

    return ProblemSpec(
        name="SharedCounter",
        dim=6,
        bounds=(UNIT, UNIT, (0.0, 0.1), UNIT, (0.0, 0.1), UNIT),
        init=init,
        threads=(dragon(1, 2, 5, 5), dragon(3, 4, 5, 3)),
        invariant=lambda s: s.in_cs <= 1,
        effects=frozenset({Effect.UNEXPECTED_DATA, Effect.CONCURRENT_ACCESS}),
        root_cause=RootCause.NON_ATOMIC_OP,
        bug_witness=(1.0, 0.03, 0.07, 0.18, 0.09, 0.54),
        pass_witness=(1.0, 0.27, 0.004, 0.02, 0.08, 0.91),
        insight="Control flow keyed to exact counter values inherits every "
                "race the counter has.",
    )


def build_shared_flag() -> ProblemSpec:
    """A boolean flag stands in for a mutex.  The busy-wait check and the
    flag set are separate steps, so two armies can march in together."""

    ROUNDS = 1

    def init():
        return _ns(flag=False, in_cs=0)

    def army(off: int, gap: int):
        def run(ctx):
            s = ctx.store
            for _ in range(ROUNDS):
                while True:
                    yield ctx.d(off)
                    if not s.flag:
                        break
                yield ctx.d(gap)
                s.flag = True
                yield ctx.d(gap)
                s.in_cs += 1
                yield ctx.d(off)
                s.in_cs -= 1
                yield ctx.d(gap)
                s.flag = False
        return run

    return ProblemSpec(
        name="SharedFlag",
        dim=5,
        bounds=(UNIT, UNIT, (0.0, 0.05), UNIT, (0.0, 0.05)),
        init=init,
        threads=(army(1, 2), army(3, 4)),
        invariant=lambda s: s.in_cs <= 1,
        effects=frozenset({Effect.CONCURRENT_ACCESS}),
        root_cause=RootCause.MISSING_WEAK_GUARD,
        bug_witness=(1.0, 0.40, 0.03, 0.42, 0.03),
        pass_witness=(1.0, 0.10, 0.03, 0.60, 0.03),
        insight="Test-and-set must be atomic; a flag checked then set in two "
                "steps excludes nobody.",
    )


def build_broken_peterson() -> ProblemSpec:
    """Generalized Peterson entry protocol for four processes with the two
    level-registration writes swapped, so a rival can slip past the gate."""

    N = 4
    ROUNDS = 2

    def init():
        return _ns(levels=[-1] * N, last=[-1] * (N - 1), in_cs=0)

    def process(i: int, pace: int, dwell: int):
        def run(ctx):
            s = ctx.store
            for _ in range(ROUNDS):
                for level in range(i, N - 1):
                    yield ctx.d(pace)
                    s.last[level] = i          # written before the level claim
                    yield ctx.d(pace)
                    s.levels[i] = level
                    while True:
                        yield ctx.d(pace)
                        contended = any(
                            k != i and s.levels[k] >= level
                            for k in range(N)) and s.last[level] == i
                        if not contended:
                            break
                yield ctx.d(dwell)
                s.in_cs += 1
                yield ctx.d(dwell)
                s.in_cs -= 1
                yield ctx.d(pace)
                s.levels[i] = -1
        return run

    return ProblemSpec(
        name="BrokenPeterson",
        dim=6,
        bounds=(UNIT, UNIT, UNIT, UNIT, UNIT, (0.0, 0.05)),
        init=init,
        threads=tuple(process(i, i + 1, 5) for i in range(N)),
        invariant=lambda s: s.in_cs <= 1,
        effects=frozenset({Effect.CONCURRENT_ACCESS}),
        root_cause=RootCause.MISSING_WEAK_GUARD,
        bug_witness=(1.0, 0.60, 0.96, 0.07, 0.50, 0.04),
        pass_witness=(1.0, 0.27, 0.04, 0.02, 0.81, 0.05),
        insight="Entry protocols encode ordering assumptions; swapping two "
                "writes re-opens the door they were guarding.",
    )


# --- real locks -------------------------------------------------------------

def build_lock_order_inversion() -> ProblemSpec:
    """The textbook deadlock: two threads take the same two locks in
    opposite orders."""

    def init():
        return _ns()

    def t0(ctx):
        yield ctx.d(1)
        yield Acquire("first")
        yield ctx.d(2)
        yield Acquire("second")
        yield ctx.d(3)
        ctx.release("first")
        ctx.release("second")

    def t1(ctx):
        yield ctx.d(4)
        yield Acquire("second")
        yield ctx.d(5)
        yield Acquire("first")
        yield ctx.d(6)
        ctx.release("second")
        ctx.release("first")

    return ProblemSpec(
        name="LockOrderInversion",
        dim=7,
        bounds=(UNIT, UNIT, (0.0, 0.05), UNIT, UNIT, (0.0, 0.05), UNIT),
        init=init,
        threads=(t0, t1),
        invariant=None,
        effects=frozenset({Effect.DEADLOCK}),
        root_cause=RootCause.INCORRECT_ORDERING,
        bug_witness=(1.0, 0.20, 0.04, 0.10, 0.22, 0.04, 0.10),
        pass_witness=(1.0, 0.10, 0.02, 0.05, 0.60, 0.02, 0.05),
        insight="Without a global acquisition order, each thread can hold "
                "half of what the other needs.",
    )


def build_partial_lock() -> ProblemSpec:
    """Both threads lock correctly, but the +2 / -1 arithmetic they protect
    only stays off the poison value 5 for some acquisition orders."""

    ROUNDS = 3

    def init():
        return _ns(i=0)

    def adder(ctx):
        s = ctx.store
        for _ in range(ROUNDS):
            yield ctx.d(1)
            yield Acquire("m")
            yield ctx.d(1)
            s.i += 2
            yield ctx.d(2)
            if s.i == 5:
                assert False, "forbidden total"
            ctx.release("m")

    def subber(ctx):
        s = ctx.store
        for _ in range(ROUNDS):
            yield ctx.d(3)
            yield Acquire("m")
            yield ctx.d(3)
            s.i -= 1
            yield ctx.d(3)
            ctx.release("m")

    return ProblemSpec(
        name="PartialLock",
        dim=4,
        bounds=(UNIT, UNIT, UNIT, (0.35, 1.0)),
        init=init,
        threads=(adder, subber),
        invariant=None,
        effects=frozenset({Effect.UNEXPECTED_DATA}),
        root_cause=RootCause.MISSING_WEAK_GUARD,
        bug_witness=(1.0, 0.30, 0.10, 0.75),
        pass_witness=(1.0, 0.05, 0.05, 0.90),
        insight="Locks serialize sections but say nothing about the order of "
                "sections; the data can still reach states nobody intended.",
    )


def build_flagged_deadlock() -> ProblemSpec:
    """An over-engineered protocol of three mutexes, a probe of lock state,
    and a shared flag.  One path re-enters a held mutex and parks forever,
    stranding the peer."""

    ROUNDS = 2

    def init():
        return _ns(flag=False, mutex_busy=False)

    def t0(ctx):
        s = ctx.store
        for _ in range(ROUNDS):
            yield ctx.d(1)
            if not s.mutex_busy:       # try-enter probe, not an acquisition
                yield Acquire("m3")
                yield ctx.d(1)
                yield Acquire("m")
                s.mutex_busy = True
                yield ctx.d(2)
                s.mutex_busy = False
                ctx.release("m")
                yield ctx.d(1)
                yield Acquire("m2")
                s.flag = False
                yield ctx.d(1)
                ctx.release("m2")
                ctx.release("m3")
            else:
                yield Acquire("m2")
                s.flag = True
                yield ctx.d(1)
                ctx.release("m2")

    def t1(ctx):
        s = ctx.store
        for _ in range(ROUNDS):
            yield ctx.d(3)
            if s.flag:
                yield Acquire("m2")
                yield ctx.d(3)
                yield Acquire("m")
                s.mutex_busy = True
                s.flag = False
                yield ctx.d(4)
                s.mutex_busy = False
                ctx.release("m")
                yield ctx.d(3)
                yield Acquire("m2")    # already held: parks forever
                yield ctx.d(3)
                ctx.release("m2")
            else:
                yield Acquire("m")
                s.mutex_busy = True
                s.flag = False
                yield ctx.d(4)
                s.mutex_busy = False
                ctx.release("m")

    return ProblemSpec(
        name="FlaggedDeadlock",
        dim=5,
        bounds=(UNIT, UNIT, UNIT, UNIT, (0.0, 0.2)),
        init=init,
        threads=(t0, t1),
        invariant=None,
        effects=frozenset({Effect.DEADLOCK}),
        root_cause=RootCause.MISUSE_OF_PRIMITIVES,
        bug_witness=(1.0, 0.878, 0.102, 0.85, 0.079),
        pass_witness=(1.0, 0.05, 0.05, 0.90, 0.10),
        insight="Every extra lock path multiplies the interleavings to "
                "reason about; re-entering a held lock ends the reasoning.",
    )


# --- monitors and condition variables ----------------------------------------

def build_if_not_while() -> ProblemSpec:
    """Two consumers guard a monitor wait with `if` instead of `while`; a
    broadcast wakes both for a single item, driving the queue negative, and
    stragglers can sleep past the last enqueue."""

    CONSUME = 2
    PRODUCE = 5

    def init():
        return _ns(queue=0)

    def consumer(pace: int):
        def run(ctx):
            s = ctx.store
            for _ in range(CONSUME):
                yield ctx.d(pace)
                yield Acquire("m")
                yield ctx.d(pace)
                if s.queue == 0:
                    yield Wait("items", "m")   # woken holding m, no recheck
                yield ctx.d(pace)
                s.queue -= 1
                yield ctx.d(pace)
                ctx.release("m")
        return run

    def producer(ctx):
        s = ctx.store
        for _ in range(PRODUCE):
            yield ctx.d(3)
            yield Acquire("m")
            yield ctx.d(3)
            s.queue += 1
            ctx.notify_all("items")
            yield ctx.d(3)
            ctx.release("m")

    return ProblemSpec(
        name="IfNotWhile",
        dim=4,
        bounds=(UNIT, (0.3, 1.0), (0.3, 1.0), (0.0, 0.15)),
        init=init,
        threads=(consumer(1), consumer(2), producer),
        invariant=lambda s: s.queue >= 0,
        effects=frozenset({Effect.DEADLOCK, Effect.UNEXPECTED_DATA}),
        root_cause=RootCause.MISSING_WEAK_GUARD,
        bug_witness=(1.0, 0.338, 0.388, 0.136),
        pass_witness=(1.0, 0.80, 0.90, 0.05),
        insight="A wakeup is a hint, not a fact: conditions must be "
                "re-checked in a loop after every wait.",
    )


def build_lost_signal() -> ProblemSpec:
    """The waiter samples the flag once, then commits to waiting; a
    notification sent in the gap has nobody to wake and evaporates."""

    def init():
        return _ns(flag=False)

    def waiter(ctx):
        s = ctx.store
        yield ctx.d(1)
        seen = s.flag
        if not seen:
            yield ctx.d(2)
            yield Wait("go")
        yield ctx.d(1)

    def signaler(ctx):
        s = ctx.store
        yield ctx.d(3)
        s.flag = True
        yield ctx.d(4)
        ctx.notify_all("go")

    return ProblemSpec(
        name="LostSignal",
        dim=5,
        bounds=(UNIT, UNIT, UNIT, UNIT, UNIT),
        init=init,
        threads=(waiter, signaler),
        invariant=None,
        effects=frozenset({Effect.DEADLOCK}),
        root_cause=RootCause.MISSING_WEAK_GUARD,
        bug_witness=(1.0, 0.30, 0.30, 0.35, 0.05),
        pass_witness=(1.0, 0.50, 0.20, 0.10, 0.10),
        insight="Condition signals do not queue; a guard checked once "
                "before sleeping misses everything sent in between.",
    )


def build_signal_then_wait() -> ProblemSpec:
    """The waiter even uses a correct while-guard, but the signaler updates
    the flag and notifies before the wait is armed, and a blocked thread
    never gets to re-check anything."""

    def init():
        return _ns(flag=False, wait_blocked=False)

    def waiter(ctx):
        s = ctx.store
        while True:
            yield ctx.d(1)
            if s.flag:
                break
            yield ctx.d(2)
            s.wait_blocked = True
            yield ctx.d(2)
            yield Wait("cv")
        yield ctx.d(1)

    def signaler(ctx):
        s = ctx.store
        yield ctx.d(3)
        s.flag = True              # condition updated before anyone waits
        yield ctx.d(4)
        ctx.notify_all("cv")

    return ProblemSpec(
        name="SignalThenWait",
        dim=5,
        bounds=(UNIT, UNIT, (0.0, 0.3), UNIT, UNIT),
        init=init,
        threads=(waiter, signaler),
        invariant=None,
        effects=frozenset({Effect.DEADLOCK}),
        root_cause=RootCause.INCORRECT_ORDERING,
        bug_witness=(1.0, 0.30, 0.20, 0.35, 0.05),
        pass_witness=(1.0, 0.50, 0.10, 0.05, 0.05),
        insight="A while-guard cannot save a thread that is already asleep; "
                "signal only after the wait can observe it.",
    )


def build_sleeping_guard() -> ProblemSpec:
    """The consumer decides to sleep based on the queue, arms a waiting
    flag, then sleeps; the producer checks the flag too early and wakes
    nobody."""

    def init():
        return _ns(queue=0, waiting=False)

    def consumer(ctx):
        s = ctx.store
        yield ctx.d(1)
        if s.queue == 0:
            yield ctx.d(2)
            s.waiting = True
            yield ctx.d(2)
            yield Wait("wake")
        yield ctx.d(1)
        s.queue -= 1

    def producer(ctx):
        s = ctx.store
        yield ctx.d(3)
        s.queue += 1
        yield ctx.d(4)
        if s.waiting:
            s.waiting = False
            ctx.notify("wake")

    return ProblemSpec(
        name="SleepingGuard",
        dim=5,
        bounds=(UNIT, UNIT, (0.0, 0.3), UNIT, UNIT),
        init=init,
        threads=(consumer, producer),
        invariant=None,
        effects=frozenset({Effect.DEADLOCK}),
        root_cause=RootCause.MISSING_WEAK_GUARD,
        bug_witness=(1.0, 0.30, 0.30, 0.35, 0.05),
        pass_witness=(1.0, 0.60, 0.10, 0.05, 0.05),
        insight="Sleep decisions must be coupled to the shared state they "
                "depend on, not to a side-channel flag.",
    )


def build_race_to_wait() -> ProblemSpec:
    """Two threads rendezvous on a counter they increment non-atomically;
    if both read before either writes, both see 1, both wait, and the
    notifying count of 2 is never reached."""

    def init():
        return _ns(waiters=0)

    def party(off: int, gap: int):
        def run(ctx):
            s = ctx.store
            yield ctx.d(off)
            local = s.waiters
            yield ctx.d(gap)
            s.waiters = local + 1
            yield ctx.d(off)
            if s.waiters < 2:
                yield Wait("ready")
            else:
                ctx.notify_all("ready")
        return run

    return ProblemSpec(
        name="RaceToWait",
        dim=5,
        bounds=(UNIT, UNIT, (0.0, 0.07), UNIT, (0.0, 0.07)),
        init=init,
        threads=(party(1, 2), party(3, 4)),
        invariant=None,
        effects=frozenset({Effect.DEADLOCK}),
        root_cause=RootCause.NON_ATOMIC_OP,
        bug_witness=(1.0, 0.30, 0.05, 0.32, 0.05),
        pass_witness=(1.0, 0.20, 0.05, 0.60, 0.05),
        insight="Lock-free coordination still needs atomicity: a stale read "
                "before a rendezvous strands every participant.",
    )


# --- barriers and semaphores --------------------------------------------------

def build_broken_barrier() -> ProblemSpec:
    """Three threads share a two-party barrier; one signals twice per round
    and resets the charge counter early.  Pairings can strand a waiter or
    let the checker see an impossible charge."""

    ROUNDS = 1

    def init():
        return _ns(charge=0, arrived=0)

    def _arrive(ctx):
        s = ctx.store
        yield Acquire("bar_m")
        s.arrived += 1
        if s.arrived >= 2:
            s.arrived = 0
            ctx.notify_all("bar_cv")
            ctx.release("bar_m")
        else:
            yield Wait("bar_cv", "bar_m")
            ctx.release("bar_m")

    def checker(ctx):
        s = ctx.store
        for _ in range(ROUNDS):
            yield ctx.d(1)
            s.charge += 1
            yield ctx.d(1)
            yield from _arrive(ctx)
            yield ctx.d(2)
            if s.charge < 2:
                assert False, "fired with insufficient charge"

    def helper(ctx):
        s = ctx.store
        for _ in range(ROUNDS):
            yield ctx.d(3)
            s.charge += 1
            yield ctx.d(3)
            yield from _arrive(ctx)

    def resetter(ctx):
        s = ctx.store
        for _ in range(ROUNDS):
            yield ctx.d(4)
            s.charge += 1
            yield ctx.d(4)
            yield from _arrive(ctx)
            yield ctx.d(5)
            yield from _arrive(ctx)
            yield ctx.d(5)
            s.charge = 0

    return ProblemSpec(
        name="BrokenBarrier",
        dim=6,
        bounds=(UNIT, (0.15, 0.8), (0.0, 0.1), (0.4, 1.0), (0.0, 0.5), (0.0, 0.7)),
        init=init,
        threads=(checker, helper, resetter),
        invariant=None,
        effects=frozenset({Effect.DEADLOCK}),
        root_cause=RootCause.MISUSE_OF_PRIMITIVES,
        bug_witness=(1.0, 0.743, 0.071, 0.733, 0.462, 0.063),
        pass_witness=(1.0, 0.266, 0.08, 0.666, 0.028, 0.173),
        insight="A barrier's participant count is part of its contract; "
                "signaling twice from one thread rewires who waits for whom.",
    )


def build_phantom_permit() -> ProblemSpec:
    """A timed semaphore wait that releases on failure mints a permit from
    nothing, letting two holders into the critical section."""

    ROUNDS = 2

    def init():
        return _ns(permits=1, in_cs=0)

    def acquirer(pace: int, dwell: int):
        def run(ctx):
            s = ctx.store
            for _ in range(ROUNDS):
                while True:
                    yield ctx.d(pace)
                    if s.permits > 0:
                        s.permits -= 1
                        break
                yield ctx.d(dwell)
                s.in_cs += 1
                yield ctx.d(dwell)
                s.in_cs -= 1
                yield ctx.d(pace)
                s.permits += 1
        return run

    def timed_failer(ctx):
        s = ctx.store
        start = ctx.now()
        got = False
        deadline = ctx.nominal(4)
        while True:
            yield ctx.d(3)
            if s.permits > 0:
                s.permits -= 1
                got = True
                break
            if ctx.now() - start >= deadline:
                break
        yield ctx.d(3)
        s.permits += 1      # released whether or not the wait succeeded
        if got:
            return

    return ProblemSpec(
        name="PhantomPermit",
        dim=7,
        bounds=(UNIT, UNIT, (0.0, 0.3), UNIT, (0.0, 0.4), UNIT, (0.0, 0.3)),
        init=init,
        threads=(acquirer(1, 2), timed_failer, acquirer(5, 6)),
        invariant=lambda s: s.in_cs <= 1,
        effects=frozenset({Effect.CONCURRENT_ACCESS}),
        root_cause=RootCause.MISUSE_OF_PRIMITIVES,
        bug_witness=(1.0, 0.23, 0.04, 0.29, 0.23, 0.55, 0.24),
        pass_witness=(1.0, 0.27, 0.01, 0.02, 0.33, 0.91, 0.18),
        insight="Every semaphore release must be paid for by a successful "
                "wait; a timeout path that releases anyway prints permits.",
    )


def build_semaphore_leak() -> ProblemSpec:
    """Like the phantom permit, but the failer loops: each timed-out wait
    still releases, steadily inflating the count until exclusion is gone."""

    ROUNDS = 3

    def init():
        return _ns(permits=1, in_cs=0)

    def canonical(ctx):
        s = ctx.store
        for _ in range(ROUNDS):
            while True:
                yield ctx.d(1)
                if s.permits > 0:
                    s.permits -= 1
                    break
            yield ctx.d(2)
            s.in_cs += 1
            yield ctx.d(2)
            s.in_cs -= 1
            yield ctx.d(1)
            s.permits += 1

    def leaky(ctx):
        s = ctx.store
        for _ in range(ROUNDS):
            start = ctx.now()
            deadline = ctx.nominal(4)
            got = False
            while True:
                yield ctx.d(3)
                if s.permits > 0:
                    s.permits -= 1
                    got = True
                    break
                if ctx.now() - start >= deadline:
                    break
            if got:
                yield ctx.d(5)
                s.in_cs += 1
                yield ctx.d(5)
                s.in_cs -= 1
                yield ctx.d(3)
                s.permits += 1
            else:
                yield ctx.d(3)
                s.permits += 1     # never acquired it
    return ProblemSpec(
        name="SemaphoreLeak",
        dim=6,
        bounds=(UNIT, UNIT, (0.0, 0.15), UNIT, (0.0, 0.4), (0.0, 0.15)),
        init=init,
        threads=(canonical, leaky),
        invariant=lambda s: s.in_cs <= 1,
        effects=frozenset({Effect.CONCURRENT_ACCESS}),
        root_cause=RootCause.MISUSE_OF_PRIMITIVES,
        bug_witness=(1.0, 0.237, 0.12, 0.582, 0.038, 0.065),
        pass_witness=(1.0, 0.16, 0.11, 0.114, 0.156, 0.078),
        insight="Semaphore counts are global state: one unmatched release "
                "anywhere breaks exclusion everywhere, forever.",
    )


BUILDERS = {
    "AtomicityBypass": build_atomicity_bypass,
    "BrokenBarrier": build_broken_barrier,
    "BrokenPeterson": build_broken_peterson,
    "DelayedWrite": build_delayed_write,
    "FlaggedDeadlock": build_flagged_deadlock,
    "IfNotWhile": build_if_not_while,
    "LockOrderInversion": build_lock_order_inversion,
    "LostSignal": build_lost_signal,
    "PartialLock": build_partial_lock,
    "PhantomPermit": build_phantom_permit,
    "RaceToWait": build_race_to_wait,
    "RacyIncrement": build_racy_increment,
    "SemaphoreLeak": build_semaphore_leak,
    "SharedCounter": build_shared_counter,
    "SharedFlag": build_shared_flag,
    "SignalThenWait": build_signal_then_wait,
    "SleepingGuard": build_sleeping_guard,
}
