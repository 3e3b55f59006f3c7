"""Events a simulated thread can yield, and the trace row format.

A thread is a generator.  Yielding a plain number means "sleep that many
virtual time units"; yielding `Acquire` or `Wait` blocks the thread on a
lock or condition variable.  Finishing the generator (plain `return`) marks
the thread done.  Lock releases and condition notifications are immediate
side effects issued through the thread context, not yields.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Acquire:
    """Block until the named lock is granted.  Non-reentrant: a thread that
    acquires a lock it already holds blocks forever."""

    lock: str


@dataclass(frozen=True, slots=True)
class Wait:
    """Wait on a condition variable.  If `lock` is given it must be held and
    is released atomically with the wait; it is re-acquired before the
    waiter resumes.  A notification with no waiters is lost."""

    cv: str
    lock: str | None = None


@dataclass(frozen=True, slots=True)
class TraceEvent:
    """One scheduler trace row: `step,time,thread,kind,detail`."""

    step: int
    time: float
    thread: int
    kind: str
    detail: str

    def as_csv_row(self) -> str:
        return f"{self.step},{self.time:.9g},{self.thread},{self.kind},{self.detail}"
