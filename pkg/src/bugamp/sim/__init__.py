from .events import Acquire, Wait, TraceEvent
from .scheduler import (
    BugKind,
    OutcomeKind,
    SchedulerState,
    ThreadContext,
    TrialOutcome,
    apply_yield,
    next_runnable,
    simulate_trial,
    trace_to_csv,
)

__all__ = [
    "Acquire",
    "Wait",
    "TraceEvent",
    "BugKind",
    "OutcomeKind",
    "SchedulerState",
    "ThreadContext",
    "TrialOutcome",
    "apply_yield",
    "next_runnable",
    "simulate_trial",
    "trace_to_csv",
]
