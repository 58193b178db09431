"""Constant-stimuli 2AFC sessions: planning, trial bookkeeping, simulation.

A plan fixes, per trial, the comparison level, which interval plays the
comparison, and which saved replicate renders each interval; all three are
drawn from one seeded stream so a plan is a pure function of its seed.
Responses are recorded once, in order, and re-encoded as Y = 1 when the
chosen interval carried the comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidSpecError,
    ProtocolViolationError,
    SessionCompleteError,
)
from .textures import (
    CHOICE_COMPARISON,
    OBSERVER_SIGNAL_CHAIN,
    GritLevel,
    ObserverModel,
    StimulusLibrary,
    analytic_observer_respond,
    signal_chain_respond,
)

ORDER_COMPARISON_FIRST = "comparison-first"
ORDER_REFERENCE_FIRST = "reference-first"
CHOICE_FIRST = "first"
CHOICE_SECOND = "second"

STATUS_PENDING = "pending"
STATUS_RUNNING = "running"
STATUS_COMPLETE = "complete"


@dataclass(frozen=True)
class PlannedTrial:
    index: int
    comparison: GritLevel
    comparison_first: bool
    ref_replicate: int
    comp_replicate: int

    @property
    def order(self) -> str:
        return ORDER_COMPARISON_FIRST if self.comparison_first else ORDER_REFERENCE_FIRST

    def first_stimulus(self, reference: GritLevel) -> tuple[GritLevel, int]:
        if self.comparison_first:
            return self.comparison, self.comp_replicate
        return reference, self.ref_replicate

    def second_stimulus(self, reference: GritLevel) -> tuple[GritLevel, int]:
        if self.comparison_first:
            return reference, self.ref_replicate
        return self.comparison, self.comp_replicate


@dataclass(frozen=True)
class SessionPlan:
    reference: GritLevel
    comparisons: tuple[GritLevel, ...]
    reps_per_level: int
    seed: int
    condition_label: str = ""
    per_grit: int = 2
    trials: tuple[PlannedTrial, ...] = ()

    @property
    def total_trials(self) -> int:
        return len(self.comparisons) * self.reps_per_level


def build_session_plan(
    reference: GritLevel,
    comparisons,
    reps: int,
    seed: int,
    condition_label: str = "",
    per_grit: int = 2,
) -> SessionPlan:
    """Seeded random permutation of the reps-replicated level list.

    Presentation order and replicate picks are drawn per trial from the same
    stream. No familiarization trials, no repetition of answered trials.
    """
    comparisons = tuple(comparisons)
    if not comparisons:
        raise InvalidSpecError("comparisons must be non-empty")
    if reps < 1:
        raise InvalidSpecError("reps must be at least 1")
    if per_grit < 1:
        raise InvalidSpecError("per_grit must be at least 1")
    if seed < 0 or int(seed) != seed:
        raise InvalidSpecError("seed must be a non-negative integer")
    seen = set()
    for c in comparisons:
        key = (c.p_grade, c.particle_um)
        if key in seen:
            raise InvalidSpecError(f"duplicate comparison level {c.p_grade}")
        seen.add(key)

    rng = np.random.default_rng(seed)
    level_ids = np.repeat(np.arange(len(comparisons)), reps)
    rng.shuffle(level_ids)
    trials = []
    for j, li in enumerate(level_ids):
        trials.append(
            PlannedTrial(
                index=j,
                comparison=comparisons[int(li)],
                comparison_first=bool(rng.random() < 0.5),
                ref_replicate=int(rng.integers(per_grit)),
                comp_replicate=int(rng.integers(per_grit)),
            )
        )
    return SessionPlan(
        reference, comparisons, reps, int(seed), condition_label, per_grit, tuple(trials)
    )


@dataclass(frozen=True)
class TrialRecord:
    index: int
    comparison_um: float
    order: str
    replicate_ids: tuple[int, int]  # (reference replicate, comparison replicate)
    response: int  # Y: 1 iff the chosen interval carried the comparison
    response_time_ms: float | None = None


@dataclass
class SessionLog:
    """Single-writer record of one session; trial history is append-only.

    started_at is wall-clock metadata for live sessions (None for simulated
    ones) and is deliberately excluded from the canonical export, which must
    be byte-identical across replays.
    """

    plan: SessionPlan
    participant_id: str = ""
    trials: list[TrialRecord] = field(default_factory=list)
    status: str = STATUS_RUNNING
    started_at: str | None = None

    @property
    def answered(self) -> int:
        return len(self.trials)

    @property
    def is_complete(self) -> bool:
        return self.answered == self.plan.total_trials


def new_session(plan: SessionPlan, participant_id: str = "") -> SessionLog:
    return SessionLog(plan=plan, participant_id=participant_id, status=STATUS_RUNNING)


def next_trial(log: SessionLog) -> PlannedTrial:
    """The next unanswered trial's descriptor; does not mutate the log."""
    if log.is_complete or log.status == STATUS_COMPLETE:
        raise SessionCompleteError("all trials are answered")
    return log.plan.trials[log.answered]


def record_response(
    log: SessionLog,
    trial_index: int,
    choice: str,
    response_time_ms: float | None = None,
) -> SessionLog:
    """Record the answer for the currently open trial and return the log.

    choice is "first" or "second"; Y is 1 iff that interval carried the
    comparison. Answering out of order or twice is a protocol violation.
    """
    if choice not in (CHOICE_FIRST, CHOICE_SECOND):
        raise ProtocolViolationError(f"choice must be 'first' or 'second', got {choice!r}")
    if log.is_complete:
        raise ProtocolViolationError("session is already complete")
    open_index = log.answered
    if trial_index != open_index:
        raise ProtocolViolationError(
            f"trial {trial_index} is not open (awaiting trial {open_index})"
        )
    planned = log.plan.trials[open_index]
    chose_first = choice == CHOICE_FIRST
    y = int(chose_first == planned.comparison_first)
    log.trials.append(
        TrialRecord(
            index=planned.index,
            comparison_um=planned.comparison.particle_um,
            order=planned.order,
            replicate_ids=(planned.ref_replicate, planned.comp_replicate),
            response=y,
            response_time_ms=response_time_ms,
        )
    )
    if log.is_complete:
        log.status = STATUS_COMPLETE
    return log


def run_simulated_session(
    plan: SessionPlan,
    observer: ObserverModel,
    library: StimulusLibrary | None = None,
    participant_id: str = "sim",
) -> SessionLog:
    """Drive a full session with a simulated observer.

    Deterministic given (plan.seed, observer.seed): each trial uses its own
    stream derived from both seeds plus the trial index, so responses do not
    depend on execution order.
    """
    needs_library = observer.kind == OBSERVER_SIGNAL_CHAIN
    if needs_library:
        if library is None:
            raise InvalidSpecError("signal-chain observer needs a stimulus library")
        if not library.covers((plan.reference, *plan.comparisons)):
            raise InvalidSpecError("library does not cover every grit in the plan")

    log = new_session(plan, participant_id)
    while not log.is_complete:
        trial = next_trial(log)
        rng = np.random.default_rng((observer.seed, plan.seed, trial.index))
        if needs_library:
            ref_trace = library.trace(plan.reference.p_grade, trial.ref_replicate)
            comp_trace = library.trace(trial.comparison.p_grade, trial.comp_replicate)
            answer = signal_chain_respond(ref_trace, comp_trace, observer, rng)
        else:
            answer = analytic_observer_respond(
                plan.reference.particle_um, trial.comparison.particle_um, observer, rng
            )
        chose_comparison = answer == CHOICE_COMPARISON
        choice = (
            CHOICE_FIRST if chose_comparison == trial.comparison_first else CHOICE_SECOND
        )
        record_response(log, trial.index, choice)
    return log


def trials_from_log(log: SessionLog) -> list[tuple[float, int]]:
    """(comparison level, Y) pairs ready for psychometric fitting."""
    return [(t.comparison_um, t.response) for t in log.trials]
