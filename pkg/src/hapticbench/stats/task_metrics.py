"""Task-level metrics: confusion matrices for texture identification,
workload and usability questionnaire scores, and slip/reaction measures for
the grasp tasks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyInputError, InvalidSpecError

EVENT_OPEN_START = "open_start"
EVENT_CLOSE_START = "close_start"


@dataclass(frozen=True)
class ConfusionMatrix:
    """k x k counts; rows are true classes, columns answered classes."""

    counts: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        arr = np.asarray(self.counts, dtype=int)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidSpecError("counts must be a square matrix")
        if len(self.labels) != arr.shape[0]:
            raise InvalidSpecError("labels must match the matrix size")
        if np.any(arr < 0):
            raise InvalidSpecError("counts must be non-negative")
        object.__setattr__(self, "counts", arr)
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_records(cls, records, labels) -> "ConfusionMatrix":
        labels = tuple(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        counts = np.zeros((len(labels), len(labels)), dtype=int)
        for true, answered in records:
            counts[index[true], index[answered]] += 1
        return cls(counts, labels)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ConfusionSummary:
    overall_accuracy: float
    per_class_accuracy: dict
    chance_level: float


def confusion_metrics(matrix: ConfusionMatrix) -> ConfusionSummary:
    """Overall accuracy (trace/total), row-normalized diagonal, and 1/k chance."""
    total = matrix.total
    if total == 0:
        raise EmptyInputError("confusion matrix holds no observations")
    counts = matrix.counts
    overall = float(np.trace(counts)) / total
    row_totals = counts.sum(axis=1)
    per_class = {}
    for i, label in enumerate(matrix.labels):
        per_class[label] = (
            float(counts[i, i]) / row_totals[i] if row_totals[i] > 0 else float("nan")
        )
    return ConfusionSummary(overall, per_class, 1.0 / len(matrix.labels))


def nasa_rtlx_index(six_scores) -> float:
    """Unweighted workload index: six 0-20 scales rescaled to 0-100 and averaged."""
    scores = np.asarray(list(six_scores), dtype=float)
    if scores.size != 6:
        raise InvalidSpecError(f"expected exactly 6 scores, got {scores.size}")
    if np.any(~np.isfinite(scores)) or np.any((scores < 0) | (scores > 20)):
        raise InvalidSpecError("scores must lie in [0, 20]")
    return float(np.mean(scores * 5.0))


def sus_score(ten_items) -> float:
    """Usability score 0-100: odd items contribute (x - 1), even items (5 - x),
    summed and scaled by 2.5. Items are 1-indexed and rated 1-5."""
    items = np.asarray(list(ten_items), dtype=float)
    if items.size != 10:
        raise InvalidSpecError(f"expected exactly 10 items, got {items.size}")
    if np.any(~np.isfinite(items)) or np.any((items < 1) | (items > 5)):
        raise InvalidSpecError("items must lie in [1, 5]")
    odd = items[0::2] - 1.0
    even = 5.0 - items[1::2]
    return float((odd.sum() + even.sum()) * 2.5)


@dataclass(frozen=True)
class SlipMetrics:
    x_start_cm: float
    x_finish_cm: float | None
    slip_cm: float
    fell: bool
    reaction_time_s: float | None


def slip_and_reaction(
    events,
    x_start_cm: float,
    x_finish_cm: float | None = None,
    fell: bool = False,
) -> SlipMetrics:
    """Slip distance and regrasp reaction time from a grasp-event timeline.

    Slip is x_start - x_finish; a fallen cylinder is scored from the starting
    point alone. Reaction time is the first close_start minus the first
    open_start. When the cylinder did not fall, the finish position and the
    close event are both required.
    """
    t_open = None
    t_close = None
    for kind, t_s in events:
        if kind == EVENT_OPEN_START and t_open is None:
            t_open = float(t_s)
        elif kind == EVENT_CLOSE_START and t_close is None:
            t_close = float(t_s)
    if fell:
        slip = float(x_start_cm)
        x_finish_cm = None
    else:
        if x_finish_cm is None:
            raise InvalidSpecError("x_finish_cm is required when the cylinder did not fall")
        if t_close is None:
            raise InvalidSpecError("missing close_start event for a non-fallen trial")
        if t_open is None:
            raise InvalidSpecError("missing open_start event for a non-fallen trial")
        slip = float(x_start_cm) - float(x_finish_cm)
    reaction = t_close - t_open if (t_open is not None and t_close is not None) else None
    return SlipMetrics(float(x_start_cm), x_finish_cm, slip, bool(fell), reaction)
