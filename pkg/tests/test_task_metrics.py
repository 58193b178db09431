import numpy as np
import pytest

from hapticbench.errors import EmptyInputError, InvalidSpecError
from hapticbench.stats import (
    ConfusionMatrix,
    confusion_metrics,
    nasa_rtlx_index,
    slip_and_reaction,
    sus_score,
)


class TestConfusion:
    def test_perfect_identification(self):
        cm = ConfusionMatrix(np.eye(5, dtype=int) * 5, tuple("ABCDE"))
        summary = confusion_metrics(cm)
        assert summary.overall_accuracy == 1.0
        assert summary.chance_level == 0.20
        assert all(v == 1.0 for v in summary.per_class_accuracy.values())

    def test_uniform_matrix_is_chance(self):
        cm = ConfusionMatrix(np.full((5, 5), 3, dtype=int), tuple("ABCDE"))
        summary = confusion_metrics(cm)
        assert summary.overall_accuracy == pytest.approx(0.20)

    def test_from_records(self):
        records = [("A", "A"), ("A", "B"), ("B", "B"), ("B", "B")]
        cm = ConfusionMatrix.from_records(records, ("A", "B"))
        assert cm.counts.tolist() == [[1, 1], [0, 2]]
        summary = confusion_metrics(cm)
        assert summary.overall_accuracy == pytest.approx(0.75)
        assert summary.per_class_accuracy["A"] == pytest.approx(0.5)

    def test_empty_matrix_rejected(self):
        cm = ConfusionMatrix(np.zeros((3, 3), dtype=int), ("a", "b", "c"))
        with pytest.raises(EmptyInputError):
            confusion_metrics(cm)

    def test_unseen_class_accuracy_is_nan(self):
        cm = ConfusionMatrix(np.array([[2, 0], [0, 0]]), ("A", "B"))
        summary = confusion_metrics(cm)
        assert np.isnan(summary.per_class_accuracy["B"])

    def test_shape_validation(self):
        with pytest.raises(InvalidSpecError):
            ConfusionMatrix(np.zeros((2, 3), dtype=int), ("A", "B"))
        with pytest.raises(InvalidSpecError):
            ConfusionMatrix(np.array([[1, -1], [0, 0]]), ("A", "B"))


class TestWorkloadIndex:
    def test_midpoint(self):
        assert nasa_rtlx_index([10] * 6) == 50.0

    def test_hand_example(self):
        assert nasa_rtlx_index([9, 8, 10, 9, 10, 9]) == pytest.approx(275.0 / 6)

    def test_endpoints(self):
        assert nasa_rtlx_index([0] * 6) == 0.0
        assert nasa_rtlx_index([20] * 6) == 100.0

    def test_validation(self):
        with pytest.raises(InvalidSpecError):
            nasa_rtlx_index([10] * 5)
        with pytest.raises(InvalidSpecError):
            nasa_rtlx_index([10, 10, 10, 10, 10, 21])


class TestUsabilityScore:
    def test_best_case(self):
        assert sus_score([5, 1, 5, 1, 5, 1, 5, 1, 5, 1]) == 100.0

    def test_midpoint(self):
        assert sus_score([3] * 10) == 50.0

    def test_hand_example(self):
        # odd items (x-1): five 4s -> 15; even items (5-x): four 2s and one 3 -> 14
        assert sus_score([4, 2, 4, 2, 4, 2, 4, 2, 4, 3]) == pytest.approx(29 * 2.5)

    def test_validation(self):
        with pytest.raises(InvalidSpecError):
            sus_score([3] * 9)
        with pytest.raises(InvalidSpecError):
            sus_score([3] * 9 + [6])


class TestSlipAndReaction:
    def test_plain_slip(self):
        m = slip_and_reaction(
            [("open_start", 10.0), ("close_start", 10.4)], x_start_cm=20.0,
            x_finish_cm=15.0,
        )
        assert m.slip_cm == 5.0 and not m.fell

    def test_fallen_trial_scores_from_start(self):
        m = slip_and_reaction([("open_start", 3.0)], x_start_cm=11.5, fell=True)
        assert m.fell and m.slip_cm == 11.5
        assert m.x_finish_cm is None
        assert m.reaction_time_s is None

    def test_reaction_time(self):
        m = slip_and_reaction(
            [("open_start", 10.00), ("close_start", 10.55)], x_start_cm=8.0,
            x_finish_cm=6.0,
        )
        assert m.reaction_time_s == pytest.approx(0.55)

    def test_first_events_win(self):
        m = slip_and_reaction(
            [
                ("open_start", 1.0),
                ("close_start", 1.3),
                ("open_start", 2.0),
                ("close_start", 2.9),
            ],
            x_start_cm=9.0,
            x_finish_cm=8.0,
        )
        assert m.reaction_time_s == pytest.approx(0.3)

    def test_missing_close_event_rejected(self):
        with pytest.raises(InvalidSpecError):
            slip_and_reaction([("open_start", 1.0)], x_start_cm=9.0, x_finish_cm=8.0)

    def test_missing_finish_rejected(self):
        with pytest.raises(InvalidSpecError):
            slip_and_reaction(
                [("open_start", 1.0), ("close_start", 2.0)], x_start_cm=9.0
            )
