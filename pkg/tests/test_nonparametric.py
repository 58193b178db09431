import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hapticbench.errors import DegenerateDataError, InvalidSpecError
from hapticbench.stats import (
    benjamini_yekutieli_adjust,
    friedman_test,
    lilliefors_test,
    paired_t_test,
    wilcoxon_signed_rank,
)
from oracles import sign_test_exact_p, wilcoxon_exact_enumeration


def as_pairs(diffs):
    return [(float(d), 0.0) for d in diffs]


class TestWilcoxon:
    def test_all_positive_five(self):
        result = wilcoxon_signed_rank(as_pairs([1, 2, 3, 4, 5]))
        assert result.statistic == 15.0
        assert result.p_value == pytest.approx(0.0625, abs=1e-12)
        assert result.exact

    def test_antisymmetric_pair(self):
        result = wilcoxon_signed_rank(as_pairs([3.0, -3.0]))
        assert result.p_value == 1.0

    def test_matches_enumeration_oracle_n12(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            diffs = rng.integers(-6, 7, size=12)
            diffs[diffs == 0] = 1
            result = wilcoxon_signed_rank(as_pairs(diffs))
            w_oracle, p_oracle = wilcoxon_exact_enumeration(diffs)
            assert result.statistic == pytest.approx(w_oracle, abs=1e-12)
            assert result.p_value == pytest.approx(p_oracle, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(
            st.integers(-5, 5).filter(lambda v: v != 0), min_size=1, max_size=12
        )
    )
    def test_enumeration_property(self, diffs):
        result = wilcoxon_signed_rank(as_pairs(diffs))
        w_oracle, p_oracle = wilcoxon_exact_enumeration(diffs)
        assert result.statistic == pytest.approx(w_oracle, abs=1e-12)
        assert result.p_value == pytest.approx(p_oracle, abs=1e-12)

    def test_zero_differences_dropped(self):
        result = wilcoxon_signed_rank([(2.0, 2.0), (5.0, 4.0), (3.0, 1.0)])
        assert result.n == 2

    def test_all_zero_differences_degenerate(self):
        with pytest.raises(DegenerateDataError):
            wilcoxon_signed_rank([(1.0, 1.0), (2.0, 2.0)])

    def test_large_n_approximation_close_to_exact(self):
        rng = np.random.default_rng(5)
        from scipy.stats import rankdata

        from hapticbench.stats.nonparametric import _signed_rank_distribution

        for _ in range(20):
            diffs = rng.integers(-9, 10, size=26)
            diffs[diffs == 0] = 3
            result = wilcoxon_signed_rank(as_pairs(diffs))
            assert not result.exact
            ranks = rankdata(np.abs(diffs))
            dist = _signed_rank_distribution(np.rint(2 * ranks).astype(np.int64))
            w2 = int(round(2 * ranks[diffs > 0].sum()))
            m = 2.0**26
            p_exact = min(1.0, 2 * min(dist[: w2 + 1].sum() / m, dist[w2:].sum() / m))
            assert abs(result.p_value - p_exact) < 0.01

    def test_p_in_unit_interval(self):
        rng = np.random.default_rng(6)
        for n in (3, 10, 30, 100):
            diffs = rng.standard_normal(n)
            assert 0.0 <= wilcoxon_signed_rank(as_pairs(diffs)).p_value <= 1.0


class TestFriedman:
    def test_strictly_ordered_four_blocks(self):
        result = friedman_test([[1, 2, 3]] * 4)
        assert result.statistic == pytest.approx(8.0, abs=1e-12)
        assert result.df == 2.0

    def test_no_effect_balanced_rankings(self):
        # Latin-square data: every treatment takes each rank once -> statistic 0
        result = friedman_test([[1, 2, 3], [2, 3, 1], [3, 1, 2]])
        assert result.statistic == pytest.approx(0.0, abs=1e-12)
        assert result.p_value == 1.0

    def test_constant_rows_degenerate(self):
        with pytest.raises(DegenerateDataError):
            friedman_test([[5, 5, 5], [7, 7, 7], [2, 2, 2]])

    def test_two_treatments_match_sign_test(self):
        # Friedman with k=2 is the sign test without continuity correction;
        # the exact-enumeration gap is bounded by ~2*phi(0)/sqrt(n).
        rng = np.random.default_rng(11)
        n = 40
        bound = 0.8 / np.sqrt(n) + 0.02
        for _ in range(100):
            a = rng.standard_normal(n)
            b = rng.standard_normal(n)
            p_friedman = friedman_test(np.column_stack([a, b])).p_value
            p_sign = sign_test_exact_p(a, b)
            assert abs(p_friedman - p_sign) < bound

    def test_tie_correction_increases_statistic(self):
        tied = [[1, 1, 2], [1, 2, 2], [2, 1, 1], [1, 2, 1]]
        untied = [[1, 2, 3], [1, 3, 2], [3, 1, 2], [1, 2, 3]]
        assert friedman_test(tied).statistic > 0
        assert friedman_test(untied).p_value <= 1.0

    def test_shape_validation(self):
        with pytest.raises(InvalidSpecError):
            friedman_test([[1, 2]])
        with pytest.raises(InvalidSpecError):
            friedman_test([[1], [2]])


class TestBenjaminiYekutieli:
    def test_hand_example(self):
        adjusted = benjamini_yekutieli_adjust([0.01, 0.02, 0.05])
        # c(3) = 11/6: {3*11/6*0.01, 3*11/6*0.02/2, 11/6*0.05} with step-up min
        assert adjusted == pytest.approx([0.055, 0.055, 11 / 120], abs=1e-12)

    def test_single_p_unchanged(self):
        assert benjamini_yekutieli_adjust([0.2]) == pytest.approx([0.2])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=20))
    def test_dominates_input_and_clips(self, ps):
        adjusted = benjamini_yekutieli_adjust(ps)
        assert np.all(adjusted >= np.asarray(ps) - 1e-15)
        assert np.all(adjusted <= 1.0)
        order = np.argsort(ps, kind="stable")
        assert np.all(np.diff(adjusted[order]) >= -1e-15)

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidSpecError):
            benjamini_yekutieli_adjust([0.5, 1.5])


class TestLilliefors:
    def test_null_rejection_rate_calibrated(self):
        rng = np.random.default_rng(21)
        rejections = 0
        reps = 500
        for _ in range(reps):
            sample = rng.standard_normal(500)
            if lilliefors_test(sample, seed=7).p_value < 0.05:
                rejections += 1
        assert abs(rejections / reps - 0.05) <= 0.02

    def test_uniform_power(self):
        rng = np.random.default_rng(22)
        result = lilliefors_test(rng.uniform(0, 1, 200), seed=7)
        assert result.p_value < 0.01

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(23)
        sample = rng.standard_normal(60)
        assert (
            lilliefors_test(sample, seed=3).p_value
            == lilliefors_test(sample, seed=3).p_value
        )

    def test_zero_variance_degenerate(self):
        with pytest.raises(DegenerateDataError):
            lilliefors_test([4.0, 4.0, 4.0, 4.0])

    def test_small_sample_rejected(self):
        with pytest.raises(InvalidSpecError):
            lilliefors_test([1.0, 2.0, 3.0])


class TestPairedT:
    def test_symmetric_two_pairs(self):
        result = paired_t_test(as_pairs([1.0, -1.0]))
        assert result.statistic == 0.0
        assert result.p_value == 1.0

    def test_hand_example(self):
        result = paired_t_test(as_pairs([1, 2, 3, 4]))
        assert result.statistic == pytest.approx(3.873, abs=5e-4)
        assert result.p_value == pytest.approx(0.0305, abs=5e-4)
        assert result.df == 3.0

    def test_matches_monte_carlo_null(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            n = int(rng.integers(5, 11))
            diffs = rng.standard_normal(n) + rng.uniform(-1, 1)
            result = paired_t_test(as_pairs(diffs))
            null = rng.standard_normal((1_000_000, n))
            t_null = null.mean(axis=1) / (null.std(axis=1, ddof=1) / np.sqrt(n))
            p_mc = float((np.abs(t_null) >= abs(result.statistic)).mean())
            assert abs(result.p_value - p_mc) <= 0.01

    def test_zero_variance_degenerate(self):
        with pytest.raises(DegenerateDataError):
            paired_t_test(as_pairs([2.0, 2.0, 2.0]))

    def test_too_few_pairs_rejected(self):
        with pytest.raises(InvalidSpecError):
            paired_t_test(as_pairs([1.0]))


class TestReportPayload:
    def test_result_serializes_to_the_report_schema(self):
        result = wilcoxon_signed_rank(as_pairs([1, 2, 3, 4, 5]))
        payload = result.to_dict()
        assert payload == {
            "method": "wilcoxon-signed-rank",
            "statistic": 15.0,
            "p": pytest.approx(0.0625),
            "exact": True,
            "n": 5,
        }

    def test_df_included_when_present(self):
        payload = friedman_test([[1, 2, 3]] * 4).to_dict()
        assert payload["df"] == 2.0 and payload["method"] == "friedman"
