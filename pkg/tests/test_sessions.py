from collections import Counter

import numpy as np
import pytest
from scipy.special import expit

from hapticbench.errors import (
    InvalidSpecError,
    ProtocolViolationError,
    SessionCompleteError,
)
from hapticbench.sessions import (
    CHOICE_FIRST,
    CHOICE_SECOND,
    STATUS_COMPLETE,
    STATUS_RUNNING,
    build_session_plan,
    new_session,
    next_trial,
    record_response,
    run_simulated_session,
    trials_from_log,
)
from hapticbench.session_io import canonical_json_bytes, log_to_dict
from hapticbench.textures import GritLevel, ObserverModel, canonical_grit, canonical_grits

REF = canonical_grit("P120")


def hundred_trial_plan(seed=0):
    return build_session_plan(REF, canonical_grits(), reps=20, seed=seed)


class TestPlan:
    def test_hundred_trials_twenty_per_level(self):
        plan = hundred_trial_plan()
        assert plan.total_trials == 100 and len(plan.trials) == 100
        counts = Counter(t.comparison.p_grade for t in plan.trials)
        assert all(counts[g.p_grade] == 20 for g in canonical_grits())

    def test_same_seed_same_plan(self):
        assert hundred_trial_plan(9) == hundred_trial_plan(9)

    def test_different_seed_different_order(self):
        a = [t.comparison.p_grade for t in hundred_trial_plan(1).trials]
        b = [t.comparison.p_grade for t in hundred_trial_plan(2).trials]
        assert a != b

    def test_duplicate_levels_rejected(self):
        with pytest.raises(InvalidSpecError):
            build_session_plan(REF, [canonical_grit("P60"), canonical_grit("P60")], 5, 0)

    def test_order_cells_bounded_by_reps(self):
        # tabulation over 50 seeds: each (level, presentation-order) cell holds
        # between 0 and reps trials and the two cells of a level sum to reps
        reps = 20
        for seed in range(50):
            plan = build_session_plan(REF, canonical_grits(), reps, seed)
            cells = Counter((t.comparison.p_grade, t.comparison_first) for t in plan.trials)
            for grit in canonical_grits():
                first = cells.get((grit.p_grade, True), 0)
                second = cells.get((grit.p_grade, False), 0)
                assert first + second == reps
                assert abs(first - second) <= reps

    def test_replicates_drawn_from_pool(self):
        plan = build_session_plan(REF, canonical_grits(), 20, 3, per_grit=2)
        for t in plan.trials:
            assert 0 <= t.ref_replicate < 2 and 0 <= t.comp_replicate < 2


class TestTrialFlow:
    def test_fresh_session_serves_trial_zero(self):
        log = new_session(hundred_trial_plan())
        assert next_trial(log).index == 0
        assert log.status == STATUS_RUNNING

    def test_last_trial_then_complete(self):
        log = new_session(hundred_trial_plan())
        for j in range(99):
            record_response(log, j, CHOICE_FIRST)
        assert next_trial(log).index == 99
        record_response(log, 99, CHOICE_SECOND)
        assert log.status == STATUS_COMPLETE
        with pytest.raises(SessionCompleteError):
            next_trial(log)

    def test_next_trial_does_not_mutate(self):
        log = new_session(hundred_trial_plan())
        next_trial(log)
        next_trial(log)
        assert log.answered == 0

    def test_response_encoding(self):
        plan = hundred_trial_plan()
        comp_first = next(t for t in plan.trials if t.comparison_first)
        ref_first = next(t for t in plan.trials if not t.comparison_first)

        log = new_session(plan)
        for j in range(comp_first.index):
            record_response(log, j, CHOICE_FIRST)
        record_response(log, comp_first.index, CHOICE_SECOND)
        # comparison played first, chose second -> Y = 0
        assert log.trials[comp_first.index].response == 0

        log2 = new_session(plan)
        for j in range(ref_first.index):
            record_response(log2, j, CHOICE_FIRST)
        record_response(log2, ref_first.index, CHOICE_SECOND)
        # comparison played second, chose second -> Y = 1
        assert log2.trials[ref_first.index].response == 1

    def test_out_of_order_rejected(self):
        log = new_session(hundred_trial_plan())
        for j in range(3):
            record_response(log, j, CHOICE_FIRST)
        with pytest.raises(ProtocolViolationError):
            record_response(log, 5, CHOICE_FIRST)

    def test_double_answer_rejected(self):
        log = new_session(hundred_trial_plan())
        record_response(log, 0, CHOICE_FIRST)
        with pytest.raises(ProtocolViolationError):
            record_response(log, 0, CHOICE_SECOND)

    def test_bad_choice_rejected(self):
        log = new_session(hundred_trial_plan())
        with pytest.raises(ProtocolViolationError):
            record_response(log, 0, "third")

    def test_conservation_of_trials(self):
        log = new_session(hundred_trial_plan())
        for j in range(100):
            assert log.answered + (100 - log.answered) == 100
            record_response(log, j, CHOICE_FIRST)
        assert log.answered == 100


class TestSimulatedSession:
    def test_complete_log_with_level_balance(self):
        obs = ObserverModel("analytic", beta0=-2.326, beta1=0.01701, seed=1)
        log = run_simulated_session(hundred_trial_plan(), obs)
        assert log.status == STATUS_COMPLETE and log.answered == 100
        counts = Counter(t.comparison_um for t in log.trials)
        assert all(counts[g.particle_um] == 20 for g in canonical_grits())

    def test_step_observer_proportions(self):
        # 50% point placed strictly between levels: 0 below it, 1 above
        pse = 150.0
        obs = ObserverModel("analytic", beta0=-pse * 1e6, beta1=1e6, seed=2)
        log = run_simulated_session(hundred_trial_plan(), obs)
        for x, y in trials_from_log(log):
            assert y == (1 if x > pse else 0)

    def test_per_level_rates_track_the_generating_curve(self):
        beta0, beta1 = -2.326, 0.01701
        obs_template = dict(beta0=beta0, beta1=beta1)
        sums = Counter()
        totals = Counter()
        for s in range(200):
            plan = build_session_plan(REF, canonical_grits(), 20, seed=300 + s)
            obs = ObserverModel("analytic", seed=900 + s, **obs_template)
            for x, y in trials_from_log(run_simulated_session(plan, obs)):
                sums[x] += y
                totals[x] += 1
        for grit in canonical_grits():
            x = grit.particle_um
            assert abs(sums[x] / totals[x] - expit(beta0 + beta1 * x)) <= 0.05

    def test_replay_is_byte_identical(self):
        plan = hundred_trial_plan(12)
        obs = ObserverModel("analytic", beta0=-2.0, beta1=0.015, seed=34)
        a = run_simulated_session(plan, obs)
        b = run_simulated_session(plan, obs)
        assert canonical_json_bytes(log_to_dict(a)) == canonical_json_bytes(log_to_dict(b))

    def test_signal_chain_requires_covering_library(self):
        obs = ObserverModel("signal-chain", sigma=0.2, seed=0)
        with pytest.raises(InvalidSpecError):
            run_simulated_session(hundred_trial_plan(), obs, library=None)

    def test_rejects_non_canonical_seed(self):
        with pytest.raises(InvalidSpecError):
            build_session_plan(REF, canonical_grits(), 20, seed=-1)

    def test_reference_outside_canon_is_fine(self):
        ref = GritLevel("custom", 140.0)
        plan = build_session_plan(ref, canonical_grits(), 2, seed=0)
        obs = ObserverModel("analytic", beta0=0.0, beta1=0.01, seed=0)
        log = run_simulated_session(plan, obs)
        assert log.answered == 10
