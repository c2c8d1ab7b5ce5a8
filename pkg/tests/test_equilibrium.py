import json
import math

import numpy as np
import pytest

from motivated_signaling.equilibrium import (
    BneKind,
    MixedKind,
    ME_ROW_STRATEGIES,
    build_bne_candidate,
    build_me_candidate,
    bne_kind_interval,
    check_predictions,
    enumerate_me,
    enumerate_pure_bne,
    equilibrium_document,
    me_region,
    mixed_bne,
    realized_receiver,
    verify_profile,
    UnsupportedRegimeError,
)
from motivated_signaling.game_core import (
    GameParams,
    MessageLabel,
    OffPathPolicy,
    ReceiverStrategy,
    SenderStrategy,
    StateLabel,
    TRUTHFUL,
    sender_expected_utility,
)

FULL = OffPathPolicy.full_punishment()


def panel_a(gamma: float) -> GameParams:
    return GameParams(
        prior=0.587,
        honesty_weight=1.0,
        rating_weight=gamma,
        bias_true=0.114,
        bias_hat_receiver=0.114,
        bias_hat_sender=0.30,
        off_path=FULL,
    )


class TestPureBne:
    def test_small_rating_weight_separating_only(self):
        kinds = {b.kind for b in enumerate_pure_bne(0.587, 1.0, 1.0, 0.114, FULL)}
        assert kinds == {BneKind.SEPARATING}

    def test_large_rating_weight_all_three(self):
        kinds = {b.kind for b in enumerate_pure_bne(0.587, 1.0, 10.0, 0.114, FULL)}
        assert kinds == {BneKind.SEPARATING, BneKind.POOL_H, BneKind.POOL_L}

    def test_pool_high_threshold_at_zero_bias(self):
        # pool-high present iff tau/gamma <= prior under full punishment
        kinds = {b.kind for b in enumerate_pure_bne(0.5, 1.0, 10.0, 0.0, FULL)}
        assert BneKind.POOL_H in kinds
        kinds = {b.kind for b in enumerate_pure_bne(0.05, 1.0, 10.0, 0.0, FULL)}
        assert BneKind.POOL_H not in kinds

    def test_receiver_ratings_separating(self):
        sep = next(b for b in enumerate_pure_bne(0.587, 1.0, 1.0, 0.114, FULL) if b.kind is BneKind.SEPARATING)
        assert sep.receiver.rating_msgH == 1.0
        assert sep.receiver.rating_msgL == pytest.approx(0.943)

    def test_custom_off_path_constrains_pool_high(self):
        # the high-pooling profile needs the off-path low-message rating to
        # leave at least the honesty/rating ratio of headroom
        gamma, tau, prior = 10.0, 1.0, 0.5
        good = OffPathPolicy.custom(0.0, prior - tau / gamma - 0.05)
        bad = OffPathPolicy.custom(0.0, prior - tau / gamma + 0.05)
        kinds = {b.kind for b in enumerate_pure_bne(prior, tau, gamma, 0.0, good)}
        assert BneKind.POOL_H in kinds
        kinds = {b.kind for b in enumerate_pure_bne(prior, tau, gamma, 0.0, bad)}
        assert BneKind.POOL_H not in kinds

    def test_all_emitted_pass_brute_force(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            prior = rng.uniform(0.05, 0.95)
            tau = rng.uniform(0.1, 2.0)
            gamma = rng.uniform(0.0, 30.0)
            lam = rng.uniform(0.0, 1.9)
            params = GameParams(prior, tau, gamma, lam, lam, lam, FULL)
            for b in enumerate_pure_bne(prior, tau, gamma, lam, FULL):
                assert verify_profile(b, params).passed, b.kind


class TestMixedBne:
    def test_ratio_one_empty(self):
        assert mixed_bne(0.5, 1.0, 1.0) == []

    def test_footnote_formula(self):
        mixes = mixed_bne(0.587, 1.0, 10.0)
        hi = next(m for m in mixes if m.kind is MixedKind.MIX_TRUTHFUL_HIGH_STATE)
        assert hi.mix_prob == pytest.approx((0.413 - 0.1) / (0.413 * 0.9), abs=1e-4)
        assert hi.mix_prob == pytest.approx(0.8421, abs=1e-4)
        assert hi.receiver == ReceiverStrategy(0.9, 1.0)

    def test_indifference_in_named_state(self):
        mixes = mixed_bne(0.587, 1.0, 10.0)
        for m in mixes:
            state = m.indifference_state
            u_h = sender_expected_utility(MessageLabel.MSG_H, state, m.receiver, 1.0, 10.0)
            u_l = sender_expected_utility(MessageLabel.MSG_L, state, m.receiver, 1.0, 10.0)
            assert abs(u_h - u_l) < 1e-9

    def test_zero_rating_weight_empty(self):
        assert mixed_bne(0.5, 1.0, 0.0) == []

    def test_nonzero_bias_unsupported(self):
        with pytest.raises(UnsupportedRegimeError):
            mixed_bne(0.5, 1.0, 10.0, bias=0.2)

    def test_sender_strategy_orientation(self):
        mixes = mixed_bne(0.3, 1.0, 10.0)
        for m in mixes:
            s = m.sender
            assert s.prob_msgH_given_high >= s.prob_msgH_given_low


class TestEnumerateMe:
    def test_rows_at_gamma_10(self):
        rows = {m.row for m in enumerate_me(panel_a(10.0))}
        assert rows == {2, 3, 4}

    def test_rows_at_gamma_3(self):
        rows = {m.row for m in enumerate_me(panel_a(3.0))}
        assert rows == {1, 2, 5}

    def test_rows_at_gamma_20(self):
        rows = {m.row for m in enumerate_me(panel_a(20.0))}
        assert rows == {2, 3}

    def test_zero_rating_weight_row_1_only(self):
        rows = {m.row for m in enumerate_me(panel_a(0.0))}
        assert rows == {1}

    def test_row_structure(self):
        for m in enumerate_me(panel_a(10.0)):
            perceived, actual = ME_ROW_STRATEGIES[m.row]
            assert m.perceived_sender == perceived
            assert m.actual_sender == actual
            assert (m.perceived_sender != m.actual_sender) == (m.row >= 4)
            assert min(c.slack for c in m.conditions) >= -1e-9

    def test_collapse_to_bne_when_beliefs_agree(self):
        # equal first-order beliefs: rows 1-3 mirror the BNE kinds, 4-6 vanish
        rng = np.random.default_rng(11)
        kind_of_row = {1: BneKind.SEPARATING, 2: BneKind.POOL_H, 3: BneKind.POOL_L}
        for _ in range(200):
            prior = rng.uniform(0.05, 0.95)
            tau = rng.uniform(0.1, 2.0)
            gamma = rng.uniform(0.0, 30.0)
            lam = rng.uniform(0.0, 1.9)
            params = GameParams(prior, tau, gamma, lam, lam, lam, FULL)
            rows = {m.row for m in enumerate_me(params)}
            kinds = {b.kind for b in enumerate_pure_bne(prior, tau, gamma, lam, FULL)}
            assert {kind_of_row[r] for r in rows if r <= 3} == kinds
            for m in enumerate_me(params):
                if m.row >= 4:
                    assert m.min_slack <= 1e-9  # boundary only

    def test_monotone_in_sender_belief(self):
        # growing the sender's belief shrinks row 1's interval and widens row 4's wedge
        prev_hi = math.inf
        prev_wedge = -math.inf
        for bhs in (0.12, 0.2, 0.3, 0.5, 1.0, 1.9):
            params = GameParams(0.587, 1.0, 10.0, 0.114, 0.114, bhs, FULL)
            region = me_region(params, (0.001, 100.0))
            (lo1, hi1), = region[1]
            assert hi1 <= prev_hi + 1e-12
            prev_hi = hi1
            wedge = bhs / 2.0 - 0.114 / 2.0
            assert wedge >= prev_wedge - 1e-12
            prev_wedge = wedge


class TestVerifyProfile:
    def test_truthful_bne_at_zero_weight_all_gains_zero(self):
        params = panel_a(0.0)
        cand = build_bne_candidate(params, BneKind.SEPARATING)
        report = verify_profile(cand, params)
        assert report.passed
        assert report.clause_i_gain == pytest.approx(0.0, abs=1e-12)
        assert report.clause_iii_gain == pytest.approx(0.0, abs=1e-12)
        assert report.clause_ii_gain <= 0.0 + 1e-12

    def test_corrupted_truthful_actual_inside_window_fails(self):
        # truthful actual sender against the truthful-perception family at
        # gamma=10: deviation gain is gamma*bias_hat_sender/2 - tau
        params = panel_a(10.0)
        cand = build_me_candidate(params, 1)
        report = verify_profile(cand, params)
        assert not report.passed
        assert report.clause_i_gain == pytest.approx(10.0 * 0.30 / 2.0 - 1.0, abs=1e-9)

    def test_every_emitted_me_passes(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            prior = rng.uniform(0.05, 0.95)
            tau = rng.uniform(0.1, 2.0)
            gamma = rng.uniform(0.0, 30.0)
            lam_r = rng.uniform(0.0, 1.9)
            lam_s = rng.uniform(lam_r, 1.9)
            params = GameParams(prior, tau, gamma, lam_r, lam_r, lam_s, FULL)
            for m in enumerate_me(params):
                assert verify_profile(m, params).passed, (m.row, params)

    def test_mixed_candidate_reports_gain_honestly(self):
        # the stated mix puts weight 1 - mix_prob on a message that trails
        # the truthful one by 2*tau in the non-indifferent state
        params = GameParams(0.587, 1.0, 10.0, 0.0, 0.0, 0.0, FULL)
        mix = mixed_bne(0.587, 1.0, 10.0)[0]
        report = verify_profile(mix, params)
        assert not report.passed
        assert report.clause_i_gain == pytest.approx(2.0 * 1.0 * (1.0 - mix.mix_prob), abs=1e-9)

    def test_grid_step_validated(self):
        with pytest.raises(ValueError):
            verify_profile(build_me_candidate(panel_a(1.0), 1), panel_a(1.0), grid_step=0.5)

    def test_malformed_candidate_rejected(self):
        with pytest.raises(ValueError, match="malformed"):
            verify_profile("not a profile", panel_a(1.0))  # type: ignore[arg-type]


class TestOracleEquivalence:
    def test_enumeration_matches_brute_force_sampled(self):
        # reduced-size version of the acceptance property
        rng = np.random.default_rng(23)
        for _ in range(60):
            prior = rng.uniform(0.05, 0.95)
            tau = rng.uniform(0.1, 2.0)
            gamma = rng.uniform(0.0, 30.0)
            a, b = sorted(rng.uniform(0.0, 1.99, size=2))
            params = GameParams(prior, tau, gamma, a, a, b, FULL)
            enumerated = {m.row for m in enumerate_me(params)}
            brute = {
                row
                for row in range(1, 7)
                if verify_profile(build_me_candidate(params, row), params).passed
            }
            assert enumerated == brute, params


class TestMeRegion:
    def test_panel_a_row4_interval(self):
        region = me_region(panel_a(10.0), (0.001, 30.0))
        (lo, hi), = region[4]
        assert lo == pytest.approx(2.0 / 0.30, abs=1e-9)
        assert hi == pytest.approx(2.0 / 0.114, abs=1e-9)
        assert lo == pytest.approx(6.667, abs=1e-3)
        assert hi == pytest.approx(17.544, abs=1e-3)

    def test_panel_a_row1_interval(self):
        region = me_region(panel_a(10.0), (0.001, 30.0))
        (lo, hi), = region[1]
        assert lo == 0.0
        assert hi == pytest.approx(6.6667, abs=1e-3)

    def test_panel_a_row5_interval(self):
        region = me_region(panel_a(10.0), (0.001, 30.0))
        (lo, hi), = region[5]
        assert lo == pytest.approx(1.0 / max(1.0 - 0.587 - 0.057, 0.0), abs=1e-9)
        assert hi == pytest.approx(1.0 / max(1.0 - 0.587 - 0.15, 0.0), abs=1e-9)
        assert lo == pytest.approx(2.809, abs=1e-3)
        assert hi == pytest.approx(3.802, abs=1e-3)

    def test_row6_empty_under_full_punishment(self):
        region = me_region(panel_a(10.0), (0.001, 30.0))
        assert region[6] == []

    def test_row1_interval_abuts_row4(self):
        region = me_region(panel_a(10.0), (0.001, 30.0))
        assert region[1][0][1] == region[4][0][0]

    def test_intervals_match_pointwise_enumeration(self):
        region = me_region(panel_a(10.0), (0.05, 30.0))
        for gamma in np.linspace(0.05, 30.0, 997):
            rows = {m.row for m in enumerate_me(panel_a(float(gamma)))}
            for row in range(1, 7):
                inside = any(lo - 1e-9 <= gamma <= hi + 1e-9 for lo, hi in region[row])
                assert (row in rows) == inside, (row, gamma)

    def test_bne_interval_consistency(self):
        for kind in BneKind:
            ivs = bne_kind_interval(kind, 0.587, 1.0, 0.114, FULL)
            for gamma in (0.5, 2.0, 5.0, 20.0):
                kinds = {b.kind for b in enumerate_pure_bne(0.587, 1.0, gamma, 0.114, FULL)}
                inside = any(lo - 1e-9 <= gamma <= hi + 1e-9 for lo, hi in ivs)
                assert (kind in kinds) == inside


class TestPredictions:
    def test_panel_a_inside_window(self):
        report = check_predictions(panel_a(10.0))
        assert not report.window_empty
        assert report.lying_window[0] == pytest.approx(6.6667, abs=1e-3)
        assert report.lying_window[1] == pytest.approx(17.544, abs=1e-3)
        assert report.incentives_reduce_truth
        assert report.deviation_is_highward
        assert report.no_conditioning_without_incentives

    def test_equal_beliefs_empty_window(self):
        params = GameParams(0.587, 1.0, 10.0, 0.114, 0.114, 0.114, FULL)
        report = check_predictions(params)
        assert report.window_empty
        assert not report.incentives_reduce_truth

    def test_no_conditioning_holds_for_any_gamma_param(self):
        assert check_predictions(panel_a(0.0)).no_conditioning_without_incentives


class TestSerialization:
    def test_document_round_trips_through_json(self):
        doc = equilibrium_document(panel_a(10.0))
        text = json.dumps(doc)
        back = json.loads(text)
        assert back == doc
        assert {m["row"] for m in back["me"]} == {2, 3, 4}
        assert {b["kind"] for b in back["bne"]} == {"separating", "pool_high", "pool_low"}
        for m in back["me"]:
            for cond in m["conditions"]:
                assert set(cond) == {"expr", "slack"}

    def test_mixed_included_at_zero_bias(self):
        params = GameParams(0.587, 1.0, 10.0, 0.0, 0.0, 0.0, FULL)
        doc = equilibrium_document(params)
        assert "mixed_bne" in doc
        assert len(doc["mixed_bne"]) == 2
