import math
from itertools import product

import numpy as np
import pytest

from multidetect.errors import NoDiscriminationError
from multidetect.experiment import ExperimentSummary, summarize, TrialRecord
from multidetect.inference import (
    DECISION_BINOMIAL,
    DECISION_INCONCLUSIVE,
    DECISION_UNANIMOUS,
    ErrorModel,
    decide,
    loglik_binomial,
    loglik_unanimous,
    required_trials,
)
from multidetect.scenarios import sample_binomial_trial, sample_unanimous
from multidetect.state import OutcomeProbabilities

P_HALF = OutcomeProbabilities(0.5)
NO_ERR = ErrorModel.ideal(2)


def patterns_to_records(patterns):
    return [
        TrialRecord(index=i, latent=None, raw_readings=tuple(map(float, p)), outcomes=tuple(p))
        for i, p in enumerate(patterns)
    ]


def enumerate_pattern_prob_unanimous(pattern, probs, eps):
    """Oracle: explicit sum over the shared latent bit."""
    total = 0.0
    for sigma, p_sigma in ((0, probs.p0), (1, probs.p1)):
        term = p_sigma
        for o, e in zip(pattern, eps):
            term *= e if o != sigma else 1 - e
        total += term
    return total


def enumerate_pattern_prob_binomial(pattern, probs, eps):
    """Oracle: explicit sum over one latent bit per detector."""
    total = 0.0
    for latents in product((0, 1), repeat=len(pattern)):
        term = 1.0
        for o, s, e in zip(pattern, latents, eps):
            term *= (probs.p0 if s == 0 else probs.p1) * (e if o != s else 1 - e)
        total += term
    return total


class TestLoglikUnanimous:
    def test_closed_form_without_misreads(self):
        probs = OutcomeProbabilities(0.36)
        data = [(0, 0)] * 30 + [(1, 1)] * 70
        expected = 30 * math.log(0.36) + 70 * math.log(0.64)
        assert loglik_unanimous(data, probs, NO_ERR) == pytest.approx(expected, rel=1e-12)

    def test_mixed_trial_forbidden_without_misreads(self):
        assert loglik_unanimous([(0, 0), (0, 1)], P_HALF, NO_ERR) == -math.inf

    def test_mixed_trial_with_misreads(self):
        err = ErrorModel([0.01, 0.01])
        # sum over the shared bit: 0.5*(0.99*0.01) + 0.5*(0.01*0.99) = 0.0099
        got = loglik_unanimous([(0, 1)], P_HALF, err)
        assert got == pytest.approx(math.log(0.0099), rel=1e-12)

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(51)
        for _ in range(100):
            probs = OutcomeProbabilities(float(rng.uniform(0.05, 0.95)))
            err = ErrorModel(rng.uniform(0.0, 0.4, size=3))
            pattern = tuple(rng.integers(0, 2, size=3))
            oracle = math.log(enumerate_pattern_prob_unanimous(pattern, probs, err.eps))
            assert loglik_unanimous([pattern], probs, err) == pytest.approx(oracle, rel=1e-12)


class TestLoglikBinomial:
    def test_pattern_products(self):
        probs = OutcomeProbabilities(0.36)
        assert loglik_binomial([(0, 1)], probs, NO_ERR) == pytest.approx(
            math.log(0.36 * 0.64), rel=1e-12
        )
        assert loglik_binomial([(0, 0)], probs, NO_ERR) == pytest.approx(
            2 * math.log(0.36), rel=1e-12
        )

    def test_summary_bookkeeping_matches_enumerated_patterns(self):
        # records path: sum of per-pattern logs; summary path adds the
        # hypothesis-independent choose(N, N0) multiplicity per trial
        probs = OutcomeProbabilities(0.36)
        patterns = [(0, 0)] * 5 + [(1, 1)] * 7 + [(0, 1)] * 2 + [(1, 0)] * 3
        records = patterns_to_records(patterns)
        summary = summarize(records)
        m0, m1, m = 5, 7, 5
        closed_form = (
            m0 * 2 * math.log(probs.p0)
            + m1 * 2 * math.log(probs.p1)
            + m * math.log(probs.p0 * probs.p1)
            + m * math.log(2)
        )
        assert loglik_binomial(summary, probs, NO_ERR) == pytest.approx(closed_form, rel=1e-12)
        assert loglik_binomial(records, probs, NO_ERR) == pytest.approx(
            closed_form - m * math.log(2), rel=1e-12
        )

    def test_misread_absorption_identity(self):
        rng = np.random.default_rng(52)
        for _ in range(100):
            probs = OutcomeProbabilities(float(rng.uniform(0.05, 0.95)))
            eps = float(rng.uniform(0.0, 0.45))
            err = ErrorModel([eps, eps])
            for pattern in product((0, 1), repeat=2):
                oracle = enumerate_pattern_prob_binomial(pattern, probs, err.eps)
                p_eff = probs.p0 * (1 - eps) + probs.p1 * eps
                absorbed = math.prod(p_eff if o == 0 else 1 - p_eff for o in pattern)
                assert absorbed == pytest.approx(oracle, rel=1e-12)
                assert loglik_binomial([pattern], probs, err) == pytest.approx(
                    math.log(oracle), rel=1e-12
                )


class TestPathConsistency:
    def test_summary_and_records_give_same_log_odds(self):
        rng = np.random.default_rng(53)
        probs = OutcomeProbabilities(0.36)
        err = ErrorModel([0.02, 0.02])
        patterns = [sample_binomial_trial(probs, 2, rng).outcomes for _ in range(400)]
        records = patterns_to_records(patterns)
        summary = summarize(records)
        odds_records = loglik_unanimous(records, probs, err) - loglik_binomial(
            records, probs, err
        )
        odds_summary = loglik_unanimous(summary, probs, err) - loglik_binomial(
            summary, probs, err
        )
        assert odds_summary == pytest.approx(odds_records, rel=1e-10)

    def test_summary_path_needs_uniform_misreads(self):
        summary = ExperimentSummary(
            n_trials=1, n_detectors=2, m0_unanimous_zero=1, m1_unanimous_one=0,
            disagreements=0, histogram_n0=(0, 0, 1), agreement_fraction=1.0,
        )
        with pytest.raises(ValueError):
            loglik_unanimous(summary, P_HALF, ErrorModel([0.0, 0.1]))


class TestDecide:
    def test_unanimous_data_decides_unanimous(self):
        data = [(0, 0)] * 40 + [(1, 1)] * 60
        verdict = decide(data, P_HALF, NO_ERR)
        assert verdict.decision == DECISION_UNANIMOUS
        assert verdict.log_odds == pytest.approx(100 * math.log(2), rel=1e-12)
        assert verdict.confidence > 0.999

    def test_forbidden_pattern_decides_binomial_with_certainty(self):
        data = [(0, 0)] * 10 + [(0, 1)]
        verdict = decide(data, P_HALF, NO_ERR)
        assert verdict.decision == DECISION_BINOMIAL
        assert verdict.loglik_unanimous == -math.inf
        assert verdict.confidence == 1.0

    def test_split_data_decides_binomial(self):
        rng = np.random.default_rng(54)
        data = [sample_binomial_trial(P_HALF, 2, rng).outcomes for _ in range(100)]
        verdict = decide(data, P_HALF, ErrorModel([0.01, 0.01]))
        assert verdict.decision == DECISION_BINOMIAL
        assert math.isfinite(verdict.log_odds)

    def test_small_sample_near_basis_state_is_inconclusive(self):
        probs = OutcomeProbabilities(0.99)
        m = required_trials(probs, 0.001) - 1
        data = [(0, 0)] * m
        verdict = decide(data, probs, NO_ERR)
        assert verdict.decision == DECISION_INCONCLUSIVE

    def test_impossible_under_both_is_inconclusive(self):
        probs = OutcomeProbabilities(1.0)
        verdict = decide([(1, 1)], probs, NO_ERR)
        assert verdict.decision == DECISION_INCONCLUSIVE
        assert verdict.confidence == 0.5

    def test_prior_shifts_odds(self):
        data = [(0, 0)] * 3
        with_prior = decide(data, P_HALF, NO_ERR, prior_log_odds=1.5)
        without = decide(data, P_HALF, NO_ERR)
        assert with_prior.log_odds == pytest.approx(without.log_odds + 1.5, rel=1e-12)

    def test_threshold_validated(self):
        with pytest.raises(ValueError):
            decide([(0, 0)], P_HALF, NO_ERR, log_odds_threshold=0.0)

    def test_scenario1_never_loses_to_binomial_without_misreads(self):
        rng = np.random.default_rng(55)
        for p0 in (0.2, 0.5, 0.8):
            probs = OutcomeProbabilities(p0)
            data = [sample_unanimous(probs, 2, rng).outcomes for _ in range(50)]
            llu = loglik_unanimous(data, probs, NO_ERR)
            llb = loglik_binomial(data, probs, NO_ERR)
            assert llu > llb  # strict for 0 < p0 < 1


class TestRequiredTrials:
    def test_symmetric_state_reference(self):
        assert required_trials(P_HALF, math.exp(-1)) == 2

    def test_alpha_one_floor(self):
        assert required_trials(P_HALF, 1.0) == 1

    def test_near_basis_state_value(self):
        probs = OutcomeProbabilities(0.99)
        # independent oracle: walk the zero-disagreement probability down
        q = 2 * 0.99 * 0.01
        m, survival = 0, 1.0
        while survival > 0.001:
            survival *= 1 - q
            m += 1
        assert required_trials(probs, 0.001) == m
        assert m == math.ceil(math.log(0.001) / math.log(1 - q))

    def test_asymptotic_scaling(self):
        # M ~ ln(1/alpha)/(2 p0 p1) once the state is nearly a basis state
        for target in (0.01, 0.005, 0.001):
            p0 = (1 + math.sqrt(1 - 4 * target)) / 2  # p0*p1 = target
            probs = OutcomeProbabilities(p0)
            for alpha in (0.01, 0.001):
                m = required_trials(probs, alpha)
                ratio = m * 2 * probs.p0 * probs.p1 / math.log(1 / alpha)
                assert ratio == pytest.approx(1.0, abs=0.05)

    def test_monotone_in_overlap_and_alpha(self):
        values = [
            required_trials(OutcomeProbabilities(p0), 0.01) for p0 in (0.5, 0.7, 0.9, 0.99)
        ]
        assert values == sorted(values)
        alphas = [required_trials(P_HALF, a) for a in (0.2, 0.1, 0.01, 0.001)]
        assert alphas == sorted(alphas)

    def test_misreads_increase_requirement_toward_half(self):
        # misreads push the effective split toward 1/2, which *lowers* M for
        # skewed states: the adjusted disagreement rate grows
        probs = OutcomeProbabilities(0.99)
        base = required_trials(probs, 0.01)
        noisy = required_trials(probs, 0.01, ErrorModel([0.1, 0.1]))
        assert noisy < base

    def test_no_discrimination(self):
        with pytest.raises(NoDiscriminationError):
            required_trials(OutcomeProbabilities(1.0), 0.01)

    def test_alpha_bounds(self):
        with pytest.raises(ValueError):
            required_trials(P_HALF, 0.0)
        with pytest.raises(ValueError):
            required_trials(P_HALF, 1.5)


class TestCalibration:
    def test_decisions_track_generating_scenario(self):
        rng = np.random.default_rng(56)
        reps = 300
        for p0 in (0.5, 0.9):
            probs = OutcomeProbabilities(p0)
            m = required_trials(probs, 0.01)
            wrong_unanimous = wrong_binomial = 0
            for _ in range(reps):
                data_u = [sample_unanimous(probs, 2, rng).outcomes for _ in range(m)]
                if decide(data_u, probs, NO_ERR).decision == DECISION_BINOMIAL:
                    wrong_unanimous += 1
                data_b = [sample_binomial_trial(probs, 2, rng).outcomes for _ in range(m)]
                if decide(data_b, probs, NO_ERR).decision == DECISION_UNANIMOUS:
                    wrong_binomial += 1
            assert wrong_unanimous / reps <= 0.02
            assert wrong_binomial / reps <= 0.02


class TestErrorModel:
    def test_rejects_anticorrelated_detectors(self):
        with pytest.raises(ValueError):
            ErrorModel([0.5, 0.1])
        with pytest.raises(ValueError):
            ErrorModel([-0.01, 0.1])

    def test_uniform_detection(self):
        assert ErrorModel([0.1, 0.1]).uniform_eps == 0.1
        assert ErrorModel([0.1, 0.2]).uniform_eps is None
