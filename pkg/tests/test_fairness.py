import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsample.angles import OptimizerConfig, sweep_p
from fairsample.fairness import (
    RunRecord,
    approximation_ratio,
    build_run_record,
    classify_fair,
    normalized_entropy,
)
from fairsample.ising import decode_sk, spectrum
from fairsample.statevector import MIXER_X


class TestApproximationRatio:
    def test_optimum_is_one(self):
        assert approximation_ratio(-7.0, -7, 9) == 1.0

    def test_worst_is_zero(self):
        assert approximation_ratio(9.0, -7, 9) == 0.0

    def test_midpoint_is_half(self):
        assert approximation_ratio(1.0, -7, 9) == 0.5

    def test_constant_model_rejected(self):
        with pytest.raises(ValueError, match="constant"):
            approximation_ratio(0.0, 3, 3)


class TestNormalizedEntropy:
    def test_uniform_is_one(self):
        assert normalized_entropy([0.1, 0.1, 0.1, 0.1]) == pytest.approx(1.0, abs=1e-12)

    def test_point_mass_is_zero(self):
        assert normalized_entropy([0.0, 0.0, 0.37, 0.0, 0.0, 0.0]) == 0.0

    def test_hand_computed_three_state_split(self):
        expected = 1.5 * math.log(2) / math.log(3)
        assert normalized_entropy([0.5, 0.25, 0.25]) == pytest.approx(expected, abs=1e-12)

    def test_no_mass_rejected(self):
        with pytest.raises(ValueError, match="undefined"):
            normalized_entropy([0.0, 0.0])

    def test_single_state_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            normalized_entropy([1.0])

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            normalized_entropy([0.5, -0.1])

    @settings(max_examples=50)
    @given(
        st.lists(st.floats(1e-6, 1.0, allow_nan=False), min_size=2, max_size=10),
        st.floats(1e-3, 1e3),
        st.randoms(use_true_random=False),
    )
    def test_permutation_and_scale_invariance(self, probs, scale, rnd):
        h = normalized_entropy(probs)
        shuffled = list(probs)
        rnd.shuffle(shuffled)
        assert normalized_entropy(shuffled) == pytest.approx(h, abs=1e-12)
        assert normalized_entropy([scale * q for q in probs]) == pytest.approx(h, abs=1e-9)
        assert 0.0 <= h <= 1.0


class TestClassifyFair:
    def test_all_ones_is_fair(self):
        assert classify_fair([1.0, 1.0, 1.0])

    def test_eight_decimal_miss_is_unfair(self):
        assert not classify_fair([1.0, 0.99999999])

    def test_rounding_boundary_is_fair(self):
        assert classify_fair([1.0 - 1e-10])

    def test_empty_trace_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            classify_fair([])


@pytest.fixture(scope="module")
def record():
    model = decode_sk(103)
    spec = spectrum(model)
    sweep = sweep_p(model, MIXER_X, OptimizerConfig(bh_iters=4, seed=2, p_max=3), spec=spec)
    return build_run_record("sk-103", spec, MIXER_X, sweep)


class TestRunRecord:
    def test_proportions_sum_to_one(self, record):
        for step in record.steps:
            assert sum(step.gs_proportions) == pytest.approx(1.0, abs=1e-10)

    def test_metrics_in_range(self, record):
        for step in record.steps:
            assert 0.0 <= step.approximation_ratio <= 1.0
            assert 0.0 <= step.entropy_normalized <= 1.0
            assert len(step.gs_probabilities) == record.degeneracy

    def test_dict_round_trip(self, record):
        assert RunRecord.from_dict(record.to_dict()) == record

    def test_sk_code_parsing(self, record):
        assert record.sk_code() == 103

    def test_validation_catches_bad_proportions(self, record):
        data = record.to_dict()
        data["steps"][0]["gs_proportions"] = [0.9, 0.9]
        with pytest.raises(ValueError, match="malformed|sum"):
            RunRecord.from_dict(data)

    def test_validation_catches_bad_ratio(self, record):
        data = record.to_dict()
        data["steps"][0]["approximation_ratio"] = 1.7
        with pytest.raises(ValueError):
            RunRecord.from_dict(data)

    def test_non_degenerate_model_has_null_entropy(self):
        model = decode_sk(11)
        spec = spectrum(model)
        assert spec.degeneracy == 1
        sweep = sweep_p(model, MIXER_X, OptimizerConfig(bh_iters=4, seed=2, p_max=2), spec=spec)
        record = build_run_record("sk-11", spec, MIXER_X, sweep)
        assert record.fair is None
        assert all(s.entropy_normalized is None for s in record.steps)
        assert RunRecord.from_dict(record.to_dict()) == record
