import math
import random

import pytest

import mecode as mc
from mecode.costmodel import assign_to_symbols
from mecode.errors import ValidationError


class TestCostModel:
    def test_gamma_five(self):
        cm = mc.CostModel(1, 5, 1, 1)
        assert cm.gamma == 5.0
        assert not cm.gamma_is_infinite
        assert cm.delta_beta == 4.0

    def test_symmetric(self):
        cm = mc.CostModel(1, 1, 1, 1)
        assert cm.gamma == 1.0

    def test_zero_beta0_flags_infinite(self):
        cm = mc.CostModel(0, 3, 1, 1)
        assert cm.gamma_is_infinite
        assert math.isinf(cm.gamma)

    def test_swap_normalizes_and_records(self):
        cm = mc.CostModel(5, 1, 2, 3)
        assert (cm.beta0, cm.beta1) == (1.0, 5.0)
        # durations travel with their bit role
        assert (cm.t0, cm.t1) == (3.0, 2.0)
        assert cm.swapped

    @pytest.mark.parametrize(
        "kwargs,field",
        [
            (dict(beta0=-1, beta1=1, t0=1, t1=1), "beta0"),
            (dict(beta0=0, beta1=0, t0=1, t1=1), "beta1"),
            (dict(beta0=0, beta1=1, t0=0, t1=1), "t0"),
            (dict(beta0=0, beta1=1, t0=1, t1=-2), "t1"),
            (dict(beta0=math.nan, beta1=1, t0=1, t1=1), "beta0"),
            (dict(beta0=0, beta1=math.inf, t0=1, t1=1), "beta1"),
        ],
    )
    def test_validation_names_field(self, kwargs, field):
        with pytest.raises(ValidationError, match=field):
            mc.CostModel(**kwargs)

    def test_gamma_at_least_one_after_normalization(self):
        rng = random.Random(3)
        for _ in range(200):
            b0 = rng.uniform(0, 10)
            b1 = rng.uniform(0.01, 10)
            cm = mc.CostModel(b0, b1, 1, 1)
            assert cm.gamma >= 1.0

    def test_model_from_gamma(self):
        assert mc.model_from_gamma(5.0).beta1 == 5.0
        assert mc.model_from_gamma(math.inf).gamma_is_infinite
        with pytest.raises(ValidationError):
            mc.model_from_gamma(0.5)

    def test_json_round_trip(self):
        for cm in (mc.CostModel(1, 5, 1, 1), mc.CostModel(5, 1, 2, 3)):
            assert mc.cost_model_from_json(mc.cost_model_to_json(cm)) == cm

    def test_json_rejects_unknown_fields(self):
        with pytest.raises(ValidationError, match="unknown"):
            mc.cost_model_from_json('{"beta0":1,"beta1":5,"t0":1,"t1":1,"x":2}')
        with pytest.raises(ValidationError, match="missing"):
            mc.cost_model_from_json('{"beta0":1,"beta1":5}')
        with pytest.raises(ValidationError, match="malformed"):
            mc.cost_model_from_json("{nope")


class TestSymbolSource:
    @pytest.mark.parametrize("m,p", [(8, 0.125), (2, 0.5), (128, 1.0 / 128)])
    def test_uniform(self, m, p):
        src = mc.uniform_source(m)
        assert src.m == m
        assert all(abs(x - p) < 1e-15 for x in src.probs)
        assert src.is_uniform

    def test_uniform_rejects_small_m(self):
        with pytest.raises(ValidationError, match="m"):
            mc.uniform_source(1)

    def test_sorted_ascending_with_original_order(self):
        src = mc.symbol_source([0.5, 0.1, 0.4])
        assert src.probs == (0.1, 0.4, 0.5)
        assert src.order == (1, 2, 0)
        assert src.probs_by_symbol() == (0.5, 0.1, 0.4)
        assert src.ranks_by_probability() == (0, 2, 1)

    def test_sum_tolerance(self):
        with pytest.raises(ValidationError, match="sum"):
            mc.symbol_source([0.5, 0.499])
        mc.symbol_source([0.5, 0.5 - 5e-10])  # inside the tolerance

    def test_negative_prob_rejected(self):
        with pytest.raises(ValidationError, match="probs\\[1\\]"):
            mc.symbol_source([1.1, -0.1])

    def test_json_round_trip(self):
        src = mc.symbol_source([0.5, 0.1, 0.4])
        again = mc.source_from_json(mc.source_to_json(src))
        assert again == src
        with pytest.raises(ValidationError, match="unknown"):
            mc.source_from_json('{"probs":[0.5,0.5],"m":2}')


class TestCodewordCost:
    def test_examples(self, gamma5):
        assert mc.codeword_cost("000", gamma5) == 3.0
        assert mc.codeword_cost("11", gamma5) == 10.0
        assert mc.codeword_cost("0001", gamma5) == 8.0

    def test_duration_examples(self):
        cm = mc.CostModel(1, 5, 1, 1)
        assert mc.codeword_duration("01", cm) == 2.0
        cm2 = mc.CostModel(1, 5, 1, 2)
        assert mc.codeword_duration("01", cm2) == 3.0
        assert mc.codeword_duration("1000000", cm) == 7.0

    def test_empty_codeword_rejected(self, gamma5):
        with pytest.raises(ValidationError):
            mc.codeword_cost("", gamma5)

    def test_additive_under_concatenation(self, gamma5):
        rng = random.Random(11)
        for _ in range(100):
            a = "".join(rng.choice("01") for _ in range(rng.randint(1, 12)))
            b = "".join(rng.choice("01") for _ in range(rng.randint(1, 12)))
            assert mc.codeword_cost(a + b, gamma5) == pytest.approx(
                mc.codeword_cost(a, gamma5) + mc.codeword_cost(b, gamma5), rel=1e-15
            )

    def test_permutation_invariant(self, gamma5):
        rng = random.Random(12)
        for _ in range(100):
            word = [rng.choice("01") for _ in range(rng.randint(1, 16))]
            shuffled = word[:]
            rng.shuffle(shuffled)
            assert mc.codeword_cost("".join(word), gamma5) == mc.codeword_cost(
                "".join(shuffled), gamma5
            )

    def test_symmetric_model_cost_is_length(self):
        cm = mc.CostModel(2.5, 2.5, 1, 1)
        rng = random.Random(13)
        for _ in range(50):
            word = "".join(rng.choice("01") for _ in range(rng.randint(1, 20)))
            assert mc.codeword_cost(word, cm) == 2.5 * len(word)


class TestAssignment:
    def test_cheapest_to_most_probable(self):
        src = mc.symbol_source([0.2, 0.5, 0.3])
        entries = assign_to_symbols(["a", "b", "c"], src)
        # probability order is symbol 1, symbol 2, symbol 0
        assert entries == ("c", "a", "b")

    def test_uniform_ties_keep_symbol_order(self):
        src = mc.uniform_source(3)
        assert assign_to_symbols(["a", "b", "c"], src) == ("a", "b", "c")

    def test_wrong_count_rejected(self):
        with pytest.raises(ValidationError, match="words"):
            assign_to_symbols(["a"], mc.uniform_source(2))
