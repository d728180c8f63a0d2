"""Rule-base types, inference, and the JSON document round-trip."""

import json
import math

import numpy as np
import pytest

from countermachine import (
    DimensionMismatch,
    FeatureVector,
    LabelEncoding,
    MalformedModel,
    MembershipFunction,
    Rule,
    TskModel,
    classify,
    evaluate,
    evaluate_full,
    firing_strengths,
    mf_value,
)
from countermachine.fuzzy import dumps_model, loads_model, model_from_dict, model_to_dict

from conftest import (
    FIXTURE_MFS,
    FIXTURE_RULES,
    make_model,
    oracle_evaluate,
    oracle_firing,
    random_model_spec,
)


class TestMembership:
    def test_value_at_center_is_one(self):
        assert mf_value(MembershipFunction(0.5, 0.2), 0.5) == 1.0
        assert mf_value(MembershipFunction(0.0, 1.0), 0.0) == 1.0

    def test_half_width_gaussian(self):
        # frozen from a hand computation of exp(-0.5)
        got = mf_value(MembershipFunction(0.0, 0.5), 0.5)
        assert got == pytest.approx(0.6065306597126334, abs=1e-15)

    def test_positive_and_bounded_on_domain(self, rng):
        # widths below ~0.03 can underflow exp() to 0.0 at the far corner,
        # so the open lower bound is a [0,1]-domain property
        for _ in range(200):
            mf = MembershipFunction(float(rng.uniform(0, 1)), float(rng.uniform(0.05, 2)))
            v = mf_value(mf, float(rng.uniform(0, 1)))
            assert 0.0 < v <= 1.0

    def test_rejects_nonpositive_width(self):
        with pytest.raises(MalformedModel):
            MembershipFunction(0.5, 0.0)
        with pytest.raises(MalformedModel):
            MembershipFunction(0.5, -0.1)


class TestFiringStrengths:
    def test_single_input_center_hit(self):
        model = make_model([[(0.3, 0.1)]], [((0,), (0.0, 0.0))])
        np.testing.assert_array_equal(firing_strengths(model, [0.3]), [1.0])

    def test_two_center_hits_product_one(self):
        model = make_model(
            [[(0.2, 0.3)], [(0.7, 0.2)]], [((0, 0), (0.0, 0.0, 0.0))]
        )
        np.testing.assert_array_equal(firing_strengths(model, [0.2, 0.7]), [1.0])

    def test_fixture_matches_frozen_oracle(self, fixture_model):
        # frozen output of the standalone brute-force recomputation
        expected = [
            0.4040365236633422,
            0.6111902834361934,
            0.09060462669168035,
            0.13705856828542673,
        ]
        got = firing_strengths(fixture_model, [0.35, 0.6])
        np.testing.assert_allclose(got, expected, rtol=0, atol=1e-15)

    def test_dimension_mismatch(self, fixture_model):
        with pytest.raises(DimensionMismatch):
            firing_strengths(fixture_model, [0.1, 0.2, 0.3])

    def test_strictly_positive(self, rng):
        for _ in range(50):
            mfs, rules, model = random_model_spec(rng)
            x = rng.uniform(0, 1, model.n_inputs)
            assert np.all(firing_strengths(model, x) > 0.0)


class TestEvaluate:
    def test_single_constant_rule(self, rng):
        model = make_model([[(0.4, 0.2)]], [((0,), (0.7, 0.0))])
        for _ in range(10):
            assert evaluate(model, [float(rng.uniform(0, 1))]) == pytest.approx(0.7)

    def test_symmetric_two_rule_midpoint(self):
        model = make_model(
            [[(0.0, 0.5), (1.0, 0.5)]],
            [((0,), (0.0, 0.0)), ((1,), (1.0, 0.0))],
        )
        assert evaluate(model, [0.5]) == pytest.approx(0.5, abs=1e-12)

    def test_fixture_matches_frozen_oracle(self, fixture_model):
        assert evaluate(fixture_model, [0.35, 0.6]) == pytest.approx(
            0.5527617955557076, abs=1e-14
        )

    def test_oracle_equivalence_random_models(self, rng):
        for _ in range(100):
            mfs, rules, model = random_model_spec(rng)
            x = rng.uniform(0, 1, model.n_inputs)
            assert evaluate(model, x) == pytest.approx(
                oracle_evaluate(mfs, rules, list(x)), abs=1e-9
            )

    def test_reordering_rules_preserves_output(self, rng):
        for _ in range(20):
            mfs, rules, model = random_model_spec(rng, max_rules=6)
            perm = list(rng.permutation(len(rules)))
            model_perm = make_model(mfs, [rules[i] for i in perm])
            x = rng.uniform(0, 1, model.n_inputs)
            assert evaluate(model, x) == pytest.approx(evaluate(model_perm, x), abs=1e-12)

    def test_duplicating_rules_preserves_output(self, rng):
        for _ in range(20):
            mfs, rules, model = random_model_spec(rng, max_rules=5)
            model_dup = make_model(mfs, rules + rules)
            x = rng.uniform(0, 1, model.n_inputs)
            assert evaluate(model, x) == pytest.approx(evaluate(model_dup, x), abs=1e-12)

    def test_constant_consequents_convex_bound(self, rng):
        for _ in range(30):
            mfs, rules, model = random_model_spec(rng, constant_only=True)
            x = rng.uniform(0, 1, model.n_inputs)
            consts = [coeffs[0] for _, coeffs in rules]
            y = evaluate(model, x)
            assert min(consts) - 1e-12 <= y <= max(consts) + 1e-12

    def test_determinism(self, fixture_model):
        x = [0.123456, 0.654321]
        first = evaluate(fixture_model, x)
        assert all(evaluate(fixture_model, x) == first for _ in range(5))

    def test_degenerate_activation_flagged(self):
        model = make_model([[(0.0, 1e-3)]], [((0,), (0.4, 0.0))])
        res = evaluate_full(model, [1.0])
        assert res.degenerate
        assert res.total_firing < 1e-12
        assert math.isfinite(res.y)
        healthy = evaluate_full(model, [0.0])
        assert not healthy.degenerate
        assert healthy.y == pytest.approx(0.4)


class TestClassify:
    def test_endpoints_and_tie(self):
        # single constant rule pins the output exactly
        for const, expected in [(1.0, "war"), (0.0, "peace"), (0.5, "war")]:
            model = make_model([[(0.5, 0.3)]], [((0,), (const, 0.0))])
            assert classify(model, [0.5]) == expected

    def test_inverted_encoding(self):
        enc = LabelEncoding(war=0.0, peace=1.0, threshold=0.5)
        model = make_model([[(0.5, 0.3)]], [((0,), (0.2, 0.0))], encoding=enc)
        assert classify(model, [0.5]) == "war"


class TestFeatureVector:
    def test_roundtrip(self):
        fv = FeatureVector((0.0, 0.5, 1.0))
        assert len(fv) == 3
        np.testing.assert_array_equal(fv.as_array(), [0.0, 0.5, 1.0])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            FeatureVector((0.1, 1.2))
        with pytest.raises(ValueError):
            FeatureVector((-0.1,))
        with pytest.raises(ValueError):
            FeatureVector((float("nan"),))


class TestModelValidation:
    def test_requires_rules(self):
        with pytest.raises(MalformedModel):
            make_model([[(0.5, 0.2)]], [])

    def test_requires_unique_names(self):
        with pytest.raises(MalformedModel):
            make_model(
                [[(0.5, 0.2)], [(0.5, 0.2)]],
                [((0, 0), (0.0, 0.0, 0.0))],
                feature_names=("a", "a"),
            )

    def test_rejects_bad_rule_index(self):
        with pytest.raises(MalformedModel):
            make_model([[(0.5, 0.2)]], [((1,), (0.0, 0.0))])

    def test_rejects_coeff_length(self):
        with pytest.raises(MalformedModel):
            Rule((0, 1), (0.0, 0.0))


class TestSerialization:
    def test_round_trip_identical_evaluations(self, fixture_model, rng):
        doc = json.loads(dumps_model(fixture_model))
        restored = model_from_dict(doc)
        for _ in range(100):
            x = rng.uniform(0, 1, 2)
            assert evaluate(restored, x) == evaluate(fixture_model, x)

    def test_file_round_trip(self, fixture_model, tmp_path, rng):
        from countermachine import load_model, save_model

        path = tmp_path / "m.json"
        save_model(fixture_model, path)
        restored = load_model(path)
        x = rng.uniform(0, 1, 2)
        assert evaluate(restored, x) == evaluate(fixture_model, x)
        assert restored.feature_names == fixture_model.feature_names

    def test_version_pinned(self, fixture_model):
        doc = model_to_dict(fixture_model)
        assert doc["version"] == 1
        doc["version"] = 2
        with pytest.raises(MalformedModel):
            model_from_dict(doc)

    def test_nonpositive_width_rejected(self, fixture_model):
        doc = model_to_dict(fixture_model)
        doc["mfs"][0][0]["width"] = 0.0
        with pytest.raises(MalformedModel):
            model_from_dict(doc)
        doc["mfs"][0][0]["width"] = -1.0
        with pytest.raises(MalformedModel):
            model_from_dict(doc)

    def test_rule_index_out_of_range_rejected(self, fixture_model):
        doc = model_to_dict(fixture_model)
        doc["rules"][0]["mf_indices"] = [5, 0]
        with pytest.raises(MalformedModel):
            model_from_dict(doc)

    def test_missing_field_rejected(self, fixture_model):
        doc = model_to_dict(fixture_model)
        del doc["rules"]
        with pytest.raises(MalformedModel):
            model_from_dict(doc)

    def test_not_json_rejected(self):
        with pytest.raises(MalformedModel):
            loads_model("{not json")
