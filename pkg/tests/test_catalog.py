"""Rule/practice registry shape, category distributions, agreement stats."""

from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leaklint import (
    EmptyInput,
    LengthMismatch,
    UnknownRule,
    category_distribution,
    cohen_kappa,
    explain,
    observed_agreement,
)


def rules_by_side(catalog):
    pytorch = [r for r in catalog.rules if r.id.startswith("PT-")]
    tfkeras = [r for r in catalog.rules if r.id.startswith("TK-")]
    return pytorch, tfkeras


class TestCatalogShape:
    def test_total_and_side_counts(self, catalog):
        pytorch, tfkeras = rules_by_side(catalog)
        assert len(catalog.rules) == 46
        assert len(pytorch) == 30
        assert len(tfkeras) == 16

    def test_rule_ids_are_sequential_and_unique(self, catalog):
        pytorch, tfkeras = rules_by_side(catalog)
        assert [r.id for r in pytorch] == [f"PT-{i:02d}" for i in range(1, 31)]
        assert [r.id for r in tfkeras] == [f"TK-{i:02d}" for i in range(1, 17)]

    def test_rule_names_unique_and_nonempty(self, catalog):
        names = [r.name for r in catalog.rules]
        assert all(names)
        assert len(set(names)) == len(names)

    def test_pytorch_tag_split(self, catalog):
        pytorch, _ = rules_by_side(catalog)
        tags = Counter(r.tag.value for r in pytorch)
        assert tags == {"G": 21, "P": 9}

    def test_tfkeras_tag_split(self, catalog):
        _, tfkeras = rules_by_side(catalog)
        tags = Counter(r.tag.value for r in tfkeras)
        assert tags == {"G": 7, "T": 4, "K": 1, "TK": 4}

    def test_practice_counts(self, catalog):
        assert len(catalog.practices) == 50
        prefixes = Counter(p.id[0] for p in catalog.practices)
        assert prefixes == {"P": 30, "T": 15, "K": 5}

    def test_rules_and_practices_form_a_cover(self, catalog):
        known = {p.id for p in catalog.practices}
        used = set()
        for rule in catalog.rules:
            assert rule.practices, f"{rule.id} has no practice"
            assert set(rule.practices) <= known
            used.update(rule.practices)
        assert used == known

    def test_default_disabled_rules(self, catalog):
        off = {r.id for r in catalog.rules if not r.default_enabled}
        assert off == {"PT-22", "TK-14"}

    def test_every_rule_has_trigger_and_message(self, catalog):
        for rule in catalog.rules:
            assert rule.trigger
            assert rule.message
            assert rule.frameworks
            assert rule.confidence.value in {"high", "medium", "low"}

    def test_framework_side_sets(self, catalog):
        assert catalog.tensorflow_side == tuple(f"TK-{i:02d}" for i in range(1, 13))
        assert catalog.keras_side == ("TK-01", "TK-03", "TK-13", "TK-14", "TK-15", "TK-16")


class TestDistributions:
    def test_pytorch_distribution(self, catalog):
        rows = [tuple(r) for r in category_distribution(catalog, "pytorch")]
        assert rows == [
            ("ResourceManagement", 16, 53),
            ("GraphAndGradient", 8, 27),
            ("TrainingPipeline", 4, 13),
            ("LoopLifecycle", 2, 7),
        ]

    def test_tensorflow_distribution(self, catalog):
        rows = [tuple(r) for r in category_distribution(catalog, "tensorflow")]
        assert rows == [
            ("ResourceManagement", 6, 50),
            ("FrameworkAbstraction", 2, 17),
            ("GraphManagement", 2, 17),
            ("TrainingPipeline", 2, 17),
        ]

    def test_keras_distribution(self, catalog):
        rows = [tuple(r) for r in category_distribution(catalog, "keras")]
        assert rows == [
            ("ResourceManagement", 2, 33),
            ("TrainingPipeline", 2, 33),
            ("EnvironmentConfig", 1, 17),
            ("FrameworkAbstraction", 1, 17),
        ]

    def test_percent_uses_round_half_up(self, catalog):
        for side in ("pytorch", "tensorflow", "keras"):
            rows = category_distribution(catalog, side)
            total = sum(row.count for row in rows)
            for row in rows:
                exact = 100 * row.count / total
                # round-half-up on the exact fraction
                expected = int(exact + 0.5)
                assert row.percent == expected

    def test_counts_sum_to_side_totals(self, catalog):
        assert sum(r.count for r in category_distribution(catalog, "pytorch")) == 30
        assert sum(r.count for r in category_distribution(catalog, "tensorflow")) == 12
        assert sum(r.count for r in category_distribution(catalog, "keras")) == 6

    def test_unknown_side_rejected(self, catalog):
        with pytest.raises(ValueError):
            category_distribution(catalog, "mxnet")


class TestObservedAgreement:
    def test_exact_fraction(self):
        a = list(range(46))
        b = list(range(42)) + [99, 99, 99, 99]
        assert observed_agreement(a, b) == 42 / 46

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            observed_agreement([1, 2], [1])

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            observed_agreement([], [])


class TestCohenKappa:
    def test_identity_is_exactly_one(self):
        rng = random.Random(7)
        for _ in range(20):
            labels = [rng.choice("abcd") for _ in range(rng.randint(1, 60))]
            assert cohen_kappa(labels, labels) == 1.0

    def test_total_disagreement_on_balanced_binary_is_minus_one(self):
        assert cohen_kappa([0, 1], [1, 0]) == pytest.approx(-1.0)

    def test_textbook_two_by_two_table(self):
        # 45 yes/yes, 15 yes/no, 25 no/yes, 15 no/no:
        # p_o = 0.60, p_e = 0.6*0.7 + 0.4*0.3 = 0.54, kappa = 0.06/0.46
        a = ["y"] * 45 + ["y"] * 15 + ["n"] * 25 + ["n"] * 15
        b = ["y"] * 45 + ["n"] * 15 + ["y"] * 25 + ["n"] * 15
        assert cohen_kappa(a, b) == pytest.approx(0.06 / 0.46)

    def test_chance_level_is_zero(self):
        # marginals 50/50 with agreement exactly at chance
        a = ["x", "x", "y", "y"]
        b = ["x", "y", "x", "y"]
        assert cohen_kappa(a, b) == pytest.approx(0.0)


labels = st.lists(st.sampled_from("abc"), min_size=1, max_size=40)
pairs = st.tuples(labels, labels).map(
    lambda t: (t[0], (t[1] + t[0])[: len(t[0])])
)


@settings(max_examples=200, deadline=None)
@given(pairs)
def test_kappa_is_bounded(pair):
    a, b = pair
    assert -1.0 - 1e-9 <= cohen_kappa(a, b) <= 1.0 + 1e-9


@settings(max_examples=200, deadline=None)
@given(pairs)
def test_kappa_is_symmetric(pair):
    a, b = pair
    assert cohen_kappa(a, b) == pytest.approx(cohen_kappa(b, a))


@settings(max_examples=200, deadline=None)
@given(pairs)
def test_kappa_invariant_under_relabeling(pair):
    a, b = pair
    mapping = {"a": "z", "b": "q", "c": "m"}
    a2 = [mapping[x] for x in a]
    b2 = [mapping[x] for x in b]
    assert cohen_kappa(a, b) == pytest.approx(cohen_kappa(a2, b2))


@settings(max_examples=200, deadline=None)
@given(pairs, st.sampled_from("abc"))
def test_appending_an_agreement_never_lowers_kappa(pair, label):
    a, b = pair
    before = cohen_kappa(a, b)
    after = cohen_kappa(a + [label], b + [label])
    assert after >= before - 1e-9


class TestExplain:
    def test_contains_rule_identity_and_practices(self, catalog):
        text = explain(catalog, "PT-02")
        assert "PT-02" in text
        assert "category: GraphAndGradient" in text
        assert "tag: P" in text
        assert "Clear Graph" in text

    def test_lists_every_linked_practice(self, catalog):
        for rule in catalog.rules:
            text = explain(catalog, rule.id)
            for pid in rule.practices:
                assert pid in text

    def test_unknown_rule(self, catalog):
        with pytest.raises(UnknownRule):
            explain(catalog, "PT-99")

    def test_lowercase_id_is_rejected_or_normalized(self, catalog):
        # the catalog lookup contract is exact-id; anything else must raise
        with pytest.raises(UnknownRule):
            explain(catalog, "zz-01")
