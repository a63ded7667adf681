import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redecomp.errors import EmptyGroup, ParseFailure, SampleSetMismatch
from redecomp.harness import ExecStatus
from redecomp.triage import (
    PRECEDENCE,
    ErrorCategory,
    classify,
    distribution,
    load_patterns,
    transitions,
)


class TestClassify:
    def test_assertion_failure(self):
        f = classify("prog: driver.c:4: main: Assertion `res == 5' failed.", ExecStatus.RUN_FAIL)
        assert f.category is ErrorCategory.ASSERT

    def test_expected_semicolon(self):
        f = classify("candidate.c:3:1: error: expected ';' before 'return'", ExecStatus.COMPILE_FAIL)
        assert f.category is ErrorCategory.SYNTAX

    def test_undefined_reference(self):
        f = classify("/usr/bin/ld: undefined reference to `helper'", ExecStatus.COMPILE_FAIL)
        assert f.category is ErrorCategory.DECLARATION

    def test_unmatched_text_is_other(self):
        assert classify("banana", ExecStatus.RUN_FAIL).category is ErrorCategory.OTHER

    def test_timeouts_map_to_runtime_link(self):
        assert classify("", ExecStatus.RUN_TIMEOUT).category is ErrorCategory.RUNTIME_LINK
        assert classify("", ExecStatus.COMPILE_TIMEOUT).category is ErrorCategory.RUNTIME_LINK

    def test_output_mismatch_maps_to_assert(self):
        f = classify("stdout does not match expected output", ExecStatus.OUTPUT_MISMATCH)
        assert f.category is ErrorCategory.ASSERT
        f2 = classify("", ExecStatus.OUTPUT_MISMATCH)
        assert f2.category is ErrorCategory.ASSERT

    def test_empty_stderr_is_other(self):
        assert classify("   ", ExecStatus.RUN_FAIL).category is ErrorCategory.OTHER

    def test_pass_never_classified(self):
        with pytest.raises(ValueError):
            classify("anything", ExecStatus.PASS)

    def test_precedence_assert_beats_syntax(self):
        text = "Assertion `x' failed.\nerror: expected ';' before '}'"
        assert classify(text, ExecStatus.RUN_FAIL).category is ErrorCategory.ASSERT

    def test_seven_categories_exactly(self):
        assert len(ErrorCategory) == 7
        assert [c.value for c in PRECEDENCE] == [
            "Assert", "Syntax", "Return", "Type", "Declaration", "RuntimeLink", "Other",
        ]

    @settings(max_examples=150, deadline=None)
    @given(st.text(max_size=200), st.sampled_from([s for s in ExecStatus if s is not ExecStatus.PASS]))
    def test_totality(self, text, status):
        f = classify(text, status)
        assert f.category in ErrorCategory
        assert f.source_status is status


class TestPatternFile:
    def test_shipped_patterns_load(self):
        ps = load_patterns()
        assert set(ps.patterns) == set(ErrorCategory)

    def test_missing_category_rejected(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"Assert": []}), encoding="utf-8")
        with pytest.raises(ParseFailure):
            load_patterns(path)

    def test_bad_regex_rejected(self, tmp_path):
        mapping = {c.value: [] for c in ErrorCategory}
        mapping["Syntax"] = ["(unclosed"]
        path = tmp_path / "p.json"
        path.write_text(json.dumps(mapping), encoding="utf-8")
        with pytest.raises(ParseFailure):
            load_patterns(path)

    def test_unknown_category_rejected(self, tmp_path):
        mapping = {c.value: [] for c in ErrorCategory}
        mapping["Banana"] = ["x"]
        path = tmp_path / "p.json"
        path.write_text(json.dumps(mapping), encoding="utf-8")
        with pytest.raises(ParseFailure):
            load_patterns(path)


def fail(sample_id, category):
    from redecomp.triage import ClassifiedFailure

    return ClassifiedFailure(sample_id, category, "t", ExecStatus.COMPILE_FAIL)


class TestDistribution:
    def test_shares_sum_to_one(self):
        failures = [
            fail("a", ErrorCategory.SYNTAX),
            fail("b", ErrorCategory.SYNTAX),
            fail("c", ErrorCategory.TYPE),
            fail("d", ErrorCategory.OTHER),
        ]
        dist = distribution(failures)["all"]
        assert dist == {"Other": 0.25, "Syntax": 0.5, "Type": 0.25}
        assert abs(sum(dist.values()) - 1.0) < 1e-9

    def test_single_failure(self):
        dist = distribution([fail("a", ErrorCategory.ASSERT)])["all"]
        assert dist == {"Assert": 1.0}

    def test_grouped(self):
        failures = [fail("a", ErrorCategory.SYNTAX), fail("b", ErrorCategory.TYPE)]
        dist = distribution(failures, key=lambda f: f.sample_id)
        assert dist["a"] == {"Syntax": 1.0}
        assert dist["b"] == {"Type": 1.0}

    def test_empty_rejected(self):
        with pytest.raises(EmptyGroup):
            distribution([])


class TestTransitions:
    def test_identical_runs_are_diagonal(self):
        run = {"s1": "Syntax", "s2": "Success", "s3": "Type"}
        m = transitions(run, run)
        assert m.counts == {("Syntax", "Syntax"): 1, ("Success", "Success"): 1, ("Type", "Type"): 1}

    def test_single_correction_flow(self):
        m = transitions({"s1": "Syntax"}, {"s1": "Success"})
        assert m.flow_records() == [("Syntax", "Success", 1)]

    def test_mismatched_sample_sets(self):
        with pytest.raises(SampleSetMismatch):
            transitions({"a": "Syntax"}, {"b": "Syntax"})

    def test_ten_sample_hand_tally(self):
        run_a = {
            "s0": "Syntax", "s1": "Syntax", "s2": "Type", "s3": "Assert",
            "s4": "Success", "s5": "Declaration", "s6": "Other", "s7": "Syntax",
            "s8": "RuntimeLink", "s9": "Return",
        }
        run_b = {
            "s0": "Success", "s1": "Syntax", "s2": "Success", "s3": "Assert",
            "s4": "Success", "s5": "Success", "s6": "Type", "s7": "Declaration",
            "s8": "RuntimeLink", "s9": "Success",
        }
        m = transitions(run_a, run_b)
        # hand tally of the pairs above
        assert m.counts[("Syntax", "Success")] == 1
        assert m.counts[("Syntax", "Syntax")] == 1
        assert m.counts[("Syntax", "Declaration")] == 1
        assert m.counts[("Type", "Success")] == 1
        assert m.counts[("Assert", "Assert")] == 1
        assert m.counts[("Success", "Success")] == 1
        assert m.counts[("Declaration", "Success")] == 1
        assert m.counts[("Other", "Type")] == 1
        assert m.counts[("RuntimeLink", "RuntimeLink")] == 1
        assert m.counts[("Return", "Success")] == 1
        assert m.total() == 10

    @settings(max_examples=100, deadline=None)
    @given(
        st.dictionaries(
            st.text(min_size=1, max_size=6),
            st.sampled_from([c.value for c in ErrorCategory] + ["Success"]),
            min_size=1,
            max_size=20,
        ),
        st.randoms(),
    )
    def test_matrix_conservation(self, run_a, rnd):
        labels = [c.value for c in ErrorCategory] + ["Success"]
        run_b = {k: rnd.choice(labels) for k in run_a}
        m = transitions(run_a, run_b)
        assert m.total() == len(run_a)
        row_sums = m.row_sums()
        for label in labels:
            assert row_sums[label] == sum(1 for v in run_a.values() if v == label)


class TestFixtureCorpus:
    def test_agreement_at_least_95_percent(self, fixtures_dir):
        rows = [
            json.loads(line)
            for line in (fixtures_dir / "stderr_corpus.jsonl").read_text(encoding="utf-8").splitlines()
        ]
        assert len(rows) == 50
        assert {r["label"] for r in rows} == {c.value for c in ErrorCategory}
        agree = sum(
            classify(r["stderr"], ExecStatus.COMPILE_FAIL).category.value == r["label"]
            for r in rows
        )
        assert agree >= 48
