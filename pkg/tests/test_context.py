import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redecomp.context import (
    Exemplar,
    RuleDescriptor,
    build_retrieval_prompt,
    build_rule_prompt,
    estimate_tokens,
    fit_retrieval_prompt,
    load_rules,
    parse_retrieval_prompt,
)
from redecomp.errors import ParseFailure, TokenBudgetExceeded, UnknownFlag

QUESTION = "What is the source code?"


def exemplars(n):
    return [
        Exemplar(f"movl ${i} , eax\nret", f"int func0(void) {{\n    return {i};\n}}\n", 1.0 - i / 10)
        for i in range(n)
    ]


class TestRetrievalPrompt:
    def test_k_zero_is_target_and_question_only(self):
        p = build_retrieval_prompt("push rbp\nret", [], 0)
        assert p.text == "[This is the assembly:]\npush rbp\nret\nWhat is the source code?"
        assert p.mode == "retrieval"

    def test_first_block_holds_best_exemplar(self):
        exs = exemplars(2)
        p = build_retrieval_prompt("ret", exs, 2)
        first = p.text.index("[Example 1]")
        second = p.text.index("[Example 2]")
        assert first < p.text.index("movl $0 , eax") < second

    def test_golden_k5(self, fixtures_dir):
        from scripts_shim import golden_prompt_inputs

        target, exs = golden_prompt_inputs()
        p = build_retrieval_prompt(target, exs, 5)
        golden = (fixtures_dir / "golden_prompts" / "retrieval_k5.txt").read_text(encoding="utf-8")
        assert p.text == golden

    def test_wrong_count_rejected(self):
        with pytest.raises(ValueError):
            build_retrieval_prompt("ret", exemplars(2), 3)

    def test_budget_exceeded_names_drop_index(self):
        with pytest.raises(TokenBudgetExceeded) as exc:
            build_retrieval_prompt("ret", exemplars(3), 3, token_cap=10)
        assert exc.value.drop_index == 2

    def test_fit_drops_lowest_scored(self):
        exs = exemplars(4)
        small_cap = estimate_tokens(build_retrieval_prompt("ret", exs[:2], 2).text)
        p = fit_retrieval_prompt("ret", exs, token_cap=small_cap)
        assert p.text.count("[Example") == 2
        assert "$0" in p.text and "$1" in p.text and "$3" not in p.text

    def test_fit_raises_when_one_exemplar_overflows(self):
        with pytest.raises(TokenBudgetExceeded):
            fit_retrieval_prompt("ret", exemplars(2), token_cap=5)

    def test_exactly_one_target_and_question(self):
        p = build_retrieval_prompt("ret", exemplars(3), 3)
        assert p.text.count("[This is the assembly:]") == 1
        assert p.text.count(QUESTION) == 1
        assert p.text.endswith(QUESTION)


SAFE_TEXT = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd"), whitelist_characters=" _,()\n"),
    min_size=1,
    max_size=80,
).filter(lambda s: s.strip() and not s.startswith("[Example"))


class TestRoundTrip:
    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(SAFE_TEXT, SAFE_TEXT), min_size=0, max_size=4), SAFE_TEXT)
    def test_parse_recovers_inputs(self, pairs, target):
        exs = [Exemplar(a, s, 0.5) for a, s in pairs]
        p = build_retrieval_prompt(target, exs, len(exs))
        k, recovered, recovered_target = parse_retrieval_prompt(p.text)
        assert k == len(exs)
        assert recovered_target == target
        assert [(a, s) for a, s in recovered] == [(e.asm_text, e.src_text) for e in exs]

    def test_parse_rejects_garbage(self):
        with pytest.raises(ParseFailure):
            parse_retrieval_prompt("not a prompt at all")


class TestRulePrompt:
    def test_coalesce_rule_golden(self, fixtures_dir):
        from scripts_shim import golden_prompt_inputs

        target, _ = golden_prompt_inputs()
        rule = load_rules().get("-ftree-coalesce-vars")
        p = build_rule_prompt(target, rule)
        golden = (fixtures_dir / "golden_prompts" / "rule_ftree_coalesce_vars.txt").read_text(encoding="utf-8")
        assert p.text == golden
        assert "Tree SSA Variable Coalescing" in p.text
        assert "int b = a;" in p.text

    def test_rule_prompt_ends_with_question(self):
        for flag in load_rules().flags():
            p = build_rule_prompt("ret", load_rules().get(flag))
            assert p.text.endswith(QUESTION)
            assert p.text.count("[This is the assembly:]") == 1

    def test_empty_hint_rejected(self):
        with pytest.raises(UnknownFlag):
            RuleDescriptor(flag="-fx", description="d", example_source="int f;", hint="")


class TestRuleRegistry:
    def test_shipped_registry_has_five_rules(self):
        assert len(load_rules()) == 5

    def test_alias_resolution(self):
        reg = load_rules()
        assert reg.get("-fipa-pure-const").flag == "-fipa-pure-count"
        assert reg.get("fipa-pure-count").flag == "-fipa-pure-count"

    def test_unknown_flag(self):
        with pytest.raises(UnknownFlag):
            load_rules().get("-fnot-a-flag")

    def test_duplicate_flag_rejected(self, tmp_path):
        rule = {
            "flag": "-fx",
            "description": "d",
            "example_source": "int f;",
            "hint": "h",
        }
        path = tmp_path / "rules.json"
        path.write_text(__import__("json").dumps([rule, rule]), encoding="utf-8")
        with pytest.raises(ParseFailure):
            load_rules(path)

    def test_user_file_extends_to_six(self, tmp_path):
        import json

        shipped = json.loads(
            __import__("importlib").resources.files("redecomp.data")
            .joinpath("rules.json").read_text("utf-8")
        )
        shipped.append(
            {
                "flag": "-funroll-loops",
                "title": "Loop Unrolling",
                "description": "-- replicates loop bodies",
                "example_source": "int f(int n) { return n; }",
                "hint": "re-roll repeated bodies into loops",
            }
        )
        path = tmp_path / "rules.json"
        path.write_text(json.dumps(shipped), encoding="utf-8")
        assert len(load_rules(path)) == 6

    def test_parse_failure_has_line_info(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text("[{bad json", encoding="utf-8")
        with pytest.raises(ParseFailure) as exc:
            load_rules(path)
        assert "line" in str(exc.value)
