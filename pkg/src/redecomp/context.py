"""Prompt rendering for the two decompilation modes, plus the rule library.

Retrieval prompts interleave ``[Example i]`` assembly/source blocks ordered
by decreasing adjusted score; rule prompts carry one compiler-optimization
descriptor. Both end with the same target block and question line, and both
are golden-file exact: the templates here are the contract.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ParseFailure, TokenBudgetExceeded, UnknownFlag

DEFAULT_TOKEN_CAP = 10_000

# Approximate tokenizer: word/punctuation pieces times a fixed factor.
# Only an upper bound is needed for cap enforcement.
_PIECE_RE = re.compile(r"\w+|[^\w\s]")
_PIECES_PER_TOKEN_FACTOR = 1.3

_TARGET_MARKER = "[This is the assembly:]"
_QUESTION = "What is the source code?"


def estimate_tokens(text: str) -> int:
    return math.ceil(len(_PIECE_RE.findall(text)) * _PIECES_PER_TOKEN_FACTOR)


@dataclass(frozen=True)
class Exemplar:
    asm_text: str
    src_text: str
    adjusted_score: float

    def __post_init__(self):
        if not self.asm_text or not self.src_text:
            raise ValueError("exemplar texts must be non-empty")


@dataclass(frozen=True)
class RuleDescriptor:
    """One compiler optimization's semantics, ready for prompting."""

    flag: str
    description: str
    example_source: str
    hint: str
    title: str = ""
    aliases: tuple[str, ...] = ()

    def __post_init__(self):
        if not (self.flag and self.description and self.example_source and self.hint):
            raise UnknownFlag(
                f"rule descriptor for {self.flag!r} has empty fields"
            )


@dataclass(frozen=True)
class Prompt:
    text: str
    mode: str  # "retrieval" | "rule"
    exemplar_ids: tuple[str, ...] = ()
    rule_flag: str | None = None
    token_estimate: int = 0


def build_retrieval_prompt(
    target_asm: str,
    exemplars: list[Exemplar],
    k: int,
    token_cap: int = DEFAULT_TOKEN_CAP,
    exemplar_ids: tuple[str, ...] = (),
) -> Prompt:
    """Render the exemplar prompt. Callers pass exemplars already sorted by
    adjusted score descending; block order preserves input order."""
    if len(exemplars) != k:
        raise ValueError(f"expected {k} exemplars, got {len(exemplars)}")
    blocks: list[str] = []
    for i, ex in enumerate(exemplars, start=1):
        blocks.append(
            f"[Example {i}]\nAssembly:\n{ex.asm_text}\nSource:\n{ex.src_text}\n"
        )
    blocks.append(f"{_TARGET_MARKER}\n{target_asm}\n{_QUESTION}")
    text = "\n".join(blocks)
    estimate = estimate_tokens(text)
    if estimate > token_cap:
        raise TokenBudgetExceeded(
            estimate, token_cap, drop_index=k - 1 if k else None
        )
    return Prompt(
        text=text,
        mode="retrieval",
        exemplar_ids=exemplar_ids,
        token_estimate=estimate,
    )


def fit_retrieval_prompt(
    target_asm: str,
    exemplars: list[Exemplar],
    token_cap: int = DEFAULT_TOKEN_CAP,
    exemplar_ids: tuple[str, ...] = (),
) -> Prompt:
    """Budget overflow policy: drop the lowest-scored exemplar and retry,
    down to k=1; a single exemplar that still overflows is an error."""
    current = list(exemplars)
    ids = list(exemplar_ids) if exemplar_ids else None
    while True:
        try:
            return build_retrieval_prompt(
                target_asm,
                current,
                len(current),
                token_cap,
                exemplar_ids=tuple(ids) if ids is not None else (),
            )
        except TokenBudgetExceeded:
            if len(current) <= 1:
                raise
            current.pop()
            if ids is not None:
                ids.pop()


def build_rule_prompt(
    target_asm: str,
    rule: RuleDescriptor,
    token_cap: int = DEFAULT_TOKEN_CAP,
) -> Prompt:
    """Render the optimization-rule prompt for one flag."""
    title = f" ({rule.title})" if rule.title else ""
    text = (
        "Optimize options instructions\n"
        "The binary you are decompiling may have been compiled with the "
        f"GCC/Clang option {rule.flag}{title}.\n\n"
        f"{rule.description}\n\n"
        "Illustrative Source:\n"
        f"{rule.example_source}\n\n"
        "Decompilation Hint:\n"
        f"{rule.hint}\n\n"
        f"{_TARGET_MARKER}\n{target_asm}\n{_QUESTION}"
    )
    estimate = estimate_tokens(text)
    if estimate > token_cap:
        raise TokenBudgetExceeded(estimate, token_cap)
    return Prompt(
        text=text,
        mode="rule",
        rule_flag=rule.flag,
        token_estimate=estimate,
    )


_EXAMPLE_HEADER = re.compile(r"^\[Example (\d+)\]$")


def parse_retrieval_prompt(text: str) -> tuple[int, list[tuple[str, str]], str]:
    """Recover (k, [(asm, src)], target) from a rendered retrieval prompt.

    Grammar: exemplar blocks are delimited by '[Example i]' headers with
    'Assembly:'/'Source:' section markers; the target block runs from the
    target marker to the question line. Exemplar texts must not contain
    lines equal to the markers themselves.
    """
    lines = text.split("\n")
    if not lines or lines[-1] != _QUESTION:
        raise ParseFailure("prompt does not end with the question line")
    try:
        t_idx = lines.index(_TARGET_MARKER)
    except ValueError:
        raise ParseFailure("prompt has no target marker") from None
    target = "\n".join(lines[t_idx + 1 : -1])

    exemplars: list[tuple[str, str]] = []
    i = 0
    while i < t_idx:
        m = _EXAMPLE_HEADER.match(lines[i])
        if not m:
            i += 1
            continue
        start = i + 1
        end = start
        while end < t_idx and not _EXAMPLE_HEADER.match(lines[end]):
            end += 1
        block = lines[start:end]
        # one trailing empty line is the block separator, not exemplar text
        if block and block[-1] == "":
            block = block[:-1]
        if not block or block[0] != "Assembly:":
            raise ParseFailure(f"example {m.group(1)}: missing Assembly section")
        try:
            s_idx = block.index("Source:")
        except ValueError:
            raise ParseFailure(f"example {m.group(1)}: missing Source section") from None
        asm = "\n".join(block[1:s_idx])
        src = "\n".join(block[s_idx + 1 :])
        exemplars.append((asm, src))
        i = end
    return len(exemplars), exemplars, target


# --- rule registry ------------------------------------------------------------


class RuleRegistry:
    """Rule descriptors keyed by flag, with alias resolution."""

    def __init__(self, rules: list[RuleDescriptor]):
        self._rules: dict[str, RuleDescriptor] = {}
        self._aliases: dict[str, str] = {}
        for rule in rules:
            if rule.flag in self._rules or rule.flag in self._aliases:
                raise ParseFailure(f"duplicate rule flag: {rule.flag}")
            self._rules[rule.flag] = rule
            for alias in rule.aliases:
                if alias in self._aliases or alias in self._rules:
                    raise ParseFailure(f"duplicate rule alias: {alias}")
                self._aliases[alias] = rule.flag

    def __len__(self) -> int:
        return len(self._rules)

    def flags(self) -> list[str]:
        return sorted(self._rules)

    def get(self, flag: str) -> RuleDescriptor:
        if flag in self._rules:
            return self._rules[flag]
        if flag in self._aliases:
            return self._rules[self._aliases[flag]]
        raise UnknownFlag(f"no rule for flag {flag!r}")


def _rules_from_json(payload) -> list[RuleDescriptor]:
    if not isinstance(payload, list):
        raise ParseFailure("rule file must be a JSON array")
    rules = []
    for i, obj in enumerate(payload):
        try:
            rules.append(
                RuleDescriptor(
                    flag=obj["flag"],
                    description=obj["description"],
                    example_source=obj["example_source"],
                    hint=obj["hint"],
                    title=obj.get("title", ""),
                    aliases=tuple(obj.get("aliases", [])),
                )
            )
        except (KeyError, TypeError) as exc:
            raise ParseFailure(f"rule entry {i}: {exc}") from exc
    return rules


def load_rules(path: str | Path | None = None) -> RuleRegistry:
    """Load a rule registry; with no path, the built-in library ships the
    five most frequently active flags."""
    if path is None:
        text = resources.files("redecomp.data").joinpath("rules.json").read_text("utf-8")
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseFailure(f"cannot read rule file: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseFailure(f"rule file line {exc.lineno}: {exc.msg}") from exc
    return RuleRegistry(_rules_from_json(payload))
