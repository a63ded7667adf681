"""Failure triage: the seven-category diagnostic taxonomy.

Categories are tested in fixed precedence (Assert first, Other the
catch-all); the first category whose pattern set matches the stderr text
is the dominant label. Pattern sets are data, not code: the shipped file
can be replaced without touching the classifier.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import EmptyGroup, ParseFailure, SampleSetMismatch
from .harness import ExecStatus


class ErrorCategory(str, Enum):
    ASSERT = "Assert"
    SYNTAX = "Syntax"
    RETURN = "Return"
    TYPE = "Type"
    DECLARATION = "Declaration"
    RUNTIME_LINK = "RuntimeLink"
    OTHER = "Other"


PRECEDENCE = [
    ErrorCategory.ASSERT,
    ErrorCategory.SYNTAX,
    ErrorCategory.RETURN,
    ErrorCategory.TYPE,
    ErrorCategory.DECLARATION,
    ErrorCategory.RUNTIME_LINK,
    ErrorCategory.OTHER,
]

SUCCESS_LABEL = "Success"
FLOW_LABELS = [c.value for c in PRECEDENCE] + [SUCCESS_LABEL]


@dataclass(frozen=True)
class ClassifiedFailure:
    sample_id: str
    category: ErrorCategory
    matched_pattern: str
    source_status: ExecStatus


class PatternSet:
    """Compiled per-category patterns in precedence order."""

    def __init__(self, patterns: dict[ErrorCategory, list[re.Pattern]]):
        self.patterns = patterns

    @classmethod
    def from_mapping(cls, mapping: dict[str, list[str]]) -> "PatternSet":
        compiled: dict[ErrorCategory, list[re.Pattern]] = {}
        for name, regexes in mapping.items():
            try:
                category = ErrorCategory(name)
            except ValueError as exc:
                raise ParseFailure(f"unknown error category: {name}") from exc
            try:
                compiled[category] = [re.compile(r) for r in regexes]
            except re.error as exc:
                raise ParseFailure(f"bad pattern under {name}: {exc}") from exc
        missing = [c.value for c in PRECEDENCE if c not in compiled]
        if missing:
            raise ParseFailure(f"pattern file lacks categories: {missing}")
        return cls(compiled)


def load_patterns(path: str | Path | None = None) -> PatternSet:
    if path is None:
        text = resources.files("redecomp.data").joinpath("error_patterns.json").read_text("utf-8")
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseFailure(f"cannot read pattern file: {exc}") from exc
    try:
        mapping = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseFailure(f"pattern file line {exc.lineno}: {exc.msg}") from exc
    return PatternSet.from_mapping(mapping)


_DEFAULT_PATTERNS: PatternSet | None = None


def _default_patterns() -> PatternSet:
    global _DEFAULT_PATTERNS
    if _DEFAULT_PATTERNS is None:
        _DEFAULT_PATTERNS = load_patterns()
    return _DEFAULT_PATTERNS


def classify(
    stderr_text: str,
    status: ExecStatus,
    sample_id: str = "",
    patterns: PatternSet | None = None,
) -> ClassifiedFailure:
    """Dominant error label for one non-Pass outcome.

    Timeouts are runtime/link failures; an output mismatch without
    assertion text still counts as Assert (the category covers both);
    empty stderr is uncategorizable.
    """
    if status is ExecStatus.PASS:
        raise ValueError("Pass outcomes are never classified")
    ps = patterns or _default_patterns()

    if status in (ExecStatus.COMPILE_TIMEOUT, ExecStatus.RUN_TIMEOUT):
        return ClassifiedFailure(sample_id, ErrorCategory.RUNTIME_LINK, "status:timeout", status)
    if status is ExecStatus.OUTPUT_MISMATCH:
        return ClassifiedFailure(sample_id, ErrorCategory.ASSERT, "status:output-mismatch", status)
    if not stderr_text.strip():
        return ClassifiedFailure(sample_id, ErrorCategory.OTHER, "empty-stderr", status)

    for category in PRECEDENCE:
        for i, pattern in enumerate(ps.patterns[category]):
            if pattern.search(stderr_text):
                return ClassifiedFailure(
                    sample_id, category, f"{category.value}:{i}", status
                )
    return ClassifiedFailure(sample_id, ErrorCategory.OTHER, "fallback", status)


def distribution(
    failures: list[ClassifiedFailure],
    key=None,
) -> dict[object, dict[str, float]]:
    """Per-group normalized category frequencies over failed cases.

    ``key`` maps a failure to its group (default: one group, keyed "all").
    Frequencies within each group sum to 1.
    """
    if not failures:
        raise EmptyGroup("no failures to normalize over")
    if key is None:
        key = lambda f: "all"  # noqa: E731
    groups: dict[object, list[ClassifiedFailure]] = {}
    for f in failures:
        groups.setdefault(key(f), []).append(f)
    result: dict[object, dict[str, float]] = {}
    for group, members in sorted(groups.items(), key=lambda kv: str(kv[0])):
        counts: dict[str, int] = {}
        for f in members:
            counts[f.category.value] = counts.get(f.category.value, 0) + 1
        total = len(members)
        result[group] = {cat: n / total for cat, n in sorted(counts.items())}
    return result


@dataclass
class TransitionMatrix:
    """Counts of (label in run A -> label in run B) over shared samples."""

    labels: list[str]
    counts: dict[tuple[str, str], int]

    def total(self) -> int:
        return sum(self.counts.values())

    def row_sums(self) -> dict[str, int]:
        sums = {label: 0 for label in self.labels}
        for (a, _), n in self.counts.items():
            sums[a] += n
        return sums

    def flow_records(self) -> list[tuple[str, str, int]]:
        """(from, to, count) triples with count > 0, for Sankey rendering."""
        return [
            (a, b, n)
            for (a, b), n in sorted(self.counts.items())
            if n > 0
        ]


def transitions(run_a: dict[str, str], run_b: dict[str, str]) -> TransitionMatrix:
    """Outcome-label flows between two runs on the same sample ids.

    Labels are the seven categories plus "Success".
    """
    only_a = set(run_a) - set(run_b)
    only_b = set(run_b) - set(run_a)
    if only_a or only_b:
        raise SampleSetMismatch(only_a, only_b)
    for label in list(run_a.values()) + list(run_b.values()):
        if label not in FLOW_LABELS:
            raise ValueError(f"unknown outcome label: {label}")
    counts: dict[tuple[str, str], int] = {}
    for sid in run_a:
        pair = (run_a[sid], run_b[sid])
        counts[pair] = counts.get(pair, 0) + 1
    return TransitionMatrix(labels=list(FLOW_LABELS), counts=counts)
