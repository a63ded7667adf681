"""Retrieval corpus: tagged, deduplicated (assembly, source) pairs.

A corpus row pairs one normalized assembly function with its canonical
source, a set of functional tags, and structural metrics. Rows are
content-addressed so corpus/eval disjointness can be checked by hash.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .asmnorm import (
    CanonicalSource,
    NormalizedAsm,
    OptLevel,
    RawAssemblyUnit,
    canonicalize_source,
    normalize_asm,
    tokenize,
)
from .errors import IoFailure, ParseFailure, RedecompError


class FunctionTag(str, Enum):
    ALGORITHM = "algorithm"
    STRING = "string"
    IO = "io"
    SYSTEM = "system"
    MATH = "math"


# Feature lists per tag. "calls" match an identifier followed by "(",
# "idents" match a bare identifier, "headers" match include names,
# "qualified" match a literal qualified name. pow/sqrt appear in the
# algorithm column of the published scheme too, but they are counted for
# math only so plain C math calls do not drag in the algorithm tag.
_TAG_FEATURES: dict[FunctionTag, dict[str, tuple[str, ...]]] = {
    FunctionTag.ALGORITHM: {
        "calls": ("sort", "push_back", "qsort", "accumulate"),
        "idents": (),
        "headers": ("algorithm", "vector"),
        "qualified": ("std::vector",),
    },
    FunctionTag.STRING: {
        "calls": ("strlen", "strcmp", "strcpy", "strcat", "strncmp", "substr"),
        "idents": ("regex",),
        "headers": ("string.h", "regex"),
        "qualified": (),
    },
    FunctionTag.IO: {
        "calls": ("printf", "fgets", "fwrite", "scanf", "puts", "fprintf", "fopen"),
        "idents": ("cout", "cin"),
        "headers": ("stdio.h",),
        "qualified": (),
    },
    FunctionTag.SYSTEM: {
        "calls": ("open", "read", "write", "mmap", "memcpy", "memset", "malloc", "free"),
        "idents": (),
        "headers": ("unistd.h", "sys/mman.h", "stdlib.h"),
        "qualified": (),
    },
    FunctionTag.MATH: {
        "calls": ("sin", "cos", "tan", "pow", "sqrt", "log", "exp", "fabs", "floor", "ceil"),
        "idents": (),
        "headers": ("math.h",),
        "qualified": (),
    },
}

_INCLUDE_RE = re.compile(r'^\s*#\s*include\s*[<"]([^>"]+)[>"]', re.MULTILINE)


def extract_includes(raw_source: str) -> list[str]:
    """Header names included by a raw (pre-canonicalization) source."""
    return _INCLUDE_RE.findall(raw_source)


def tag_source(src: CanonicalSource, original_includes: list[str]) -> set[FunctionTag]:
    """Every tag whose feature list matches the source or its includes.

    Multi-tag results are expected; the empty set means "unknown" and is
    treated as a wildcard by retrieval.
    """
    tokens = tokenize(src.body)
    token_set = set(tokens)
    calls = {tokens[i] for i in range(len(tokens) - 1) if tokens[i + 1] == "("}
    text = src.body
    includes = set(original_includes)

    tags: set[FunctionTag] = set()
    for tag, features in _TAG_FEATURES.items():
        if any(c in calls for c in features["calls"]):
            tags.add(tag)
        elif any(i in token_set for i in features["idents"]):
            tags.add(tag)
        elif any(h in includes for h in features["headers"]):
            tags.add(tag)
        elif any(q in text for q in features["qualified"]):
            tags.add(tag)
    return tags


@dataclass(frozen=True)
class StructuralMetrics:
    loc: int
    cyclomatic: int
    basic_blocks: int

    def __post_init__(self):
        if self.loc < 1 or self.cyclomatic < 1 or self.basic_blocks < 1:
            raise ValueError("metrics must be >= 1")


_DECISION_KEYWORDS = {"if", "for", "while", "case"}
_DECISION_OPERATORS = {"&&", "||", "?"}


def compute_metrics(src: CanonicalSource) -> StructuralMetrics:
    """Token-heuristic structural metrics.

    loc counts non-blank body lines. cyclomatic is 1 plus the number of
    decision tokens (if/for/while/case, &&, ||, ?). basic_blocks is 1 plus
    decision tokens plus else tokens (each else joins an extra block).
    """
    try:
        tokens = tokenize(src.body)
    except RedecompError as exc:
        raise ParseFailure(f"cannot tokenize source: {exc}") from exc
    loc = sum(1 for line in src.body.splitlines() if line.strip())
    decisions = sum(
        1 for t in tokens if t in _DECISION_KEYWORDS or t in _DECISION_OPERATORS
    )
    elses = sum(1 for t in tokens if t == "else")
    return StructuralMetrics(
        loc=max(loc, 1),
        cyclomatic=1 + decisions,
        basic_blocks=1 + decisions + elses,
    )


@dataclass(frozen=True)
class Provenance:
    dataset: str
    compiler_id: str
    opt_level: OptLevel


@dataclass(frozen=True)
class CorpusPair:
    """The unit of retrieval: one normalized (assembly, source) pair."""

    id: str
    asm: NormalizedAsm
    src: CanonicalSource
    tags: frozenset[FunctionTag]
    metrics: StructuralMetrics
    provenance: Provenance


def pair_id(asm_body: str, src_body: str) -> str:
    """Content hash: sha256 over asm body, a NUL separator, and src body."""
    h = hashlib.sha256()
    h.update(asm_body.encode("utf-8"))
    h.update(b"\x00")
    h.update(src_body.encode("utf-8"))
    return h.hexdigest()


@dataclass
class SkipRecord:
    index: int
    reason: str


@dataclass
class Corpus:
    pairs: list[CorpusPair]
    skipped: list[SkipRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.pairs)

    def ids(self) -> set[str]:
        return {p.id for p in self.pairs}

    def by_id(self, pid: str) -> CorpusPair:
        for p in self.pairs:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def manifest(self) -> dict:
        counts = {tag.value: 0 for tag in FunctionTag}
        untagged = 0
        for p in self.pairs:
            if not p.tags:
                untagged += 1
            for t in p.tags:
                counts[t.value] += 1
        return {
            "total": len(self.pairs),
            "tag_counts": counts,
            "untagged": untagged,
            "skipped": len(self.skipped),
        }


def build_corpus(
    items: list[tuple[RawAssemblyUnit, str]],
    dataset: str = "local",
) -> Corpus:
    """Normalize, tag, measure, hash, and deduplicate input pairs.

    First occurrence wins on duplicate content. Items that fail to
    normalize land in the skip report; the build never aborts on one bad
    item.
    """
    pairs: list[CorpusPair] = []
    seen: set[str] = set()
    skipped: list[SkipRecord] = []
    for i, (unit, raw_src) in enumerate(items):
        try:
            asm = normalize_asm(unit)
            src = canonicalize_source(raw_src)
            includes = extract_includes(raw_src)
            tags = tag_source(src, includes)
            metrics = compute_metrics(src)
        except RedecompError as exc:
            skipped.append(SkipRecord(index=i, reason=f"{type(exc).__name__}: {exc}"))
            continue
        pid = pair_id(asm.body, src.body)
        if pid in seen:
            continue
        seen.add(pid)
        pairs.append(
            CorpusPair(
                id=pid,
                asm=asm,
                src=src,
                tags=frozenset(tags),
                metrics=metrics,
                provenance=Provenance(
                    dataset=dataset,
                    compiler_id=unit.compiler_id,
                    opt_level=unit.opt_level,
                ),
            )
        )
    pairs.sort(key=lambda p: p.id)
    return Corpus(pairs=pairs, skipped=skipped)


@dataclass
class DisjointReport:
    intersection: list[str]

    @property
    def passed(self) -> bool:
        return not self.intersection


def check_disjoint(corpus_ids: set[str], eval_ids: set[str]) -> DisjointReport:
    """Intersection of two id sets; empty means the split is sound."""
    return DisjointReport(intersection=sorted(corpus_ids & eval_ids))


# --- persistence -------------------------------------------------------------
#
# One JSON record per line, fixed key order:
# id, asm_body, src_body, tags, metrics, provenance, placeholder_map,
# original_name. The manifest is a separate JSON summary.

def save_corpus(corpus: Corpus, path: str | Path, manifest_path: str | Path | None = None) -> None:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8") as fh:
            for p in corpus.pairs:
                record = {
                    "id": p.id,
                    "asm_body": p.asm.body,
                    "src_body": p.src.body,
                    "tags": sorted(t.value for t in p.tags),
                    "metrics": {
                        "loc": p.metrics.loc,
                        "cyclomatic": p.metrics.cyclomatic,
                        "basic_blocks": p.metrics.basic_blocks,
                    },
                    "provenance": {
                        "dataset": p.provenance.dataset,
                        "compiler_id": p.provenance.compiler_id,
                        "opt_level": p.provenance.opt_level.value,
                    },
                    "placeholder_map": list(map(list, p.asm.placeholder_map)),
                    "original_name": p.src.original_name,
                }
                fh.write(json.dumps(record, sort_keys=False) + "\n")
        if manifest_path is not None:
            Path(manifest_path).write_text(
                json.dumps(corpus.manifest(), indent=2) + "\n", encoding="utf-8"
            )
    except OSError as exc:
        raise IoFailure(f"cannot write corpus: {exc}") from exc


def load_corpus(path: str | Path) -> Corpus:
    path = Path(path)
    pairs: list[CorpusPair] = []
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read corpus: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            pairs.append(
                CorpusPair(
                    id=rec["id"],
                    asm=NormalizedAsm(
                        func_name="func0",
                        body=rec["asm_body"],
                        placeholder_map=tuple(
                            (a, b) for a, b in rec.get("placeholder_map", [])
                        ),
                    ),
                    src=CanonicalSource(
                        func_name="func0",
                        body=rec["src_body"],
                        original_name=rec.get("original_name", ""),
                    ),
                    tags=frozenset(FunctionTag(t) for t in rec["tags"]),
                    metrics=StructuralMetrics(**rec["metrics"]),
                    provenance=Provenance(
                        dataset=rec["provenance"]["dataset"],
                        compiler_id=rec["provenance"]["compiler_id"],
                        opt_level=OptLevel(rec["provenance"]["opt_level"]),
                    ),
                )
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseFailure(f"corpus line {lineno}: {exc}") from exc
    return Corpus(pairs=pairs)
