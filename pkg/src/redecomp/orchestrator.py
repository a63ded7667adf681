"""End-to-end batch decompilation: jobs, workers, and reports.

One job per sample: build the mode's context, prompt the model, extract a
candidate, compile and run it, classify any failure. Records are
deterministic by construction (no wall-clock fields, no host paths), so a
run with one worker and a run with eight produce byte-identical sorted
records under a scripted client.
"""

from __future__ import annotations

import hashlib
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .asmnorm import OptLevel, RawAssemblyUnit, canonicalize_source, normalize_asm
from .context import (
    DEFAULT_TOKEN_CAP,
    Exemplar,
    Prompt,
    RuleRegistry,
    build_retrieval_prompt,
    build_rule_prompt,
    fit_retrieval_prompt,
)
from .corpus import Corpus, FunctionTag, extract_includes, tag_source
from .errors import MissingMetrics, RedecompError
from .harness import (
    EsrReport,
    ExecOutcome,
    ExecStatus,
    HarnessBundle,
    evaluate_candidate,
    grouped_esr,
)
from .index import RetrievalConfig, VectorIndex, retrieve_topk
from .llm import GenerationParams, complete
from .triage import SUCCESS_LABEL, classify


class RunMode(str, Enum):
    BASELINE = "baseline"
    RETRIEVAL = "icl4d_r"
    RULE = "icl4d_o"
    RANDOM_RETRIEVAL = "random_retrieval"


@dataclass
class RunConfig:
    mode: RunMode = RunMode.BASELINE
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    generation: GenerationParams = field(default_factory=GenerationParams)
    compiler_id: str = "gcc"
    opt_levels: list[str] = field(default_factory=lambda: ["O0"])
    worker_count: int = 1
    llm_concurrency: int = 4
    seed: int = 42
    rule_flag: str | None = None
    token_cap: int = DEFAULT_TOKEN_CAP
    # corpus / index / bundles / rules / output locations, owned by the CLI
    paths: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")


@dataclass
class DecompJob:
    sample_id: str
    dataset: str
    opt_level: str
    target_asm: str  # normalized body
    tags: frozenset[FunctionTag]
    bundle: HarnessBundle


def job_from_bundle(bundle: HarnessBundle) -> DecompJob:
    """Normalize the bundle's target assembly and tag it from its source."""
    unit = RawAssemblyUnit(
        origin_path=f"{bundle.sample_id}/target.s",
        compiler_id=bundle.compiler_id,
        opt_level=OptLevel(bundle.opt_level),
        text=bundle.target_asm_raw,
    )
    asm = normalize_asm(unit)
    src = canonicalize_source(bundle.ground_truth)
    tags = tag_source(src, extract_includes(bundle.ground_truth))
    return DecompJob(
        sample_id=bundle.sample_id,
        dataset=bundle.dataset,
        opt_level=bundle.opt_level,
        target_asm=asm.body,
        tags=frozenset(tags),
        bundle=bundle,
    )


def _sample_rng(seed: int, sample_id: str) -> np.random.Generator:
    """Per-sample generator independent of worker scheduling."""
    digest = hashlib.sha256(sample_id.encode("utf-8")).digest()
    return np.random.default_rng([seed, int.from_bytes(digest[:8], "big")])


def _exemplar_of(corpus: Corpus, pid: str) -> Exemplar:
    pair = corpus.by_id(pid)
    return Exemplar(
        asm_text=pair.asm.body,
        src_text=pair.src.body,
        adjusted_score=0.0,
    )


def _prompt_char_length(target_asm: str, exemplar_sizes: list[tuple[int, int]]) -> int:
    """Arithmetic length of a rendered retrieval prompt (no render needed)."""
    total = len("[This is the assembly:]\n") + len(target_asm) + len("\nWhat is the source code?")
    for i, (asm_len, src_len) in enumerate(exemplar_sizes, start=1):
        total += len(f"[Example {i}]\nAssembly:\n") + asm_len + len("\nSource:\n") + src_len + 2
    return total


def _select_random_matched(
    index: VectorIndex,
    corpus: Corpus,
    target_asm: str,
    similar_ids: list[str],
    rng: np.random.Generator,
    tolerance: float = 0.10,
    max_attempts: int = 1000,
) -> tuple[list[str], int, int]:
    """Random exemplar ids whose prompt length matches the similar-mode
    prompt within the tolerance.

    Seeded re-sampling first; if no draw lands inside the band, a greedy
    swap repair walks the closest draw toward the target. Returns
    (ids, random_prompt_chars, similar_prompt_chars).
    """
    k = len(similar_ids)
    sizes = {}
    for pid in index.pair_ids:
        pair = corpus.by_id(pid)
        sizes[pid] = (len(pair.asm.body), len(pair.src.body))
    target_len = _prompt_char_length(target_asm, [sizes[p] for p in similar_ids])

    def length_of(ids: list[str]) -> int:
        return _prompt_char_length(target_asm, [sizes[p] for p in ids])

    best: list[str] = []
    best_err = float("inf")
    for _ in range(max_attempts):
        chosen = [index.pair_ids[i] for i in rng.choice(len(index), size=k, replace=False)]
        err = abs(length_of(chosen) - target_len) / target_len
        if err < best_err:
            best, best_err = chosen, err
        if err <= tolerance:
            return chosen, length_of(chosen), target_len

    # greedy repair: swap one member at a time toward the target length
    pool = list(index.pair_ids)
    for _ in range(2):
        for pos in range(k):
            for candidate in pool:
                if candidate in best:
                    continue
                trial = list(best)
                trial[pos] = candidate
                err = abs(length_of(trial) - target_len) / target_len
                if err < best_err:
                    best, best_err = trial, err
                if best_err <= tolerance:
                    return best, length_of(best), target_len
    return best, length_of(best), target_len


@dataclass
class BatchResources:
    """Shared read-only state for a batch run."""

    client: object
    corpus: Corpus | None = None
    index: VectorIndex | None = None
    rules: RuleRegistry | None = None
    embedder: object | None = None


def _build_prompt_for_job(
    job: DecompJob,
    config: RunConfig,
    resources: BatchResources,
) -> tuple[Prompt, dict]:
    """The mode's prompt plus deterministic prompt metadata."""
    meta: dict = {"exemplar_ids": [], "exemplar_count": 0, "rule_flag": None}
    mode = config.mode
    if mode is RunMode.BASELINE:
        prompt = build_retrieval_prompt(job.target_asm, [], 0, config.token_cap)
    elif mode is RunMode.RETRIEVAL:
        index, corpus = resources.index, resources.corpus
        query = _embed_for_index(job.target_asm, resources)
        scored = retrieve_topk(index, query, job.tags, config.retrieval, mode="similar")
        exemplars = []
        ids = []
        for c in scored:
            pair = corpus.by_id(c.pair_id)
            exemplars.append(
                Exemplar(pair.asm.body, pair.src.body, adjusted_score=c.adjusted)
            )
            ids.append(c.pair_id)
        prompt = fit_retrieval_prompt(
            job.target_asm, exemplars, config.token_cap, exemplar_ids=tuple(ids)
        )
        meta["exemplar_ids"] = list(prompt.exemplar_ids)
        meta["exemplar_count"] = len(prompt.exemplar_ids)
    elif mode is RunMode.RANDOM_RETRIEVAL:
        index, corpus = resources.index, resources.corpus
        query = _embed_for_index(job.target_asm, resources)
        scored = retrieve_topk(index, query, job.tags, config.retrieval, mode="similar")
        similar_ids = [c.pair_id for c in scored]
        rng = _sample_rng(config.seed, job.sample_id)
        ids, rand_chars, similar_chars = _select_random_matched(
            index, corpus, job.target_asm, similar_ids, rng
        )
        exemplars = [_exemplar_of(corpus, pid) for pid in ids]
        prompt = build_retrieval_prompt(
            job.target_asm, exemplars, len(exemplars), config.token_cap,
            exemplar_ids=tuple(ids),
        )
        meta["exemplar_ids"] = list(ids)
        meta["exemplar_count"] = len(ids)
        meta["matched_similar_chars"] = similar_chars
        meta["matched_similar_count"] = len(similar_ids)
    elif mode is RunMode.RULE:
        rule = resources.rules.get(config.rule_flag)
        prompt = build_rule_prompt(job.target_asm, rule, config.token_cap)
        meta["rule_flag"] = rule.flag
    else:  # pragma: no cover
        raise ValueError(f"unhandled mode {mode}")
    return prompt, meta


def _embed_for_index(asm_body: str, resources: BatchResources) -> np.ndarray:
    return resources.embedder.embed(asm_body)


def run_job(
    job: DecompJob,
    config: RunConfig,
    resources: BatchResources,
    llm_gate: threading.Semaphore,
) -> dict:
    """Execute one job end to end; always returns a record."""
    record = {
        "sample_id": job.sample_id,
        "dataset": job.dataset,
        "opt_level": job.opt_level,
        "mode": config.mode.value,
        "status": None,
        "category": None,
        "matched_pattern": None,
        "passed": False,
        "exemplar_count": 0,
        "exemplar_ids": [],
        "rule_flag": None,
        "prompt_chars": 0,
        "prompt_sha256": None,
        "token_estimate": 0,
        "response_sha256": None,
        "extracted": False,
        "stderr_text": "",
        "error": None,
    }
    try:
        prompt, meta = _build_prompt_for_job(job, config, resources)
        record["exemplar_count"] = meta["exemplar_count"]
        record["exemplar_ids"] = meta["exemplar_ids"]
        record["rule_flag"] = meta["rule_flag"]
        for key in ("matched_similar_chars", "matched_similar_count"):
            if key in meta:
                record[key] = meta[key]
        record["prompt_chars"] = len(prompt.text)
        record["prompt_sha256"] = hashlib.sha256(prompt.text.encode()).hexdigest()
        record["token_estimate"] = prompt.token_estimate

        with llm_gate:
            response = complete(prompt, config.generation, resources.client)
        record["response_sha256"] = hashlib.sha256(response.raw_text.encode()).hexdigest()
        record["extracted"] = response.extracted_source is not None

        if response.extracted_source is None:
            outcome = ExecOutcome(
                status=ExecStatus.COMPILE_FAIL,
                stderr_text="no source could be extracted from the model response",
                stdout_text="",
            )
        else:
            outcome = evaluate_candidate(
                response.extracted_source, job.bundle.harness, config.compiler_id
            )
        record["status"] = outcome.status.value
        record["passed"] = outcome.passed
        record["stderr_text"] = outcome.stderr_text
        if not outcome.passed:
            failure = classify(outcome.stderr_text, outcome.status, job.sample_id)
            record["category"] = failure.category.value
            record["matched_pattern"] = failure.matched_pattern
    except RedecompError as exc:
        record["error"] = f"{type(exc).__name__}: {exc}"
        record["status"] = record["status"] or "JobError"
    return record


@dataclass
class RunReport:
    records: list[dict]
    esr_by_group: dict[tuple, EsrReport]

    @property
    def overall(self) -> EsrReport:
        passed = sum(1 for r in self.records if r["passed"])
        return EsrReport(total=len(self.records), passed=passed)


def run_batch(
    config: RunConfig,
    jobs: list[DecompJob],
    resources: BatchResources,
    records_path: str | Path | None = None,
) -> RunReport:
    """Run every job under a bounded worker pool.

    Per-job errors become failed records; the batch never aborts on one
    job. With ``records_path``, records append as jobs finish and jobs
    whose ids are already present are skipped (crash resume).
    """
    done: dict[str, dict] = {}
    if records_path is not None and Path(records_path).exists():
        for line in Path(records_path).read_text(encoding="utf-8").splitlines():
            if line.strip():
                rec = json.loads(line)
                done[rec["sample_id"]] = rec
    pending = [j for j in jobs if j.sample_id not in done]

    llm_gate = threading.Semaphore(config.llm_concurrency)
    write_lock = threading.Lock()
    out_fh = None
    if records_path is not None:
        out_fh = Path(records_path).open("a", encoding="utf-8")

    def work(job: DecompJob) -> dict:
        record = run_job(job, config, resources, llm_gate)
        if out_fh is not None:
            with write_lock:
                out_fh.write(json.dumps(record, sort_keys=True) + "\n")
                out_fh.flush()
        return record

    try:
        if config.worker_count == 1:
            fresh = [work(j) for j in pending]
        else:
            with ThreadPoolExecutor(max_workers=config.worker_count) as pool:
                fresh = list(pool.map(work, pending))
    finally:
        if out_fh is not None:
            out_fh.close()

    records = list(done.values()) + fresh
    records.sort(key=lambda r: r["sample_id"])
    if not records:
        return RunReport(records=[], esr_by_group={})
    rows = [
        ((r["dataset"], r["opt_level"], r["mode"]), bool(r["passed"]))
        for r in records
    ]
    return RunReport(records=records, esr_by_group=grouped_esr(rows))


def second_attempt_rules(
    first_run: RunReport,
    jobs: list[DecompJob],
    config: RunConfig,
    resources: BatchResources,
    rule_flag: str,
) -> dict:
    """Re-decompile first-round failures with a rule prompt, against a
    re-feed control (same failures, original prompt, same params)."""
    failed_ids = {r["sample_id"] for r in first_run.records if not r["passed"]}
    retry_jobs = [j for j in jobs if j.sample_id in failed_ids]
    if not retry_jobs:
        return {
            "attempted": 0,
            "rule": None,
            "refeed": None,
            "rule_records": [],
            "refeed_records": [],
        }

    rule_config = RunConfig(
        mode=RunMode.RULE,
        retrieval=config.retrieval,
        generation=config.generation,
        compiler_id=config.compiler_id,
        worker_count=config.worker_count,
        llm_concurrency=config.llm_concurrency,
        seed=config.seed,
        rule_flag=rule_flag,
        token_cap=config.token_cap,
    )
    rule_report = run_batch(rule_config, retry_jobs, resources)
    refeed_report = run_batch(config, retry_jobs, resources)
    return {
        "attempted": len(retry_jobs),
        "rule": rule_report.overall,
        "refeed": refeed_report.overall,
        "rule_records": rule_report.records,
        "refeed_records": refeed_report.records,
    }


# Stratification bin edges (documented, fixed): cyclomatic complexity
# 1 / 2-4 / 5-10 / 11+; lines of code 1-7 / 8-14 / 15-29 / 30+.
CYCLOMATIC_BINS = [(1, 2, "1"), (2, 5, "2-4"), (5, 11, "5-10"), (11, None, "11+")]
LOC_BINS = [(1, 8, "1-7"), (8, 15, "8-14"), (15, 30, "15-29"), (30, None, "30+")]
LOW_CONFIDENCE_THRESHOLD = 3


def _bin_label(value: int, bins) -> str:
    for low, high, label in bins:
        if value >= low and (high is None or value < high):
            return label
    return bins[-1][2]


def stratified_report(
    records: list[dict],
    metrics_by_sample: dict[str, object],
) -> dict:
    """Per-bin success rates over cyclomatic complexity and LOC.

    Samples without metrics are excluded and reported. Bins with fewer
    than three samples are flagged low-confidence.
    """
    missing = sorted(
        r["sample_id"] for r in records if r["sample_id"] not in metrics_by_sample
    )
    usable = [r for r in records if r["sample_id"] in metrics_by_sample]
    if not usable:
        raise MissingMetrics(f"no samples have metrics; missing: {missing}")

    def summarize(axis: str, bins) -> dict[str, dict]:
        grouped: dict[str, list[bool]] = {}
        for r in usable:
            m = metrics_by_sample[r["sample_id"]]
            value = getattr(m, "cyclomatic" if axis == "cyclomatic" else "loc")
            grouped.setdefault(_bin_label(value, bins), []).append(bool(r["passed"]))
        out = {}
        for _, _, label in bins:
            if label not in grouped:
                continue
            oks = grouped[label]
            out[label] = {
                "count": len(oks),
                "passed": sum(oks),
                "esr": sum(oks) / len(oks),
                "low_confidence": len(oks) < LOW_CONFIDENCE_THRESHOLD,
            }
        return out

    return {
        "cyclomatic": summarize("cyclomatic", CYCLOMATIC_BINS),
        "loc": summarize("loc", LOC_BINS),
        "excluded_missing_metrics": missing,
    }


def outcome_labels(records: list[dict]) -> dict[str, str]:
    """sample_id -> category-or-Success map for transition analysis."""
    labels = {}
    for r in records:
        labels[r["sample_id"]] = SUCCESS_LABEL if r["passed"] else (
            r["category"] or "Other"
        )
    return labels
