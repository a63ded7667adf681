"""Command-line interface.

Verbs: ``corpus build`` / ``corpus check-disjoint``, ``index build``,
``flags probe``, ``harness eval``, ``decompile run``, and ``report
{esr,errors,transitions,strata}``. Exit code 0 means the batch completed;
it does not depend on the measured success rate.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from .asmnorm import OptLevel, RawAssemblyUnit
from .corpus import build_corpus, check_disjoint, compute_metrics, load_corpus, save_corpus
from .context import load_rules
from .errors import RedecompError
from .flags import Prober, probe_samples
from .harness import esr as esr_of
from .harness import evaluate_candidate, load_bundles
from .index import FallbackEmbedder, RetrievalConfig, ServiceEmbedder, build_index, load_index, save_index
from .llm import EchoSourceMock, GenerationParams, HttpChatClient, strip_semicolons
from .orchestrator import (
    BatchResources,
    RunConfig,
    RunMode,
    job_from_bundle,
    outcome_labels,
    run_batch,
    second_attempt_rules,
    stratified_report,
)
from .triage import classify, distribution, transitions
from .harness import ExecStatus


@click.group()
def main():
    """Context-guided decompilation pipeline."""


# --- corpus -------------------------------------------------------------------


@main.group("corpus")
def corpus_group():
    """Build and check retrieval corpora."""


@corpus_group.command("build")
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_file", required=True, type=click.Path())
@click.option("--manifest", "manifest_file", default=None, type=click.Path())
@click.option("--dataset", default="local")
@click.option("--compiler-id", default="gcc")
@click.option("--opt-level", default="O0", type=click.Choice([l.value for l in OptLevel]))
def corpus_build(in_dir, out_file, manifest_file, dataset, compiler_id, opt_level):
    """Pair NAME.s with NAME.c files under --in and build a corpus."""
    from .asmnorm import canonicalize_source, slice_functions

    in_path = Path(in_dir)
    items = []
    for asm_path in sorted(in_path.glob("*.s")):
        src_path = asm_path.with_suffix(".c")
        if not src_path.exists():
            click.echo(f"skip {asm_path.name}: no matching .c", err=True)
            continue
        asm_text = asm_path.read_text(encoding="utf-8")
        src_text = src_path.read_text(encoding="utf-8")
        unit = None
        try:
            # slice the listing at the function's symbol so corpus assembly
            # carries func0, matching the canonicalized source side
            name = canonicalize_source(src_text).original_name
            units, _missing = slice_functions(
                asm_text,
                [name],
                origin_path=str(asm_path),
                compiler_id=compiler_id,
                opt_level=OptLevel(opt_level),
            )
            if units:
                unit = units[0]
        except RedecompError:
            unit = None
        if unit is None:
            unit = RawAssemblyUnit(
                origin_path=str(asm_path),
                compiler_id=compiler_id,
                opt_level=OptLevel(opt_level),
                text=asm_text,
            )
        items.append((unit, src_text))
    corpus = build_corpus(items, dataset=dataset)
    save_corpus(corpus, out_file, manifest_file)
    for skip in corpus.skipped:
        click.echo(f"skipped item {skip.index}: {skip.reason}", err=True)
    click.echo(json.dumps(corpus.manifest(), indent=2))


@corpus_group.command("check-disjoint")
@click.argument("corpus_a", type=click.Path(exists=True))
@click.argument("corpus_b", type=click.Path(exists=True))
def corpus_check_disjoint(corpus_a, corpus_b):
    """Intersection of two corpus files' content hashes."""
    a = load_corpus(corpus_a).ids()
    b = load_corpus(corpus_b).ids()
    report = check_disjoint(a, b)
    if report.passed:
        click.echo("disjoint: PASS")
    else:
        click.echo(f"disjoint: FAIL ({len(report.intersection)} shared ids)")
        for pid in report.intersection:
            click.echo(f"  {pid}")
        sys.exit(1)


# --- index --------------------------------------------------------------------


@main.group("index")
def index_group():
    """Build and persist embedding indices."""


@index_group.command("build")
@click.option("--corpus", "corpus_file", required=True, type=click.Path(exists=True))
@click.option("--out", "out_file", required=True, type=click.Path())
@click.option("--provider", default="fallback", help="'fallback' or a service base URL")
@click.option("--dim", default=1024, type=int)
def index_build(corpus_file, out_file, provider, dim):
    corpus = load_corpus(corpus_file)
    if provider == "fallback":
        embedder = FallbackEmbedder(dimension=dim)
    else:
        embedder = ServiceEmbedder(provider, dimension=dim)
    index = build_index(corpus, embedder)
    save_index(index, out_file)
    click.echo(f"indexed {len(index)} entries at d={index.dimension} via {index.provider_id}")


# --- flags --------------------------------------------------------------------


@main.group("flags")
def flags_group():
    """Probe which optimization flags are active."""


@flags_group.command("probe")
@click.option("--corpus", "corpus_file", required=True, type=click.Path(exists=True))
@click.option("--compiler", default="gcc")
@click.option("--levels", default="O1,O2,O3")
@click.option("--flags", "flags_file", required=True, type=click.Path(exists=True))
@click.option("--exhaustive", is_flag=True, default=False)
@click.option("--limit", default=0, type=int, help="probe at most N corpus samples")
@click.option("--out", "out_file", default=None, type=click.Path())
def flags_probe(corpus_file, compiler, levels, flags_file, exhaustive, limit, out_file):
    corpus = load_corpus(corpus_file)
    flag_names = [
        line.strip()
        for line in Path(flags_file).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    samples = [(p.id[:12], p.src.body) for p in corpus.pairs]
    if limit:
        samples = samples[:limit]
    prober = Prober(compiler_id=compiler)
    report = probe_samples(
        prober, flag_names, samples, levels.split(","), exhaustive=exhaustive
    )
    payload = {
        "ranking": [{"flag": f, "frequency": freq} for f, freq in report.ranking],
        "decidable": report.decidable,
        "active_counts": report.active_counts,
        "undecidable": len(report.undecidable),
        "compiler_invocations": prober.invocations,
    }
    text = json.dumps(payload, indent=2)
    if out_file:
        Path(out_file).write_text(text + "\n", encoding="utf-8")
    click.echo(text)


# --- harness ------------------------------------------------------------------


@main.group("harness")
def harness_group():
    """Evaluate candidate sources against harness bundles."""


@harness_group.command("eval")
@click.option("--candidates", "candidates_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--bundles", "bundles_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--jobs", default=1, type=int)
def harness_eval(candidates_dir, bundles_dir, jobs):
    """Evaluate <sample_id>.c files against their bundles."""
    bundles = {b.sample_id: b for b in load_bundles(bundles_dir)}
    work = []
    for cand in sorted(Path(candidates_dir).glob("*.c")):
        sid = cand.stem
        if sid not in bundles:
            click.echo(f"skip {cand.name}: no bundle", err=True)
            continue
        work.append((sid, cand.read_text(encoding="utf-8"), bundles[sid]))

    def run_one(item):
        sid, text, bundle = item
        return sid, evaluate_candidate(text, bundle.harness)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run_one, work))
    else:
        outcomes = [run_one(w) for w in work]
    for sid, outcome in outcomes:
        click.echo(f"{sid}: {outcome.status.value}")
    report = esr_of([o for _, o in outcomes])
    click.echo(f"ESR {report.esr_4dp} ({report.passed}/{report.total})")


# --- decompile ----------------------------------------------------------------

_MODE_NAMES = {
    "baseline": RunMode.BASELINE,
    "icl4d-r": RunMode.RETRIEVAL,
    "icl4d-o": RunMode.RULE,
    "random": RunMode.RANDOM_RETRIEVAL,
}


def load_run_config(path: str | Path) -> RunConfig:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    mode = _MODE_NAMES.get(raw.get("mode", "baseline"), RunMode.BASELINE)
    retrieval = RetrievalConfig(**raw.get("retrieval", {}))
    generation = GenerationParams(**raw.get("generation", {}))
    return RunConfig(
        mode=mode,
        retrieval=retrieval,
        generation=generation,
        compiler_id=raw.get("compiler_id", "gcc"),
        opt_levels=raw.get("opt_levels", ["O0"]),
        worker_count=raw.get("worker_count", 1),
        llm_concurrency=raw.get("llm_concurrency", 4),
        seed=raw.get("seed", 42),
        rule_flag=raw.get("rule_flag"),
        token_cap=raw.get("token_cap", 10_000),
        paths=raw.get("paths", {}),
    )


def build_resources(config: RunConfig, client_spec: dict, jobs) -> BatchResources:
    corpus = index = rules = embedder = None
    paths = config.paths
    if config.mode in (RunMode.RETRIEVAL, RunMode.RANDOM_RETRIEVAL):
        corpus = load_corpus(paths["corpus"])
        index = load_index(paths["index"])
        provider = client_spec.get("embed_provider", "fallback")
        if provider == "fallback":
            embedder = FallbackEmbedder(dimension=index.dimension)
        else:
            embedder = ServiceEmbedder(provider, dimension=index.dimension)
    if config.mode is RunMode.RULE:
        rules = load_rules(paths.get("rules"))

    kind = client_spec.get("kind", "mock-echo")
    if kind == "http":
        client = HttpChatClient(endpoint=client_spec["endpoint"])
    else:
        sources = {j.target_asm: j.bundle.ground_truth for j in jobs}
        transform = strip_semicolons if kind == "mock-echo-broken" else None
        client = EchoSourceMock(sources, transform=transform)
    return BatchResources(
        client=client, corpus=corpus, index=index, rules=rules, embedder=embedder
    )


@main.group("decompile")
def decompile_group():
    """Run decompilation batches."""


@decompile_group.command("run")
@click.option("--mode", "mode_name", default=None, type=click.Choice(list(_MODE_NAMES)))
@click.option("--config", "config_file", required=True, type=click.Path(exists=True))
@click.option("--second-attempt-rule", default=None, help="rule flag for a second pass over failures")
def decompile_run(mode_name, config_file, second_attempt_rule):
    config = load_run_config(config_file)
    if mode_name:
        config.mode = _MODE_NAMES[mode_name]
    raw = json.loads(Path(config_file).read_text(encoding="utf-8"))
    for key in ("bundles",):
        if key not in config.paths:
            raise click.UsageError(f"config paths.{key} is required")
    bundles = load_bundles(config.paths["bundles"])
    jobs = [job_from_bundle(b) for b in bundles]
    resources = build_resources(config, raw.get("client", {}), jobs)

    records_path = config.paths.get("output")
    report = run_batch(config, jobs, resources, records_path=records_path)
    click.echo(f"overall ESR {report.overall.esr_4dp} ({report.overall.passed}/{report.overall.total})")
    for key, group in report.esr_by_group.items():
        click.echo(f"  {key}: {group.esr_4dp} ({group.passed}/{group.total})")

    if second_attempt_rule:
        second = second_attempt_rules(report, jobs, config, resources, second_attempt_rule)
        if second["attempted"]:
            click.echo(
                f"second attempt ({second_attempt_rule}) on {second['attempted']} failures: "
                f"rule ESR {second['rule'].esr_4dp} vs re-feed ESR {second['refeed'].esr_4dp}"
            )
        else:
            click.echo("second attempt: no first-round failures")


# --- report -------------------------------------------------------------------


@main.group("report")
def report_group():
    """Summaries over result record files."""


def _load_records(path) -> list[dict]:
    records = [
        json.loads(line)
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    records.sort(key=lambda r: r["sample_id"])
    return records


@report_group.command("esr")
@click.option("--records", "records_file", required=True, type=click.Path(exists=True))
def report_esr(records_file):
    records = _load_records(records_file)
    from .harness import grouped_esr

    rows = [((r["dataset"], r["opt_level"], r["mode"]), bool(r["passed"])) for r in records]
    for key, rep in grouped_esr(rows).items():
        click.echo(f"{key}: {rep.esr_4dp} ({rep.passed}/{rep.total})")
    passed = sum(1 for r in records if r["passed"])
    click.echo(f"overall: {passed / len(records):.4f} ({passed}/{len(records)})")


@report_group.command("errors")
@click.option("--records", "records_file", required=True, type=click.Path(exists=True))
def report_errors(records_file):
    records = _load_records(records_file)
    failures = [
        classify(r["stderr_text"], ExecStatus(r["status"]), r["sample_id"])
        for r in records
        if not r["passed"] and r["status"] in {s.value for s in ExecStatus}
    ]
    if not failures:
        click.echo("no failures")
        return
    for group, freqs in distribution(failures).items():
        click.echo(f"[{group}]")
        for category, share in freqs.items():
            click.echo(f"  {category}: {share:.3f}")


@report_group.command("transitions")
@click.option("--a", "file_a", required=True, type=click.Path(exists=True))
@click.option("--b", "file_b", required=True, type=click.Path(exists=True))
@click.option("--out", "out_file", default=None, type=click.Path())
def report_transitions(file_a, file_b, out_file):
    """Flow records (from, to, count) between two runs' outcomes."""
    labels_a = outcome_labels(_load_records(file_a))
    labels_b = outcome_labels(_load_records(file_b))
    matrix = transitions(labels_a, labels_b)
    flows = [{"from": a, "to": b, "count": n} for a, b, n in matrix.flow_records()]
    text = json.dumps(flows, indent=2)
    if out_file:
        Path(out_file).write_text(text + "\n", encoding="utf-8")
    click.echo(text)


@report_group.command("strata")
@click.option("--records", "records_file", required=True, type=click.Path(exists=True))
@click.option("--bundles", "bundles_dir", required=True, type=click.Path(exists=True, file_okay=False))
def report_strata(records_file, bundles_dir):
    from .asmnorm import canonicalize_source

    records = _load_records(records_file)
    metrics = {}
    for bundle in load_bundles(bundles_dir):
        try:
            metrics[bundle.sample_id] = compute_metrics(
                canonicalize_source(bundle.ground_truth)
            )
        except RedecompError:
            continue
    report = stratified_report(records, metrics)
    click.echo(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
