#!/usr/bin/env python3
"""End-to-end demo on the checked-in fixtures, no network needed.

Builds the corpus and index, runs all four decompilation modes with the
offline echo client, and prints per-mode success rates plus the error-flow
records between the broken run and the retrieval run.

Usage: python scripts/run_mock_pipeline.py [output_dir]
"""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"


def cli(*args: str) -> str:
    proc = subprocess.run(
        [sys.executable, "-m", "redecomp.cli", *args],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise SystemExit(f"command failed: {' '.join(args)}\n{proc.stderr}")
    return proc.stdout


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="redecomp-demo-"))
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus = out_dir / "corpus.jsonl"
    index = out_dir / "index.npz"

    print(f"== building corpus -> {corpus}")
    cli("corpus", "build", "--in", str(FIXTURES / "corpus_src"), "--out", str(corpus),
        "--manifest", str(out_dir / "manifest.json"), "--dataset", "mini-corpus")
    print((out_dir / "manifest.json").read_text())

    print(f"== building index -> {index}")
    print(cli("index", "build", "--corpus", str(corpus), "--out", str(index)))

    record_files = {}
    for mode in ("baseline", "icl4d-r", "icl4d-o", "random"):
        records = out_dir / f"records_{mode.replace('-', '_')}.jsonl"
        config = {
            "mode": mode,
            "paths": {
                "corpus": str(corpus),
                "index": str(index),
                "bundles": str(FIXTURES / "bundles"),
                "output": str(records),
            },
            "retrieval": {"k": 5, "alpha": 0.9, "csls_neighborhood": 10},
            "generation": {"temperature": 0.1, "top_p": 0.9, "max_tokens": 10000,
                           "seed": 42, "model_id": "mock"},
            "compiler_id": "gcc",
            "worker_count": 4,
            "seed": 42,
            "rule_flag": "-ftree-coalesce-vars",
            "client": {"kind": "mock-echo"},
        }
        cfg_path = out_dir / f"config_{mode.replace('-', '_')}.json"
        cfg_path.write_text(json.dumps(config, indent=2), encoding="utf-8")
        print(f"== decompile run --mode {mode}")
        print(cli("decompile", "run", "--config", str(cfg_path)), end="")
        record_files[mode] = records

    # a broken run to give the transition report something to show
    broken = out_dir / "records_broken.jsonl"
    cfg = json.loads((out_dir / "config_icl4d_r.json").read_text())
    cfg["client"] = {"kind": "mock-echo-broken"}
    cfg["paths"]["output"] = str(broken)
    broken_cfg = out_dir / "config_broken.json"
    broken_cfg.write_text(json.dumps(cfg), encoding="utf-8")
    print("== decompile run (semicolon-stripped echo, forces Syntax failures)")
    print(cli("decompile", "run", "--config", str(broken_cfg)), end="")

    print("== error distribution of the broken run")
    print(cli("report", "errors", "--records", str(broken)), end="")

    print("== transition flows broken -> retrieval")
    print(cli("report", "transitions", "--a", str(broken), "--b", str(record_files["icl4d-r"])), end="")

    print("== success stratified by complexity (retrieval run)")
    print(cli("report", "strata", "--records", str(record_files["icl4d-r"]),
              "--bundles", str(FIXTURES / "bundles")), end="")

    print(f"\nartifacts in {out_dir}")


if __name__ == "__main__":
    main()
