"""Compile-and-execute evaluation of candidate sources.

Each candidate is compiled at -O0 against its bundle's driver, run in a
fresh working directory under wall-clock and address-space limits, and
classified into one of six outcome statuses. Compile and run each get
their own 5 s budget. All file references are relative to the per-job
directory, so captured diagnostics never leak host paths and identical
candidates produce identical outcomes.
"""

from __future__ import annotations

import json
import os
import resource
import shutil
import signal
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import EmptyInput, SandboxFailure

COMPILE_TIMEOUT_S = 5.0
RUN_TIMEOUT_S = 5.0
MEMORY_LIMIT_MB = 512


class ExecStatus(str, Enum):
    PASS = "Pass"
    COMPILE_FAIL = "CompileFail"
    RUN_FAIL = "RunFail"
    OUTPUT_MISMATCH = "OutputMismatch"
    COMPILE_TIMEOUT = "CompileTimeout"
    RUN_TIMEOUT = "RunTimeout"


@dataclass(frozen=True)
class TestHarness:
    """Driver plus reference outputs for one function under test."""

    __test__ = False  # not a pytest class, despite the name

    driver_source: str
    expected_stdout: str | None = None
    link_inputs: tuple[tuple[str, str], ...] = ()  # (filename, content)


@dataclass
class ExecOutcome:
    status: ExecStatus
    stderr_text: str
    stdout_text: str
    compile_time_s: float = 0.0
    run_time_s: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status is ExecStatus.PASS


def _limit_address_space():
    limit = MEMORY_LIMIT_MB * 1024 * 1024
    resource.setrlimit(resource.RLIMIT_AS, (limit, limit))


def _run_limited(
    cmd: list[str],
    cwd: str,
    timeout_s: float,
    limit_memory: bool = False,
) -> tuple[int, str, str, float, bool]:
    """Run a command in its own process group; kill the whole group on
    timeout so compiler/child processes do not linger."""
    start = time.perf_counter()
    proc = subprocess.Popen(
        cmd,
        cwd=cwd,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
        start_new_session=True,
        preexec_fn=_limit_address_space if limit_memory else None,
        env={"PATH": os.environ.get("PATH", "/usr/bin:/bin"), "LC_ALL": "C"},
    )
    try:
        stdout, stderr = proc.communicate(timeout=timeout_s)
        return proc.returncode, stdout, stderr, time.perf_counter() - start, False
    except subprocess.TimeoutExpired:
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        proc.communicate()
        return -9, "", "", time.perf_counter() - start, True


def _normalize_stdout(text: str) -> str:
    return text.rstrip("\n")


def evaluate_candidate(
    candidate: str,
    harness: TestHarness,
    compiler_id: str = "gcc",
    keep_dir: bool = False,
) -> ExecOutcome:
    """Compile candidate + driver at -O0 and execute against the harness."""
    if not candidate.strip():
        return ExecOutcome(
            status=ExecStatus.COMPILE_FAIL,
            stderr_text="empty candidate source",
            stdout_text="",
        )
    if shutil.which(compiler_id) is None:
        raise SandboxFailure(f"compiler not found: {compiler_id}")
    try:
        workdir = tempfile.mkdtemp(prefix="redecomp-eval-")
    except OSError as exc:
        raise SandboxFailure(f"cannot create sandbox: {exc}") from exc
    try:
        Path(workdir, "candidate.c").write_text(candidate, encoding="utf-8")
        Path(workdir, "driver.c").write_text(harness.driver_source, encoding="utf-8")
        link_names = []
        for name, content in harness.link_inputs:
            Path(workdir, name).write_text(content, encoding="utf-8")
            if name.endswith(".c"):
                link_names.append(name)

        cmd = [compiler_id, "-O0", "-o", "prog", "candidate.c", "driver.c", *link_names, "-lm"]
        rc, _, stderr, compile_time, timed_out = _run_limited(
            cmd, workdir, COMPILE_TIMEOUT_S
        )
        if timed_out:
            return ExecOutcome(
                status=ExecStatus.COMPILE_TIMEOUT,
                stderr_text=f"compile timeout after {COMPILE_TIMEOUT_S:.0f}s",
                stdout_text="",
                compile_time_s=compile_time,
            )
        if rc != 0:
            return ExecOutcome(
                status=ExecStatus.COMPILE_FAIL,
                stderr_text=stderr,
                stdout_text="",
                compile_time_s=compile_time,
            )

        rc, stdout, stderr, run_time, timed_out = _run_limited(
            ["./prog"], workdir, RUN_TIMEOUT_S, limit_memory=True
        )
        if timed_out:
            return ExecOutcome(
                status=ExecStatus.RUN_TIMEOUT,
                stderr_text=f"run timeout after {RUN_TIMEOUT_S:.0f}s",
                stdout_text="",
                compile_time_s=compile_time,
                run_time_s=run_time,
            )
        if rc != 0:
            return ExecOutcome(
                status=ExecStatus.RUN_FAIL,
                stderr_text=stderr or f"exit status {rc}",
                stdout_text=stdout,
                compile_time_s=compile_time,
                run_time_s=run_time,
            )
        if harness.expected_stdout is not None and _normalize_stdout(
            stdout
        ) != _normalize_stdout(harness.expected_stdout):
            return ExecOutcome(
                status=ExecStatus.OUTPUT_MISMATCH,
                stderr_text="stdout does not match expected output",
                stdout_text=stdout,
                compile_time_s=compile_time,
                run_time_s=run_time,
            )
        return ExecOutcome(
            status=ExecStatus.PASS,
            stderr_text=stderr,
            stdout_text=stdout,
            compile_time_s=compile_time,
            run_time_s=run_time,
        )
    finally:
        if not keep_dir:
            shutil.rmtree(workdir, ignore_errors=True)


@dataclass
class EsrReport:
    total: int
    passed: int
    breakdown: dict[str, dict] = field(default_factory=dict)

    @property
    def esr(self) -> float:
        return self.passed / self.total

    @property
    def esr_4dp(self) -> str:
        return f"{self.esr:.4f}"


def esr(outcomes: list[ExecOutcome]) -> EsrReport:
    """Executable success rate: the fraction of Pass outcomes."""
    if not outcomes:
        raise EmptyInput("no outcomes to aggregate")
    passed = sum(1 for o in outcomes if o.passed)
    return EsrReport(total=len(outcomes), passed=passed)


def grouped_esr(rows: list[tuple[tuple, bool]]) -> dict[tuple, EsrReport]:
    """Per-group ESR from ((dataset, opt_level, method), passed) rows."""
    if not rows:
        raise EmptyInput("no rows to aggregate")
    groups: dict[tuple, list[bool]] = {}
    for key, ok in rows:
        groups.setdefault(key, []).append(ok)
    return {
        key: EsrReport(total=len(oks), passed=sum(oks))
        for key, oks in sorted(groups.items())
    }


# --- harness bundles ----------------------------------------------------------
#
# Bundle directory layout:
#   driver.c             the test driver (required)
#   func0.c              ground-truth function (required)
#   target.s             raw target assembly for decompilation (required
#                        for pipeline runs)
#   expected_stdout.txt  reference stdout (optional; absent means the
#                        driver signals failure by exit status)
#   meta.json            {sample_id, dataset, compiler_id, opt_level}
#   *.c / *.h extras     linked into the build


@dataclass
class HarnessBundle:
    sample_id: str
    dataset: str
    compiler_id: str
    opt_level: str
    harness: TestHarness
    ground_truth: str
    target_asm_raw: str


def load_bundle(path: str | Path) -> HarnessBundle:
    path = Path(path)
    meta = json.loads((path / "meta.json").read_text(encoding="utf-8"))
    expected = None
    expected_path = path / "expected_stdout.txt"
    if expected_path.exists():
        expected = expected_path.read_text(encoding="utf-8")
    extras = []
    for p in sorted(path.iterdir()):
        if p.name in ("driver.c", "func0.c", "meta.json", "expected_stdout.txt", "target.s"):
            continue
        if p.suffix in (".c", ".h"):
            extras.append((p.name, p.read_text(encoding="utf-8")))
    target_path = path / "target.s"
    return HarnessBundle(
        sample_id=meta["sample_id"],
        dataset=meta.get("dataset", "local"),
        compiler_id=meta.get("compiler_id", "gcc"),
        opt_level=meta.get("opt_level", "O0"),
        harness=TestHarness(
            driver_source=(path / "driver.c").read_text(encoding="utf-8"),
            expected_stdout=expected,
            link_inputs=tuple(extras),
        ),
        ground_truth=(path / "func0.c").read_text(encoding="utf-8"),
        target_asm_raw=target_path.read_text(encoding="utf-8") if target_path.exists() else "",
    )


def load_bundles(root: str | Path) -> list[HarnessBundle]:
    root = Path(root)
    bundles = [load_bundle(p) for p in sorted(root.iterdir()) if p.is_dir()]
    return sorted(bundles, key=lambda b: b.sample_id)
