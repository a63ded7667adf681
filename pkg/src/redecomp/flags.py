"""Which optimization flags actually fire: toggle, recompile, diff.

A flag is active on a sample when compiling with the flag enabled vs
disabled (its ``-fno-`` negation), all else fixed, yields different
normalized token sequences. Groups of flags are toggled together and
pruned when the group shows no diff, so large candidate lists need far
fewer compiles than exhaustive per-flag probing.
"""

from __future__ import annotations

import hashlib
import shutil
import subprocess
from dataclasses import dataclass, field

from .asmnorm import OptLevel, RawAssemblyUnit, normalize_asm
from .errors import CompileFailed, CompilerMissing, EmptyInput, NoDecidableSamples

COMPILE_TIMEOUT_S = 30.0


@dataclass(frozen=True)
class FlagCandidate:
    name: str
    group: str | None = None

    def __post_init__(self):
        if not self.name.startswith("-f"):
            raise ValueError(f"flag must start with -f: {self.name}")

    @property
    def negation(self) -> str:
        return "-fno-" + self.name[2:]


@dataclass(frozen=True)
class DiffEvidence:
    token_index: int
    enabled_window: str
    disabled_window: str


@dataclass(frozen=True)
class ActivationResult:
    flag: str
    sample_id: str
    active: bool
    evidence: DiffEvidence | None = None

    def __post_init__(self):
        if self.active and self.evidence is None:
            raise ValueError("active results must carry evidence")
        if not self.active and self.evidence is not None:
            raise ValueError("inactive results must not carry evidence")


@dataclass(frozen=True)
class UndecidableSample:
    flag: str
    sample_id: str
    reason: str


class Prober:
    """Compiles samples with toggled flags and diffs normalized output.

    Results are cached per exact flag combination; ``invocations`` counts
    real compiler spawns (cache hits are free).
    """

    def __init__(self, compiler_id: str = "gcc"):
        if shutil.which(compiler_id) is None:
            raise CompilerMissing(f"compiler not found: {compiler_id}")
        self.compiler_id = compiler_id
        self.invocations = 0
        self._cache: dict[tuple, tuple[str, ...]] = {}

    def compile_to_asm(
        self,
        source: str,
        base_flags: tuple[str, ...],
        toggles: tuple[tuple[str, bool], ...] = (),
    ) -> tuple[str, ...]:
        """Normalized token sequence of the emitted assembly.

        ``toggles`` is a sequence of (flag name, enable) applied after the
        base flags; disable uses the flag's -fno- negation.
        """
        flag_args = []
        for name, enable in toggles:
            cand = FlagCandidate(name)
            flag_args.append(cand.name if enable else cand.negation)
        key = (
            hashlib.sha256(source.encode()).hexdigest(),
            self.compiler_id,
            base_flags,
            tuple(flag_args),
        )
        if key in self._cache:
            return self._cache[key]

        cmd = [self.compiler_id, "-S", "-o", "-", *base_flags, *flag_args, "-xc", "-"]
        self.invocations += 1
        try:
            proc = subprocess.run(
                cmd,
                input=source,
                capture_output=True,
                text=True,
                timeout=COMPILE_TIMEOUT_S,
            )
        except subprocess.TimeoutExpired as exc:
            raise CompileFailed("compiler timed out", diagnostics=str(exc)) from exc
        if proc.returncode != 0:
            raise CompileFailed(
                f"compiler exited {proc.returncode}", diagnostics=proc.stderr
            )
        unit = RawAssemblyUnit(
            origin_path="<probe>",
            compiler_id=self.compiler_id,
            opt_level=_level_of(base_flags),
            text=proc.stdout,
        )
        tokens = tuple(normalize_asm(unit).body.split())
        self._cache[key] = tokens
        return tokens

    def group_diff(
        self,
        source: str,
        base_flags: tuple[str, ...],
        flags: tuple[str, ...],
    ) -> DiffEvidence | None:
        """Evidence of the first token difference when the whole group is
        toggled on vs off; None when the outputs agree."""
        enabled = self.compile_to_asm(source, base_flags, tuple((f, True) for f in flags))
        disabled = self.compile_to_asm(source, base_flags, tuple((f, False) for f in flags))
        return _first_diff(enabled, disabled)


def _level_of(base_flags: tuple[str, ...]) -> OptLevel:
    for f in base_flags:
        if f in ("-O0", "-O1", "-O2", "-O3"):
            return OptLevel(f[1:])
    return OptLevel.O0


def _first_diff(a: tuple[str, ...], b: tuple[str, ...]) -> DiffEvidence | None:
    limit = min(len(a), len(b))
    for i in range(limit):
        if a[i] != b[i]:
            return DiffEvidence(
                token_index=i,
                enabled_window=" ".join(a[max(0, i - 3) : i + 4]),
                disabled_window=" ".join(b[max(0, i - 3) : i + 4]),
            )
    if len(a) != len(b):
        i = limit
        return DiffEvidence(
            token_index=i,
            enabled_window=" ".join(a[max(0, i - 3) : i + 4]),
            disabled_window=" ".join(b[max(0, i - 3) : i + 4]),
        )
    return None


def is_active(
    prober: Prober,
    flag: str,
    sample_id: str,
    source: str,
    base_flags: tuple[str, ...],
) -> ActivationResult:
    """Single-flag activity: toggle just this flag and diff."""
    evidence = prober.group_diff(source, base_flags, (flag,))
    return ActivationResult(
        flag=flag,
        sample_id=sample_id,
        active=evidence is not None,
        evidence=evidence,
    )


def bisect_groups(
    prober: Prober,
    flags: list[str],
    sample_id: str,
    source: str,
    base_flags: tuple[str, ...],
) -> set[str]:
    """Flags individually active on the sample, found by group bisection.

    A group with no observable diff is pruned without testing members
    (assuming member effects do not cancel token-for-token); a diffing
    group is split until singletons, which are exact.
    """
    if not flags:
        raise EmptyInput("no flags to bisect")

    def recurse(group: list[str]) -> set[str]:
        if len(group) == 1:
            result = is_active(prober, group[0], sample_id, source, base_flags)
            return {group[0]} if result.active else set()
        if prober.group_diff(source, base_flags, tuple(group)) is None:
            return set()
        mid = len(group) // 2
        return recurse(group[:mid]) | recurse(group[mid:])

    return recurse(list(flags))


def probe_exhaustive(
    prober: Prober,
    flags: list[str],
    sample_id: str,
    source: str,
    base_flags: tuple[str, ...],
) -> set[str]:
    """Reference mode: per-flag is_active over the whole list."""
    active = set()
    for flag in flags:
        if is_active(prober, flag, sample_id, source, base_flags).active:
            active.add(flag)
    return active


@dataclass
class ActivationReport:
    """Per-flag activation frequency over decidable observations."""

    frequencies: dict[str, float]
    decidable: dict[str, int]
    active_counts: dict[str, int]
    undecidable: list[UndecidableSample] = field(default_factory=list)

    @property
    def ranking(self) -> list[tuple[str, float]]:
        return sorted(self.frequencies.items(), key=lambda kv: (-kv[1], kv[0]))


def rank_flags(
    results: list[ActivationResult | UndecidableSample],
) -> ActivationReport:
    """Activation frequency (active / decidable) per flag, ranked."""
    decidable: dict[str, int] = {}
    active: dict[str, int] = {}
    undecidable: list[UndecidableSample] = []
    flags_seen: set[str] = set()
    for r in results:
        flags_seen.add(r.flag)
        if isinstance(r, UndecidableSample):
            undecidable.append(r)
            continue
        decidable[r.flag] = decidable.get(r.flag, 0) + 1
        if r.active:
            active[r.flag] = active.get(r.flag, 0) + 1
    no_data = [f for f in flags_seen if decidable.get(f, 0) == 0]
    if no_data:
        raise NoDecidableSamples(f"no decidable samples for: {sorted(no_data)}")
    frequencies = {f: active.get(f, 0) / decidable[f] for f in decidable}
    return ActivationReport(
        frequencies=frequencies,
        decidable=decidable,
        active_counts={f: active.get(f, 0) for f in decidable},
        undecidable=undecidable,
    )


def probe_samples(
    prober: Prober,
    flags: list[str],
    samples: list[tuple[str, str]],
    levels: list[str],
    exhaustive: bool = False,
) -> ActivationReport:
    """Probe every flag against every (sample, opt level) observation."""
    results: list[ActivationResult | UndecidableSample] = []
    for level in levels:
        base = (f"-{level}",)
        for sample_id, source in samples:
            obs_id = f"{sample_id}@{level}"
            if exhaustive:
                flags_to_test = flags
            else:
                try:
                    active_set = bisect_groups(prober, flags, obs_id, source, base)
                except CompileFailed as exc:
                    results.extend(
                        UndecidableSample(f, obs_id, str(exc)) for f in flags
                    )
                    continue
                for f in flags:
                    if f in active_set:
                        results.append(is_active(prober, f, obs_id, source, base))
                    else:
                        results.append(ActivationResult(f, obs_id, active=False))
                continue
            for f in flags_to_test:
                try:
                    results.append(is_active(prober, f, obs_id, source, base))
                except CompileFailed as exc:
                    results.append(UndecidableSample(f, obs_id, str(exc)))
    return rank_flags(results)
