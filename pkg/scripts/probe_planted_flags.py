#!/usr/bin/env python3
"""Flag-activity probe demo on the planted 8-flag scenario.

Runs group bisection against the exhaustive per-flag reference on the
frame-using fixture and prints both verdicts plus compiler invocation
counts, then ranks the planted flags by activation frequency across
optimization levels O1-O3.

Usage: python scripts/probe_planted_flags.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from redecomp.flags import Prober, bisect_groups, probe_exhaustive, probe_samples  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures" / "flags"


def main() -> None:
    source = (FIXTURES / "frame.c").read_text(encoding="utf-8")
    flags = [
        line.strip()
        for line in (FIXTURES / "planted_flags.txt").read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    base = ("-O1",)

    exhaustive_prober = Prober()
    exhaustive = probe_exhaustive(exhaustive_prober, flags, "frame", source, base)
    print(f"exhaustive ({exhaustive_prober.invocations} compiles): {sorted(exhaustive)}")

    bisect_prober = Prober()
    bisected = bisect_groups(bisect_prober, flags, "frame", source, base)
    print(f"bisection  ({bisect_prober.invocations} compiles): {sorted(bisected)}")
    print(f"agree: {exhaustive == bisected}")

    print("\nactivation frequencies over O1-O3:")
    report = probe_samples(Prober(), flags, [("frame", source)], ["O1", "O2", "O3"])
    for flag, freq in report.ranking:
        print(f"  {freq:.2f}  {flag}")


if __name__ == "__main__":
    main()
