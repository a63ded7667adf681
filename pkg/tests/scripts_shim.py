"""Shared access to the golden-prompt inputs used by the fixture generator."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "scripts"))

from gen_fixtures import GOLDEN_EXEMPLARS, GOLDEN_TARGET  # noqa: E402

from redecomp.context import Exemplar


def golden_prompt_inputs():
    exemplars = [Exemplar(a, s, score) for a, s, score in GOLDEN_EXEMPLARS]
    return GOLDEN_TARGET, exemplars
