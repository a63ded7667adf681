import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_corpus():
    """Corpus built from the 50 checked-in (asm, src) fixture pairs."""
    from redecomp.asmnorm import OptLevel, canonicalize_source, slice_functions
    from redecomp.corpus import build_corpus

    items = []
    src_dir = FIXTURES / "corpus_src"
    for asm_path in sorted(src_dir.glob("*.s")):
        src_text = asm_path.with_suffix(".c").read_text(encoding="utf-8")
        name = canonicalize_source(src_text).original_name
        units, _ = slice_functions(
            asm_path.read_text(encoding="utf-8"),
            [name],
            origin_path=str(asm_path),
            compiler_id="gcc",
            opt_level=OptLevel.O0,
        )
        items.append((units[0], src_text))
    return build_corpus(items, dataset="mini-corpus")


@pytest.fixture(scope="session")
def fixture_index(fixture_corpus):
    from redecomp.index import FallbackEmbedder, build_index

    return build_index(fixture_corpus, FallbackEmbedder(dimension=256))


@pytest.fixture(scope="session")
def fixture_bundles():
    from redecomp.harness import load_bundles

    return load_bundles(FIXTURES / "bundles")
