import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redecomp.corpus import FunctionTag
from redecomp.errors import BuildRejected, DimensionMismatch, EmptyIndex, IndexTooSmall, VersionMismatch
from redecomp.index import (
    FallbackEmbedder,
    RetrievalConfig,
    VectorIndex,
    build_index,
    category_match,
    csls,
    csls_scores,
    load_index,
    retrieve_topk,
    save_index,
    validate_vector,
)
from oracles import brute_force_topk


def make_index(vectors, tags=None, ids=None) -> VectorIndex:
    vectors = np.asarray(vectors, dtype=np.float64)
    n = vectors.shape[0]
    ids = ids or [f"id{i:04d}" for i in range(n)]
    tags = tags or [frozenset() for _ in range(n)]
    return VectorIndex(
        dimension=vectors.shape[1],
        pair_ids=list(ids),
        vectors=vectors,
        tags=list(tags),
        provider_id="test",
    )


class TestFallbackEmbedder:
    def test_deterministic(self):
        e = FallbackEmbedder(dimension=128)
        body = "push rbp\nmov rsp , rbp\nret"
        assert np.array_equal(e.embed(body), e.embed(body))

    def test_unit_norm(self):
        e = FallbackEmbedder(dimension=128)
        for body in ("ret", "push rbp\nret", "a\nb\nc\nd\ne"):
            assert abs(np.linalg.norm(e.embed(body)) - 1.0) < 1e-6

    def test_swapped_instructions_change_ngrams(self):
        # 4-instruction toy: unigram multisets match, 2/3-grams differ
        e = FallbackEmbedder(dimension=1024)
        v1 = e.embed("inca\nincb\nincc\nincd")
        v2 = e.embed("inca\nincc\nincb\nincd")
        assert float(v1 @ v2) < 1.0 - 1e-9

    def test_dimension_respected(self):
        assert FallbackEmbedder(dimension=64).embed("ret").shape == (64,)


class TestValidation:
    def test_wrong_length(self):
        with pytest.raises(DimensionMismatch):
            validate_vector(np.ones(3), 4)

    def test_non_finite(self):
        with pytest.raises(DimensionMismatch):
            validate_vector(np.array([1.0, np.nan]), 2)

    def test_all_zero(self):
        with pytest.raises(DimensionMismatch):
            validate_vector(np.zeros(4), 4)


class TestCsls:
    def test_orthonormal_toy(self):
        # query equals entry e1, N=2: every other cosine is 0, so both
        # neighborhood means vanish and the score is exactly 2.
        index = make_index(np.eye(3))
        value = csls(index, np.eye(3)[0], "id0000", n_neighbors=2, query_id="id0000")
        assert value == pytest.approx(2.0, abs=1e-12)

    def test_symmetry_for_in_index_points(self):
        rng = np.random.default_rng(7)
        index = make_index(rng.standard_normal((6, 8)))
        a = csls(index, index.vectors[1], "id0003", 3, query_id="id0001")
        b = csls(index, index.vectors[3], "id0001", 3, query_id="id0003")
        assert a == pytest.approx(b, abs=1e-12)

    def test_all_identical_vectors_score_zero(self):
        index = make_index(np.tile([1.0, 2.0, 2.0], (4, 1)))
        for i in range(4):
            value = csls(index, index.vectors[i], f"id{i:04d}", 2, query_id=f"id{i:04d}")
            assert value == pytest.approx(0.0, abs=1e-12)

    def test_empty_index(self):
        index = make_index(np.ones((1, 3)))
        index.pair_ids.clear()
        index.vectors = np.empty((0, 3))
        index.tags.clear()
        with pytest.raises(EmptyIndex):
            csls_scores(index, np.ones(3), 2)


class TestCategoryMatch:
    def test_intersection(self):
        assert category_match(frozenset({FunctionTag.IO}), frozenset({FunctionTag.IO, FunctionTag.MATH}))

    def test_disjoint(self):
        assert not category_match(frozenset({FunctionTag.IO}), frozenset({FunctionTag.MATH}))

    def test_empty_is_wildcard(self):
        assert category_match(frozenset(), frozenset({FunctionTag.MATH}))
        assert category_match(frozenset({FunctionTag.IO}), frozenset())


class TestRetrieveTopk:
    def test_k_zero(self):
        index = make_index(np.eye(3))
        assert retrieve_topk(index, np.eye(3)[0], frozenset(), RetrievalConfig(k=0)) == []

    def test_index_too_small(self):
        index = make_index(np.eye(3))
        with pytest.raises(IndexTooSmall):
            retrieve_topk(index, np.eye(3)[0], frozenset(), RetrievalConfig(k=5, csls_neighborhood=2))

    def test_penalty_flips_order_at_alpha_boundary(self):
        # 5 planted directions; the closest candidate is tag-mismatched.
        # Two near the query keep positive scores; three sit far away.
        angles = [0.05, 0.15, 1.5, 1.7, 1.9]
        vectors = np.array([[np.cos(a), np.sin(a)] for a in angles])
        tags = [
            frozenset({FunctionTag.MATH}),  # closest, mismatched
            frozenset({FunctionTag.IO}),
            frozenset({FunctionTag.IO}),
            frozenset({FunctionTag.IO}),
            frozenset({FunctionTag.IO}),
        ]
        index = make_index(vectors, tags=tags)
        query = np.array([1.0, 0.0])
        target = frozenset({FunctionTag.IO})
        cfg_raw = RetrievalConfig(k=5, alpha=1.0, csls_neighborhood=2)
        raw_rank = retrieve_topk(index, query, target, cfg_raw)
        s1, s2 = raw_rank[0].raw_csls, raw_rank[1].raw_csls
        assert raw_rank[0].pair_id == "id0000" and not raw_rank[0].category_match
        assert s1 > s2 > 0
        boundary = s2 / s1
        above = retrieve_topk(
            index, query, target, RetrievalConfig(k=5, alpha=min(1.0, boundary + 0.02), csls_neighborhood=2)
        )
        below = retrieve_topk(
            index, query, target, RetrievalConfig(k=5, alpha=boundary - 0.02, csls_neighborhood=2)
        )
        assert above[0].pair_id == "id0000"  # penalty too weak to flip
        assert below[0].pair_id == "id0001"  # penalty flips the order

    def test_random_mode_seeded_determinism(self):
        index = make_index(np.random.default_rng(0).standard_normal((8, 4)))
        cfg = RetrievalConfig(k=3, csls_neighborhood=2)
        a = retrieve_topk(index, np.ones(4), frozenset(), cfg, mode="random",
                          rng=np.random.default_rng(42))
        b = retrieve_topk(index, np.ones(4), frozenset(), cfg, mode="random",
                          rng=np.random.default_rng(42))
        assert [c.pair_id for c in a] == [c.pair_id for c in b]
        assert all(c.raw_csls is None and c.adjusted is None for c in a)
        assert len({c.pair_id for c in a}) == 3

    def test_ties_broken_by_pair_id(self):
        vectors = np.tile([0.5, 0.5], (4, 1))
        index = make_index(vectors, ids=["z", "a", "m", "c"])
        got = retrieve_topk(index, np.array([0.5, 0.5]), frozenset(),
                            RetrievalConfig(k=4, csls_neighborhood=2))
        assert [c.pair_id for c in got] == ["a", "c", "m", "z"]


class TestPenaltyLaw:
    @settings(max_examples=200, deadline=None)
    @given(
        st.integers(min_value=5, max_value=24),
        st.floats(min_value=0.05, max_value=1.0),
        st.integers(min_value=0, max_value=2**31 - 1),
    )
    def test_adjusted_is_raw_or_alpha_raw(self, n, alpha, seed):
        rng = np.random.default_rng(seed)
        vectors = rng.standard_normal((n, 6))
        all_tags = list(FunctionTag)
        tags = [
            frozenset(rng.choice(all_tags, size=rng.integers(0, 3), replace=False).tolist())
            for _ in range(n)
        ]
        index = make_index(vectors, tags=tags)
        target = frozenset(
            rng.choice(all_tags, size=rng.integers(0, 3), replace=False).tolist()
        )
        cfg = RetrievalConfig(k=min(5, n), alpha=alpha, csls_neighborhood=3)
        for c in retrieve_topk(index, rng.standard_normal(6), target, cfg):
            if c.category_match:
                assert c.adjusted == c.raw_csls
            else:
                assert c.adjusted == alpha * c.raw_csls
            expected_match = (
                not target or not index.tags[index.position(c.pair_id)]
                or bool(target & index.tags[index.position(c.pair_id)])
            )
            assert c.category_match == expected_match


class TestAlphaMonotonicity:
    @settings(max_examples=150, deadline=None)
    @given(
        st.floats(min_value=0.3, max_value=0.95),
        st.floats(min_value=0.01, max_value=0.05),
        st.integers(min_value=0, max_value=2**31 - 1),
    )
    def test_raising_alpha_never_demotes_mismatched_vs_matched(self, alpha, bump, seed):
        # multiplicative penalty: for nonnegative raw scores, a mismatched
        # candidate that outranks a matched one keeps outranking it as
        # alpha rises toward 1
        rng = np.random.default_rng(seed)
        n = 12
        vectors = rng.standard_normal((n, 6))
        tags = [
            frozenset({FunctionTag.MATH}) if i % 2 == 0 else frozenset({FunctionTag.IO})
            for i in range(n)
        ]
        index = make_index(vectors, tags=tags)
        query = rng.standard_normal(6)
        target = frozenset({FunctionTag.IO})

        def ranking(a):
            cfg = RetrievalConfig(k=n, alpha=a, csls_neighborhood=3)
            return retrieve_topk(index, query, target, cfg)

        low = ranking(alpha)
        high = ranking(min(1.0, alpha + bump))
        pos_low = {c.pair_id: i for i, c in enumerate(low)}
        pos_high = {c.pair_id: i for i, c in enumerate(high)}
        for c in low:
            if c.category_match or c.raw_csls < 0:
                continue
            for other in low:
                if not other.category_match or other.raw_csls < 0:
                    continue
                if pos_low[c.pair_id] < pos_low[other.pair_id]:
                    assert pos_high[c.pair_id] < pos_high[other.pair_id]


class TestOracleEquivalence:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(6, 60))
        d = int(rng.integers(4, 24))
        vectors = rng.standard_normal((n, d))
        if rng.random() < 0.3:  # inject duplicate vectors to force ties
            vectors[1] = vectors[0]
        all_tags = list(FunctionTag)
        tags = [
            frozenset(rng.choice(all_tags, size=rng.integers(0, 2), replace=False).tolist())
            for _ in range(n)
        ]
        ids = [f"h{rng.integers(0, 10**9):09d}-{i}" for i in range(n)]
        index = make_index(vectors, tags=tags, ids=ids)
        query = rng.standard_normal(d)
        target = frozenset(rng.choice(all_tags, size=rng.integers(0, 2), replace=False).tolist())
        k = int(rng.integers(1, min(8, n)))
        alpha = float(rng.uniform(0.5, 1.0))
        nn = int(rng.integers(1, min(10, n)))
        cfg = RetrievalConfig(k=k, alpha=alpha, csls_neighborhood=nn)
        got = retrieve_topk(index, query, target, cfg)
        want = brute_force_topk(vectors, ids, tags, query, target, k, alpha, nn)
        assert [(c.pair_id, c.raw_csls, c.adjusted, c.category_match) for c in got] == want


class TestPersistRoundTrip:
    def test_build_save_load(self, fixture_corpus, tmp_path):
        index = build_index(fixture_corpus, FallbackEmbedder(dimension=128))
        path = tmp_path / "index.npz"
        save_index(index, path)
        loaded = load_index(path)
        assert loaded.pair_ids == index.pair_ids
        assert np.array_equal(loaded.vectors, index.vectors)
        assert loaded.tags == index.tags
        rng = np.random.default_rng(3)
        cfg = RetrievalConfig(k=5, csls_neighborhood=4)
        for _ in range(10):
            q = rng.standard_normal(128)
            a = retrieve_topk(index, q, frozenset(), cfg)
            b = retrieve_topk(loaded, q, frozenset(), cfg)
            assert [(c.pair_id, c.adjusted) for c in a] == [(c.pair_id, c.adjusted) for c in b]

    def test_empty_corpus_rejected(self):
        from redecomp.corpus import Corpus

        with pytest.raises(BuildRejected):
            build_index(Corpus(pairs=[]), FallbackEmbedder(dimension=16))

    def test_version_mismatch(self, fixture_corpus, tmp_path):
        import redecomp.index as index_mod

        index = build_index(fixture_corpus, FallbackEmbedder(dimension=16))
        path = tmp_path / "index.npz"
        old = index_mod.INDEX_FORMAT_VERSION
        try:
            index_mod.INDEX_FORMAT_VERSION = 999
            save_index(index, path)
        finally:
            index_mod.INDEX_FORMAT_VERSION = old
        with pytest.raises(VersionMismatch):
            load_index(path)

    @pytest.mark.slow
    def test_thousand_entry_build_under_five_seconds(self):
        import time

        from redecomp.asmnorm import CanonicalSource, NormalizedAsm, OptLevel
        from redecomp.corpus import Corpus, CorpusPair, Provenance, StructuralMetrics, pair_id

        ops = ["movl", "addl", "subl", "imull", "xorl", "cmpl", "jne", "call", "push", "pop"]
        pairs = []
        for i in range(1000):
            body = "\n".join(f"{ops[(i + j) % len(ops)]} ${i + j} , eax" for j in range(12))
            src = f"int func0(void) {{\n    return {i};\n}}\n"
            pairs.append(
                CorpusPair(
                    id=pair_id(body, src),
                    asm=NormalizedAsm("func0", body),
                    src=CanonicalSource("func0", src, "f"),
                    tags=frozenset(),
                    metrics=StructuralMetrics(3, 1, 1),
                    provenance=Provenance("synthetic", "gcc", OptLevel.O0),
                )
            )
        corpus = Corpus(pairs=pairs)
        start = time.monotonic()
        index = build_index(corpus, FallbackEmbedder(dimension=1024))
        elapsed = time.monotonic() - start
        assert len(index) == 1000
        assert elapsed < 5.0, f"build took {elapsed:.2f}s"

    def test_rank_invariance_under_scaling(self, fixture_corpus):
        index = build_index(fixture_corpus, FallbackEmbedder(dimension=64))
        q = FallbackEmbedder(dimension=64).embed("push rbp\nmov rsp , rbp\ncall x\nret")
        cfg = RetrievalConfig(k=5, csls_neighborhood=5)
        a = retrieve_topk(index, q, frozenset(), cfg)
        b = retrieve_topk(index, q * 1000.0, frozenset(), cfg)
        assert [c.pair_id for c in a] == [c.pair_id for c in b]
