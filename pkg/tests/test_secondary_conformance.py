"""Provider conformance for the optional embedding service.

Runs only when the embed-service package is installed; every primary
criterion passes without it. The service is exercised over its real wire
protocol (uvicorn subprocess + HTTP), never via imports into the
pipeline.
"""

import socket
import subprocess
import sys
import time

import numpy as np
import pytest

pytest.importorskip("embed_service")
requests = pytest.importorskip("requests")

from redecomp.corpus import Corpus
from redecomp.index import (
    FallbackEmbedder,
    RetrievalConfig,
    ServiceEmbedder,
    build_index,
    retrieve_topk,
)
from oracles import brute_force_topk


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="module")
def service_url():
    port = _free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "embed_service.cli", "serve", "--port", str(port)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    url = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            try:
                if requests.get(f"{url}/health", timeout=1).status_code == 200:
                    break
            except requests.RequestException:
                time.sleep(0.1)
        else:
            pytest.fail("embed service did not come up")
        yield url
    finally:
        proc.terminate()
        proc.wait(timeout=10)


@pytest.fixture(scope="module")
def shared_requests(fixture_corpus):
    """The shared request fixtures: normalized fixture assembly bodies."""
    return [p.asm.body for p in fixture_corpus.pairs[:10]]


@pytest.mark.slow
class TestProviderConformance:
    def test_health_advertises_dimension(self, service_url):
        body = requests.get(f"{service_url}/health", timeout=5).json()
        assert body["d"] == 1024
        assert body["model_id"]

    def test_shared_fixtures_d1024_finite_deterministic(self, service_url, shared_requests):
        embedder = ServiceEmbedder(service_url, dimension=1024)
        for asm in shared_requests:
            first = embedder.embed(asm)
            second = embedder.embed(asm)
            assert first.shape == (1024,)
            assert np.all(np.isfinite(first))
            assert np.any(first)
            assert np.array_equal(first, second)

    def test_index_via_service_vs_fallback(self, service_url, fixture_corpus):
        subset = Corpus(pairs=fixture_corpus.pairs[:12])
        service = ServiceEmbedder(service_url, dimension=1024)
        fallback = FallbackEmbedder(dimension=1024)
        index_service = build_index(subset, service)
        index_fallback = build_index(subset, fallback)

        # valid but different embeddings
        assert not np.allclose(index_service.vectors, index_fallback.vectors)

        # both rankings must agree exactly with the brute-force reference
        cfg = RetrievalConfig(k=5, alpha=0.9, csls_neighborhood=5)
        target_asm = fixture_corpus.pairs[20].asm.body
        target_tags = fixture_corpus.pairs[20].tags
        for index, provider in ((index_service, service), (index_fallback, fallback)):
            query = provider.embed(target_asm)
            got = retrieve_topk(index, query, target_tags, cfg)
            want = brute_force_topk(
                index.vectors, index.pair_ids, index.tags, query, target_tags,
                k=5, alpha=0.9, n_neighbors=5,
            )
            assert [(c.pair_id, c.raw_csls, c.adjusted, c.category_match) for c in got] == want
