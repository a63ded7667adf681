"""Vector index over assembly embeddings with hubness-corrected retrieval.

Similarity between a query and a candidate is scored as

    2 * cos(q, c) - r(q) - r(c)

where r(v) is the mean cosine from v to its N nearest neighbors in the
index. Neighborhoods never include the point itself: candidates always
exclude their own entry, and a query that is itself an index entry
excludes that entry. Scores of category-mismatched candidates are scaled
by the penalty alpha before ranking.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus, FunctionTag
from .errors import (
    BuildRejected,
    DimensionMismatch,
    EmptyIndex,
    IndexTooSmall,
    IoFailure,
    ProviderUnavailable,
    VersionMismatch,
)

INDEX_FORMAT_VERSION = 1


@dataclass(frozen=True)
class RetrievalConfig:
    k: int = 5
    alpha: float = 0.9
    csls_neighborhood: int = 10

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must be in (0, 1]")
        if self.csls_neighborhood < 1:
            raise ValueError("csls_neighborhood must be >= 1")


@dataclass(frozen=True)
class ScoredCandidate:
    pair_id: str
    raw_csls: float | None
    adjusted: float | None
    category_match: bool


def validate_vector(values: np.ndarray, d: int) -> np.ndarray:
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != d:
        raise DimensionMismatch(f"expected {d} dims, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise DimensionMismatch("vector has non-finite values")
    if not np.any(vec):
        raise DimensionMismatch("vector is all-zero")
    return vec


class FallbackEmbedder:
    """Deterministic feature-hash embedding of opcode n-grams (n = 1..3).

    Needs no model: opcodes are the first mnemonic token of each
    instruction line, n-grams are hashed into d buckets with a sign bit,
    and the result is L2-normalized. Identical bodies embed identically on
    any host.
    """

    provider_id = "fallback-ngram"

    def __init__(self, dimension: int = 1024):
        self.dimension = dimension

    def _opcodes(self, asm_text: str) -> list[str]:
        ops = []
        for line in asm_text.splitlines():
            tokens = line.split()
            i = 0
            while i < len(tokens):
                tok = tokens[i]
                if tok.startswith("[INST-") or tok == ":" or tok.endswith(":"):
                    i += 1
                    continue
                if i + 1 < len(tokens) and tokens[i + 1] == ":":
                    i += 2
                    continue
                break
            if i < len(tokens) and not tokens[i].startswith("."):
                ops.append(tokens[i])
        if not ops:
            # directive-only text still embeds: hash raw tokens instead
            ops = asm_text.split()
        return ops

    def embed(self, asm_text: str) -> np.ndarray:
        ops = self._opcodes(asm_text)
        vec = np.zeros(self.dimension, dtype=np.float64)
        for n in (1, 2, 3):
            for i in range(len(ops) - n + 1):
                gram = " ".join(ops[i : i + n])
                digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
                value = int.from_bytes(digest, "big")
                bucket = value % self.dimension
                sign = 1.0 if (value >> 63) & 1 else -1.0
                vec[bucket] += sign
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            vec[0] = 1.0
            norm = 1.0
        return vec / norm


class ServiceEmbedder:
    """Embedding provider backed by the HTTP embedding endpoint.

    Wire protocol: POST {base_url}/embed with {"asm_text": ...}, response
    {"vector": [...], "d": int, "model_id": str}.
    """

    def __init__(self, base_url: str, dimension: int = 1024, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.dimension = dimension
        self.timeout = timeout
        self.provider_id = f"service:{self.base_url}"

    def embed(self, asm_text: str) -> np.ndarray:
        import requests

        try:
            resp = requests.post(
                f"{self.base_url}/embed",
                json={"asm_text": asm_text},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"embed service unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(
                f"embed service returned {resp.status_code}: {resp.text[:200]}"
            )
        payload = resp.json()
        return validate_vector(np.array(payload["vector"]), self.dimension)


@dataclass
class VectorIndex:
    """Immutable-after-build index: ids, vectors, and tag sets."""

    dimension: int
    pair_ids: list[str]
    vectors: np.ndarray  # (n, d) float64
    tags: list[frozenset[FunctionTag]]
    provider_id: str = "unknown"
    _unit: np.ndarray | None = field(default=None, repr=False)
    _entry_r: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.pair_ids)

    @property
    def unit_vectors(self) -> np.ndarray:
        if self._unit is None:
            norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
            self._unit = self.vectors / norms
        return self._unit

    def entry_neighborhood_means(self, n_neighbors: int) -> np.ndarray:
        """r(c) per entry: mean cosine to its nearest neighbors, self excluded.

        Means use correctly-rounded summation (fsum), so any independent
        implementation of the same definition reproduces them bit-for-bit
        regardless of summation order.
        """
        if n_neighbors not in self._entry_r:
            unit = self.unit_vectors
            cos = unit @ unit.T
            np.fill_diagonal(cos, -np.inf)
            take = min(n_neighbors, len(self) - 1)
            if take <= 0:
                self._entry_r[n_neighbors] = np.zeros(len(self))
            else:
                top = np.sort(cos, axis=1)[:, -take:]
                self._entry_r[n_neighbors] = np.array(
                    [math.fsum(row) / take for row in top]
                )
        return self._entry_r[n_neighbors]

    def position(self, pair_id: str) -> int:
        return self.pair_ids.index(pair_id)


def build_index(corpus: Corpus, provider) -> VectorIndex:
    """One entry per corpus pair, in pair_id order."""
    if len(corpus) == 0:
        raise BuildRejected("cannot build an index over an empty corpus")
    pairs = sorted(corpus.pairs, key=lambda p: p.id)
    d = provider.dimension
    vectors = np.empty((len(pairs), d), dtype=np.float64)
    for i, p in enumerate(pairs):
        vectors[i] = validate_vector(provider.embed(p.asm.body), d)
    return VectorIndex(
        dimension=d,
        pair_ids=[p.id for p in pairs],
        vectors=vectors,
        tags=[p.tags for p in pairs],
        provider_id=getattr(provider, "provider_id", "unknown"),
    )


def csls_scores(
    index: VectorIndex,
    query: np.ndarray,
    n_neighbors: int,
    query_id: str | None = None,
) -> np.ndarray:
    """CSLS of the query against every entry.

    ``query_id`` marks a query that is itself an index entry; that entry is
    left out of the query's neighborhood (a point is never its own
    neighbor).
    """
    if len(index) == 0:
        raise EmptyIndex("csls over an empty index")
    q = validate_vector(query, index.dimension)
    qn = q / np.linalg.norm(q)
    unit = index.unit_vectors
    cos_q = unit @ qn

    neighborhood = cos_q
    if query_id is not None:
        pos = index.position(query_id)
        neighborhood = np.delete(cos_q, pos)
    take = min(n_neighbors, neighborhood.shape[0])
    if take <= 0:
        r_q = 0.0
    else:
        r_q = math.fsum(np.sort(neighborhood)[-take:]) / take

    r_entries = index.entry_neighborhood_means(n_neighbors)
    return 2.0 * cos_q - r_q - r_entries


def csls(
    index: VectorIndex,
    query: np.ndarray,
    candidate_id: str,
    n_neighbors: int,
    query_id: str | None = None,
) -> float:
    """CSLS between the query and one candidate entry."""
    scores = csls_scores(index, query, n_neighbors, query_id=query_id)
    return float(scores[index.position(candidate_id)])


def category_match(target_tags: frozenset[FunctionTag], entry_tags: frozenset[FunctionTag]) -> bool:
    """Tag sets match when they intersect; an empty set is a wildcard."""
    if not target_tags or not entry_tags:
        return True
    return bool(target_tags & entry_tags)


def retrieve_topk(
    index: VectorIndex,
    query: np.ndarray,
    target_tags: frozenset[FunctionTag],
    cfg: RetrievalConfig,
    mode: str = "similar",
    rng: np.random.Generator | None = None,
    query_id: str | None = None,
) -> list[ScoredCandidate]:
    """Top-k exemplars by penalty-adjusted CSLS, or a seeded random draw.

    similar: rank all entries by adjusted score descending, ties broken by
    ascending pair_id. random: k uniform entries without replacement from
    ``rng``; scores are reported as not-applicable.
    """
    if cfg.k == 0:
        return []
    if len(index) < cfg.k:
        raise IndexTooSmall(f"index has {len(index)} entries, k={cfg.k}")

    if mode == "random":
        if rng is None:
            rng = np.random.default_rng(0)
        chosen = rng.choice(len(index), size=cfg.k, replace=False)
        return [
            ScoredCandidate(
                pair_id=index.pair_ids[i],
                raw_csls=None,
                adjusted=None,
                category_match=category_match(target_tags, index.tags[i]),
            )
            for i in chosen
        ]
    if mode != "similar":
        raise ValueError(f"unknown retrieval mode: {mode}")

    raw = csls_scores(index, query, cfg.csls_neighborhood, query_id=query_id)
    candidates = []
    for i, pid in enumerate(index.pair_ids):
        match = category_match(target_tags, index.tags[i])
        adjusted = float(raw[i]) if match else cfg.alpha * float(raw[i])
        candidates.append(
            ScoredCandidate(
                pair_id=pid,
                raw_csls=float(raw[i]),
                adjusted=adjusted,
                category_match=match,
            )
        )
    candidates.sort(key=lambda c: (-c.adjusted, c.pair_id))
    return candidates[: cfg.k]


def save_index(index: VectorIndex, path) -> None:
    meta = {
        "format_version": INDEX_FORMAT_VERSION,
        "dimension": index.dimension,
        "provider_id": index.provider_id,
    }
    tags_lists = [sorted(t.value for t in tags) for tags in index.tags]
    try:
        with open(path, "wb") as fh:
            np.savez(
                fh,
                vectors=index.vectors,
                pair_ids=np.array(index.pair_ids),
                tags_json=np.array(json.dumps(tags_lists)),
                meta_json=np.array(json.dumps(meta)),
            )
    except OSError as exc:
        raise IoFailure(f"cannot write index: {exc}") from exc


def load_index(path) -> VectorIndex:
    try:
        with np.load(path) as data:
            meta = json.loads(str(data["meta_json"]))
            if meta.get("format_version") != INDEX_FORMAT_VERSION:
                raise VersionMismatch(
                    f"index format {meta.get('format_version')} != {INDEX_FORMAT_VERSION}"
                )
            tags_lists = json.loads(str(data["tags_json"]))
            return VectorIndex(
                dimension=meta["dimension"],
                pair_ids=[str(p) for p in data["pair_ids"]],
                vectors=np.array(data["vectors"], dtype=np.float64),
                tags=[frozenset(FunctionTag(t) for t in ts) for ts in tags_lists],
                provider_id=meta.get("provider_id", "unknown"),
            )
    except OSError as exc:
        raise IoFailure(f"cannot read index: {exc}") from exc
