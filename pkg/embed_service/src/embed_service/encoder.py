"""Encoders behind the embedding endpoint.

The served model is configuration, not code: anything exposing
per-instruction token embeddings can be mounted. The built-in encoder
needs no weights; it derives a deterministic Gaussian vector per token
from a hash seed and averages per-line token means, treating one line of
normalized assembly as one instruction.
"""

from __future__ import annotations

import hashlib

import numpy as np


class ModelLoadFailure(RuntimeError):
    """The configured encoder could not be constructed."""


class HashProjectionEncoder:
    """Deterministic stand-in for a pretrained assembly encoder.

    Each token maps to a fixed pseudo-random Gaussian vector (seeded from
    the token's hash); an instruction embeds as the mean of its token
    vectors, and the function embeds as the L2-normalized mean over
    instruction embeddings.
    """

    def __init__(self, dimension: int = 1024):
        self.dimension = dimension
        self.model_id = f"builtin:hash-proj-{dimension}"
        self._token_cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        cached = self._token_cache.get(token)
        if cached is None:
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            rng = np.random.default_rng(int.from_bytes(digest, "big"))
            cached = rng.standard_normal(self.dimension)
            if len(self._token_cache) < 65536:
                self._token_cache[token] = cached
        return cached

    def encode(self, asm_text: str) -> np.ndarray:
        instruction_means = []
        for line in asm_text.splitlines():
            tokens = line.split()
            if not tokens:
                continue
            token_vectors = np.stack([self._token_vector(t) for t in tokens])
            instruction_means.append(token_vectors.mean(axis=0))
        if not instruction_means:
            tokens = asm_text.split() or ["<empty>"]
            instruction_means = [
                np.stack([self._token_vector(t) for t in tokens]).mean(axis=0)
            ]
        vec = np.stack(instruction_means).mean(axis=0)
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            vec = np.zeros(self.dimension)
            vec[0] = 1.0
            norm = 1.0
        return vec / norm


def load_encoder(model_spec: str, dimension: int = 1024):
    """Mount the configured encoder.

    ``builtin:hash-proj`` needs no weights. Any other spec is treated as a
    local path or hub id for a token-embedding model and must be loadable,
    otherwise startup fails.
    """
    if model_spec.startswith("builtin:hash-proj") or model_spec == "builtin":
        return HashProjectionEncoder(dimension=dimension)
    try:
        from transformers import AutoModel, AutoTokenizer  # noqa: F401
    except ImportError as exc:
        raise ModelLoadFailure(
            f"transformers is required to mount {model_spec!r}"
        ) from exc
    try:
        return _TransformerEncoder(model_spec, dimension)
    except Exception as exc:
        raise ModelLoadFailure(f"cannot load encoder {model_spec!r}: {exc}") from exc


class _TransformerEncoder:
    """Adapter for hub/local token-embedding models (mean pooled)."""

    def __init__(self, model_spec: str, dimension: int):
        import torch
        from transformers import AutoModel, AutoTokenizer

        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_spec)
        self.model = AutoModel.from_pretrained(model_spec)
        self.model.eval()
        self.dimension = dimension
        self.model_id = model_spec

    def encode(self, asm_text: str) -> np.ndarray:
        with self._torch.no_grad():
            inputs = self.tokenizer(
                asm_text, return_tensors="pt", truncation=True, max_length=2048
            )
            hidden = self.model(**inputs).last_hidden_state[0]
            vec = hidden.mean(dim=0).numpy().astype(np.float64)
        if vec.shape[0] != self.dimension:
            raise ModelLoadFailure(
                f"model emits {vec.shape[0]} dims, endpoint advertises {self.dimension}"
            )
        norm = np.linalg.norm(vec)
        return vec / norm if norm else vec
