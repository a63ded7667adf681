"""Generation-model client contract, response extraction, and mocks.

Everything network-facing lives here: the rest of the pipeline sees one
``complete(prompt, params, client)`` call that returns text. Mock clients
make the whole pipeline runnable and byte-reproducible offline.
"""

from __future__ import annotations

import os
import re
import time
from dataclasses import dataclass, field

from .context import Prompt
from .errors import (
    AuthFailure,
    ProviderError,
    RateLimited,
    RedecompError,
    Timeout,
    TokenBudgetExceeded,
)

CREDENTIAL_ENV_VAR = "REDECOMP_API_KEY"


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.1
    top_p: float = 0.9
    max_tokens: int = 10_000
    seed: int = 42
    model_id: str = "mock"

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not (0 < self.top_p <= 1):
            raise ValueError("top_p must be in (0, 1]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


@dataclass
class Usage:
    prompt_tokens: int = 0
    completion_tokens: int = 0


@dataclass
class ModelResponse:
    raw_text: str
    extracted_source: str | None
    usage: Usage
    latency_s: float
    retries: int = 0


class TransientFailure(RedecompError):
    """Internal marker for retryable failures (rate limit, 5xx, timeout)."""


def complete(
    prompt: Prompt,
    params: GenerationParams,
    client,
    max_retries: int = 3,
    backoff_base_s: float = 0.05,
) -> ModelResponse:
    """Run one completion with exponential backoff on transient failures.

    Refuses prompts whose token estimate exceeds ``params.max_tokens``
    before spending anything.
    """
    if prompt.token_estimate > params.max_tokens:
        raise TokenBudgetExceeded(prompt.token_estimate, params.max_tokens)
    retries = 0
    start = time.perf_counter()
    while True:
        try:
            raw = client.generate(prompt.text, params)
            break
        except TransientFailure:
            if retries >= max_retries:
                raise RateLimited(f"gave up after {retries} retries")
            time.sleep(backoff_base_s * (2**retries))
            retries += 1
    latency = time.perf_counter() - start
    return ModelResponse(
        raw_text=raw,
        extracted_source=extract_source(raw),
        usage=Usage(
            prompt_tokens=prompt.token_estimate,
            completion_tokens=len(raw.split()),
        ),
        latency_s=latency,
        retries=retries,
    )


_FENCE_RE = re.compile(r"```[a-zA-Z]*\n(.*?)```", re.DOTALL)
_SIGNATURE_RE = re.compile(
    r"^[ \t]*(?:[A-Za-z_][\w ]*[\w\*][ \t\*]+)?[A-Za-z_]\w*[ \t]*\([^;{]*\)[ \t]*\{",
    re.MULTILINE,
)


def extract_source(raw_text: str) -> str | None:
    """Pull candidate C source out of a model response.

    First fenced code block wins; otherwise the longest span opening at a
    C function signature and closing at balanced braces; otherwise absent.
    """
    m = _FENCE_RE.search(raw_text)
    if m:
        body = m.group(1).strip("\n")
        return body if body.strip() else None

    best: str | None = None
    for m in _SIGNATURE_RE.finditer(raw_text):
        span = _balanced_span(raw_text, m.start())
        if span and (best is None or len(span) > len(best)):
            best = span
    return best


def _balanced_span(text: str, start: int) -> str | None:
    depth = 0
    opened = False
    for i in range(start, len(text)):
        ch = text[i]
        if ch == "{":
            depth += 1
            opened = True
        elif ch == "}":
            depth -= 1
            if opened and depth == 0:
                return text[start : i + 1].strip()
    return None


# --- clients ------------------------------------------------------------------


class MockClient:
    """Scripted offline client.

    ``respond`` maps a prompt to its reply; the default echoes nothing.
    ``failures`` injects that many transient failures before each success,
    exercising the retry path. A ``transform`` post-processes replies (used
    to emit deliberately broken candidates).
    """

    def __init__(self, respond=None, failures: int = 0, transform=None):
        self._respond = respond or (lambda prompt: "")
        self._failures_left = failures
        self._transform = transform
        self.calls = 0

    def generate(self, prompt_text: str, params: GenerationParams) -> str:
        self.calls += 1
        if self._failures_left > 0:
            self._failures_left -= 1
            raise TransientFailure("scripted transient failure")
        out = self._respond(prompt_text)
        if self._transform is not None:
            out = self._transform(out)
        return out


class EchoSourceMock(MockClient):
    """Answers with the ground-truth source paired to the prompt's target.

    The target assembly is recovered from the prompt itself, so replies
    depend only on prompt content; runs are reproducible for any worker
    count. Sources come back fenced, the way hosted models answer.
    """

    def __init__(self, sources_by_asm: dict[str, str], transform=None):
        self._sources = dict(sources_by_asm)
        super().__init__(respond=self._lookup, transform=transform)

    def _lookup(self, prompt_text: str) -> str:
        from .context import parse_retrieval_prompt

        try:
            _, _, target = parse_retrieval_prompt(prompt_text)
        except RedecompError:
            target = self._target_from_rule_prompt(prompt_text)
        src = self._sources.get(target)
        if src is None:
            return "I cannot decompile this function."
        return f"Here is the source:\n```c\n{src}\n```\n"

    @staticmethod
    def _target_from_rule_prompt(prompt_text: str) -> str:
        lines = prompt_text.split("\n")
        try:
            t = lines.index("[This is the assembly:]")
        except ValueError:
            return ""
        return "\n".join(lines[t + 1 : -1])


def strip_semicolons(text: str) -> str:
    """Mutilation helper: deletes every semicolon (forces syntax errors)."""
    return text.replace(";", "")


class HttpChatClient:
    """Adapter for hosted chat-completion endpoints.

    The credential comes from ``REDECOMP_API_KEY``; a missing credential
    fails before any network activity. The seed parameter is passed
    through; providers that ignore seeds still record it in the request.
    """

    def __init__(self, endpoint: str, timeout_s: float = 120.0):
        self.endpoint = endpoint
        self.timeout_s = timeout_s
        credential = os.environ.get(CREDENTIAL_ENV_VAR)
        if not credential:
            raise AuthFailure(f"set {CREDENTIAL_ENV_VAR} to use a hosted model")
        self._credential = credential

    def generate(self, prompt_text: str, params: GenerationParams) -> str:
        import requests

        payload = {
            "model": params.model_id,
            "messages": [{"role": "user", "content": prompt_text}],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_tokens,
            "seed": params.seed,
        }
        try:
            resp = requests.post(
                self.endpoint,
                json=payload,
                headers={"Authorization": f"Bearer {self._credential}"},
                timeout=self.timeout_s,
            )
        except requests.Timeout as exc:
            raise Timeout(f"no answer within {self.timeout_s}s") from exc
        except requests.RequestException as exc:
            raise TransientFailure(str(exc)) from exc
        if resp.status_code == 401:
            raise AuthFailure("credential rejected")
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientFailure(f"status {resp.status_code}")
        if resp.status_code != 200:
            raise ProviderError(f"status {resp.status_code}: {resp.text[:300]}")
        body = resp.json()
        try:
            return body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed response: {body}") from exc


class TranscriptRecorder:
    """Wraps any client and appends (prompt hash, raw response) records to
    a JSONL transcript that ReplayClient plays back bit-exactly."""

    def __init__(self, inner, path):
        import threading

        self._inner = inner
        self._path = path
        self._lock = threading.Lock()

    def generate(self, prompt_text: str, params: GenerationParams) -> str:
        import hashlib
        import json

        out = self._inner.generate(prompt_text, params)
        record = {
            "prompt_sha256": hashlib.sha256(prompt_text.encode("utf-8")).hexdigest(),
            "raw_text": out,
        }
        with self._lock, open(self._path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")
        return out


@dataclass
class ReplayClient:
    """Plays back a recorded transcript (list of raw responses) in order.

    When built from a transcript file, responses keyed by prompt hash are
    matched to incoming prompts so replay order does not matter.
    """

    responses: list[str]
    by_prompt: dict[str, str] = field(default_factory=dict)
    _cursor: int = field(default=0, repr=False)

    @classmethod
    def from_file(cls, path) -> "ReplayClient":
        import json

        responses = []
        by_prompt = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    responses.append(rec["raw_text"])
                    by_prompt[rec["prompt_sha256"]] = rec["raw_text"]
        return cls(responses=responses, by_prompt=by_prompt)

    def generate(self, prompt_text: str, params: GenerationParams) -> str:
        if self.by_prompt:
            import hashlib

            key = hashlib.sha256(prompt_text.encode("utf-8")).hexdigest()
            if key in self.by_prompt:
                return self.by_prompt[key]
        if self._cursor >= len(self.responses):
            raise ProviderError("transcript exhausted")
        out = self.responses[self._cursor]
        self._cursor += 1
        return out
