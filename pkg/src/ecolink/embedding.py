"""Text embedding backends and cosine similarity.

Two backends share one interface: a remote embedding-service client
(OpenAI-style wire format) and a deterministic local trigram-hash embedder
for hermetic runs and tests. Both return L2-normalized float32 embeddings,
so downstream ranking can use plain dot products.
"""

from __future__ import annotations

import math
import os
import threading
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from ecolink import _kernels
from ecolink.errors import BackendError
from ecolink.model import Embedding

EMBED_API_KEY_VAR = "ECOLINK_EMBED_API_KEY"
DEFAULT_REMOTE_MODEL = "gte-large-en-v1.5"
DEFAULT_LOCAL_DIM = 256
MAX_ATTEMPTS = 3
BACKOFF_START_SECONDS = 1.0


@dataclass(frozen=True)
class EmbeddingBackendDescriptor:
    """Configuration for constructing an embedding backend."""

    kind: str  # "remote" or "local-hash"
    endpoint: str | None = None
    model: str = DEFAULT_REMOTE_MODEL
    dim: int = DEFAULT_LOCAL_DIM

    def __post_init__(self) -> None:
        if self.kind not in ("remote", "local-hash"):
            raise ValueError(f"unknown embedding backend kind: {self.kind!r}")
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("remote embedding backend requires an endpoint")
        if self.kind == "local-hash" and self.dim < 8:
            raise ValueError("local-hash embedding dim must be >= 8")


def _check_texts(texts: Sequence[str]) -> None:
    if not texts:
        raise ValueError("embed() requires at least one text")
    for i, text in enumerate(texts):
        if not text.strip():
            raise ValueError(f"text at index {i} is empty")


class LocalHashEmbedder:
    """Deterministic signed character-trigram hashing embedder.

    Pure function of the input text; identical strings always map to
    identical vectors, so no memoization is needed.
    """

    def __init__(self, dim: int = DEFAULT_LOCAL_DIM) -> None:
        if dim < 8:
            raise ValueError("local-hash embedding dim must be >= 8")
        self.dim = dim

    @property
    def fingerprint(self) -> str:
        return f"local-hash-{self.dim}"

    def embed(self, texts: Sequence[str]) -> list[Embedding]:
        _check_texts(texts)
        return [Embedding(_kernels.hash_embed(text, self.dim)) for text in texts]


class RemoteEmbedder:
    """Client for an embedding service speaking the de-facto wire shape.

    POST {model, input: [...]} -> {data: [{index, embedding}, ...]}.
    Responses are memoized by exact input text for the life of the process;
    the cache lock keeps concurrent embed() calls safe.
    """

    def __init__(
        self,
        endpoint: str,
        model: str = DEFAULT_REMOTE_MODEL,
        api_key: str | None = None,
        batch_size: int = 64,
        sleeper: Callable[[float], None] = time.sleep,
    ) -> None:
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(EMBED_API_KEY_VAR)
        self.batch_size = batch_size
        self._sleeper = sleeper
        self._cache: dict[str, Embedding] = {}
        self._lock = threading.Lock()

    @property
    def fingerprint(self) -> str:
        return f"remote:{self.model}"

    def embed(self, texts: Sequence[str]) -> list[Embedding]:
        _check_texts(texts)
        with self._lock:
            missing = [t for t in texts if t not in self._cache]
            missing = list(dict.fromkeys(missing))
        for start in range(0, len(missing), self.batch_size):
            batch = missing[start : start + self.batch_size]
            vectors = self._request(batch)
            with self._lock:
                for text, vector in zip(batch, vectors):
                    self._cache[text] = Embedding(_kernels.l2_normalize(vector))
        with self._lock:
            return [self._cache[t] for t in texts]

    def _request(self, batch: list[str]) -> list[list[float]]:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {"model": self.model, "input": list(batch)}
        last_error: BackendError | None = None
        for attempt in range(MAX_ATTEMPTS):
            if attempt:
                self._sleeper(BACKOFF_START_SECONDS * 2 ** (attempt - 1))
            try:
                response = requests.post(self.endpoint, json=payload, headers=headers, timeout=60)
            except requests.RequestException as exc:
                last_error = BackendError(f"embedding request failed: {exc}", retryable=True)
                continue
            if response.status_code >= 500:
                last_error = BackendError(
                    f"embedding service returned {response.status_code}",
                    retryable=True,
                    status=response.status_code,
                )
                continue
            if response.status_code != 200:
                raise BackendError(
                    f"embedding service returned {response.status_code}: {response.text[:200]}",
                    status=response.status_code,
                )
            try:
                data = response.json()["data"]
                rows = sorted(data, key=lambda item: item["index"])
                return [list(map(float, row["embedding"])) for row in rows]
            except (KeyError, TypeError, ValueError) as exc:
                raise BackendError(f"malformed embedding response: {exc}") from None
        assert last_error is not None
        raise last_error


EmbeddingBackend = LocalHashEmbedder | RemoteEmbedder


def create_embedding_backend(descriptor: EmbeddingBackendDescriptor) -> EmbeddingBackend:
    if descriptor.kind == "local-hash":
        return LocalHashEmbedder(dim=descriptor.dim)
    assert descriptor.endpoint is not None
    return RemoteEmbedder(endpoint=descriptor.endpoint, model=descriptor.model)


def cosine(a: Embedding, b: Embedding) -> float:
    """Cosine similarity dot(a,b) / sqrt(|a|^2 * |b|^2), in float64.

    The single-sqrt denominator keeps simple rational cases exact (e.g.
    [1,1,0,0] vs [1,0,1,0] is exactly 0.5).
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} != {b.dim}")
    av = [float(x) for x in a.values]
    bv = [float(x) for x in b.values]
    ss_a = 0.0
    ss_b = 0.0
    dot = 0.0
    for x, y in zip(av, bv):
        ss_a += x * x
        ss_b += y * y
        dot += x * y
    if ss_a == 0.0 or ss_b == 0.0:
        raise ValueError("cosine is undefined for zero vectors")
    return dot / math.sqrt(ss_a * ss_b)
