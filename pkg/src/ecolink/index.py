"""Exact top-k cosine retrieval over embedded LCA activities.

The index is a flat matrix of normalized float32 vectors scored by dot
product; exactness keeps evaluation reproducible and differential tests
trivial. Persistence uses a versioned binary format that is bit-exact
across platforms: little-endian header (magic, version, dim, count,
fingerprint) + sha256 payload checksum + length-prefixed ids with float32
vectors.
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from ecolink import _kernels
from ecolink.errors import BackendError, IndexIntegrityError
from ecolink.model import Embedding, LcaActivity

MAGIC = b"ECOLIDX\x00"
FORMAT_VERSION = 1
_EMBED_CHUNK = 64


class ActivityIndex:
    """Immutable flat index of (activity_id, normalized embedding) entries."""

    def __init__(self, ids: Sequence[str], vectors: np.ndarray, fingerprint: str) -> None:
        if len(ids) != vectors.shape[0]:
            raise ValueError("ids and vectors disagree on entry count")
        if len(set(ids)) != len(ids):
            raise ValueError("activity ids must be unique")
        self.ids: tuple[str, ...] = tuple(ids)
        arr = np.ascontiguousarray(vectors, dtype=np.float32)
        arr.setflags(write=False)
        self.vectors = arr
        self.fingerprint = fingerprint

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def entries(self) -> list[tuple[str, Embedding]]:
        return [(aid, Embedding(row)) for aid, row in zip(self.ids, self.vectors)]

    def matches_backend(self, backend) -> bool:
        """True when the live backend's fingerprint matches build time."""
        return self.fingerprint == backend.fingerprint

    def __len__(self) -> int:
        return len(self.ids)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ActivityIndex):
            return NotImplemented
        return (
            self.ids == other.ids
            and self.fingerprint == other.fingerprint
            and bool(np.array_equal(self.vectors, other.vectors))
        )

    def __repr__(self) -> str:
        return f"ActivityIndex(len={len(self)}, dim={self.dim}, fingerprint={self.fingerprint!r})"


def embedding_text(activity: LcaActivity) -> str:
    """The text embedded for one activity: name, newline, description."""
    return f"{activity.name}\n{activity.description}"


def build_index(activities: Sequence[LcaActivity], backend) -> ActivityIndex:
    """Embed every activity's name+description and assemble the index."""
    if not activities:
        raise ValueError("cannot build an index from zero activities")
    ids = [act.id for act in activities]
    texts = [embedding_text(act) for act in activities]
    embeddings: list[Embedding] = []
    for start in range(0, len(texts), _EMBED_CHUNK):
        chunk = texts[start : start + _EMBED_CHUNK]
        try:
            embeddings.extend(backend.embed(chunk))
        except BackendError as exc:
            span = ids[start : start + _EMBED_CHUNK]
            raise BackendError(
                f"embedding activities {span[0]}..{span[-1]} failed: {exc}",
                retryable=exc.retryable,
                status=exc.status,
            ) from exc
    vectors = np.stack([emb.values for emb in embeddings])
    return ActivityIndex(ids, vectors, backend.fingerprint)


def top_k(index: ActivityIndex, query: Embedding, k: int) -> list[tuple[str, float]]:
    """The k highest cosine scores, descending, ties by activity id ascending.

    Scores are dot products of the stored normalized vectors with the
    normalized query, accumulated sequentially in float64; fewer than k
    results when the corpus is smaller.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if query.dim != index.dim:
        raise ValueError(f"dimension mismatch: query {query.dim} != index {index.dim}")
    q_hat = _kernels.l2_normalize([float(x) for x in query.values])
    scores = _kernels.matvec_scores(index.vectors, np.asarray(q_hat, dtype=np.float64))
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], index.ids[i]))
    return [(index.ids[i], scores[i]) for i in order[:k]]


def save_index(index: ActivityIndex, path: str | Path) -> None:
    """Write the index in the versioned binary format."""
    payload = bytearray()
    for aid, row in zip(index.ids, index.vectors):
        encoded = aid.encode("utf-8")
        payload += struct.pack("<I", len(encoded))
        payload += encoded
        payload += struct.pack(f"<{index.dim}f", *row.tolist())
    fp = index.fingerprint.encode("utf-8")
    header = MAGIC + struct.pack("<III", FORMAT_VERSION, index.dim, len(index))
    header += struct.pack("<I", len(fp)) + fp
    header += hashlib.sha256(bytes(payload)).digest()
    Path(path).write_bytes(header + payload)


def load_index(path: str | Path) -> ActivityIndex:
    """Read an index written by save_index, verifying the checksum."""
    data = Path(path).read_bytes()
    view = memoryview(data)
    offset = 0

    def take(n: int) -> memoryview:
        nonlocal offset
        if offset + n > len(data):
            raise IndexIntegrityError(f"index file {path} is truncated")
        chunk = view[offset : offset + n]
        offset += n
        return chunk

    if bytes(take(len(MAGIC))) != MAGIC:
        raise IndexIntegrityError(f"{path} is not an index file (bad magic)")
    version, dim, count = struct.unpack("<III", take(12))
    if version != FORMAT_VERSION:
        raise IndexIntegrityError(f"unsupported index format version {version}")
    (fp_len,) = struct.unpack("<I", take(4))
    fingerprint = bytes(take(fp_len)).decode("utf-8")
    checksum = bytes(take(32))
    payload = bytes(view[offset:])
    if hashlib.sha256(payload).digest() != checksum:
        raise IndexIntegrityError(f"index file {path} failed its checksum")

    ids: list[str] = []
    vectors = np.empty((count, dim), dtype=np.float32)
    for i in range(count):
        (id_len,) = struct.unpack("<I", take(4))
        ids.append(bytes(take(id_len)).decode("utf-8"))
        row = take(4 * dim)
        vectors[i] = np.frombuffer(row, dtype="<f4")
    if offset != len(data):
        raise IndexIntegrityError(f"index file {path} has trailing bytes")
    return ActivityIndex(ids, vectors, fingerprint)
