"""Pure-Python kernels: trigram-hash embedding and flat index scoring.

These are the fallback implementations used when the compiled extension is
unavailable. The compiled variant in ``_ckernels.pyx`` performs the same
operations in the same order; results must match bit for bit, which is what
keeps index files and run reports identical regardless of which kernel is
loaded. All accumulation is sequential IEEE-754 double precision.
"""

from __future__ import annotations

import math

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF
_TOP_BIT = 1 << 63


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash of a byte string."""
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & _MASK64
    return h


def hash_embed(text: str, dim: int) -> list[float]:
    """Embed text as a unit-norm vector of signed character-trigram counts.

    Scheme: lowercase the text, hash every character 3-gram (UTF-8 encoded)
    with FNV-1a 64, bucket by ``hash % dim``, add +1 when the hash's top bit
    is 0 else -1, then divide by the L2 norm. Texts shorter than three
    characters are hashed as a single whole-string gram so the result is
    never a zero vector.
    """
    if not text:
        raise ValueError("cannot embed empty text")
    if dim < 1:
        raise ValueError("dim must be positive")
    lowered = text.lower()
    if len(lowered) < 3:
        grams = [lowered]
    else:
        grams = [lowered[i : i + 3] for i in range(len(lowered) - 2)]
    vec = [0.0] * dim
    for gram in grams:
        h = fnv1a64(gram.encode("utf-8"))
        vec[h % dim] += 1.0 if h < _TOP_BIT else -1.0
    return l2_normalize(vec)


def l2_normalize(vec) -> list[float]:
    """Divide every element by the vector's L2 norm."""
    ss = 0.0
    for v in vec:
        ss += v * v
    if ss == 0.0:
        raise ValueError("cannot normalize a zero vector")
    norm = math.sqrt(ss)
    return [v / norm for v in vec]


def matvec_scores(matrix, query) -> list[float]:
    """Dot product of every matrix row with the query vector.

    ``matrix`` is a C-contiguous float32 array of shape (n, dim); ``query``
    is a float64 array of length dim. Each score accumulates
    ``float64(row[j]) * query[j]`` over ascending j.
    """
    if matrix.shape[1] != query.shape[0]:
        raise ValueError("query length does not match matrix width")
    q = query.tolist()
    rows = matrix.tolist()  # exact float32 -> float64 widening
    scores = []
    for row in rows:
        acc = 0.0
        for x, y in zip(row, q):
            acc += x * y
        scores.append(acc)
    return scores
