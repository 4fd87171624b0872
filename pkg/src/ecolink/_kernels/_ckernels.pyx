# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: trigram-hash embedding and flat index scoring.

Mirror of ``_pykernels`` with identical operation order so results are
bit-identical; keep both files in sync when touching either.
"""

from libc.math cimport sqrt
from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free, malloc

cdef uint64_t FNV_OFFSET = <uint64_t>0xCBF29CE484222325
cdef uint64_t FNV_PRIME = <uint64_t>0x100000001B3


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash of a byte string."""
    cdef const unsigned char[::1] buf = data
    cdef uint64_t h = FNV_OFFSET
    cdef Py_ssize_t i
    for i in range(buf.shape[0]):
        h = (h ^ buf[i]) * FNV_PRIME
    return h


def hash_embed(text: str, dim: int) -> list:
    """Embed text as a unit-norm vector of signed character-trigram counts.

    Same scheme as the pure-Python kernel: lowercase, FNV-1a 64 over the
    UTF-8 bytes of each character 3-gram, signed bucket accumulation,
    L2 normalization. Sub-trigram texts hash as one whole-string gram.
    """
    if not text:
        raise ValueError("cannot embed empty text")
    if dim < 1:
        raise ValueError("dim must be positive")
    lowered = text.lower()
    data = lowered.encode("utf-8")
    cdef const unsigned char[::1] buf = data
    cdef Py_ssize_t nbytes = buf.shape[0]
    cdef Py_ssize_t nchars = len(lowered)
    cdef Py_ssize_t d = dim

    # Start offset of every character in the UTF-8 buffer (continuation
    # bytes have the form 10xxxxxx), plus a sentinel at the end.
    cdef Py_ssize_t *offs = <Py_ssize_t *>malloc((nchars + 1) * sizeof(Py_ssize_t))
    cdef double *vec = <double *>calloc(d, sizeof(double))
    if offs == NULL or vec == NULL:
        free(offs)
        free(vec)
        raise MemoryError()

    cdef Py_ssize_t i, j, ci = 0
    cdef uint64_t h
    cdef double ss = 0.0, norm
    try:
        for i in range(nbytes):
            if (buf[i] & 0xC0) != 0x80:
                offs[ci] = i
                ci += 1
        offs[ci] = nbytes

        if nchars < 3:
            h = FNV_OFFSET
            for j in range(nbytes):
                h = (h ^ buf[j]) * FNV_PRIME
            vec[h % <uint64_t>d] += 1.0 if not (h >> 63) else -1.0
        else:
            for i in range(nchars - 2):
                h = FNV_OFFSET
                for j in range(offs[i], offs[i + 3]):
                    h = (h ^ buf[j]) * FNV_PRIME
                vec[h % <uint64_t>d] += 1.0 if not (h >> 63) else -1.0

        for i in range(d):
            ss += vec[i] * vec[i]
        if ss == 0.0:
            raise ValueError("cannot normalize a zero vector")
        norm = sqrt(ss)
        return [vec[i] / norm for i in range(d)]
    finally:
        free(offs)
        free(vec)


def matvec_scores(const float[:, ::1] matrix, const double[::1] query) -> list:
    """Dot product of every float32 matrix row with the float64 query.

    Accumulates ``float64(row[j]) * query[j]`` over ascending j, exactly as
    the pure kernel does.
    """
    cdef Py_ssize_t n = matrix.shape[0]
    cdef Py_ssize_t d = matrix.shape[1]
    if query.shape[0] != d:
        raise ValueError("query length does not match matrix width")
    cdef Py_ssize_t i, j
    cdef double acc
    scores = []
    for i in range(n):
        acc = 0.0
        for j in range(d):
            acc += (<double>matrix[i, j]) * query[j]
        scores.append(acc)
    return scores
