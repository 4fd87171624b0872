"""Kernel tests: the hashing scheme against an independent oracle, and
bit-equality between the pure and compiled implementations."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from ecolink._kernels import _pykernels

try:
    from ecolink._kernels import _ckernels
except ImportError:
    _ckernels = None

IMPLS = [_pykernels] + ([_ckernels] if _ckernels else [])


def oracle_fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) % 2**64
    return h


def oracle_hash_embed(text: str, dim: int) -> list[float]:
    """Straight reimplementation of the hashing scheme, kept naive."""
    t = text.lower()
    grams = [t] if len(t) < 3 else [t[i : i + 3] for i in range(len(t) - 2)]
    vec = [0.0] * dim
    for gram in grams:
        h = oracle_fnv1a64(gram.encode("utf-8"))
        vec[h % dim] += 1.0 if h < 2**63 else -1.0
    norm = math.sqrt(sum(x * x for x in vec))
    return [x / norm for x in vec]


# Frozen from the oracle above, run standalone.
STEEL_DIM16 = [
    0.0, 0.0, 0.0, 0.4082482904638631,
    0.0, 0.0, 0.0, 0.4082482904638631,
    0.4082482904638631, -0.4082482904638631, 0.0, 0.0,
    -0.4082482904638631, 0.0, -0.4082482904638631, 0.0,
]


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.rsplit("_", 1)[-1])
class TestEachImplementation:
    def test_fnv1a64_known_vector(self, impl):
        # Published FNV-1a 64 value for "abc".
        assert impl.fnv1a64(b"abc") == 0xE71FA2190541574B
        assert impl.fnv1a64(b"") == 0xCBF29CE484222325

    def test_hash_embed_matches_oracle(self, impl):
        for text in ["steel production", "SPIRALGEHÄUSE", "Grauguss mit Lamellengrafit", "ab", "x"]:
            for dim in (8, 64, 256):
                assert impl.hash_embed(text, dim) == oracle_hash_embed(text, dim)

    def test_hash_embed_frozen_value(self, impl):
        assert impl.hash_embed("steel production", 16) == STEEL_DIM16

    def test_hash_embed_deterministic_and_normalized(self, impl):
        a = impl.hash_embed("abc", 256)
        b = impl.hash_embed("abc", 256)
        assert a == b
        assert math.isclose(math.sqrt(sum(x * x for x in a)), 1.0, abs_tol=1e-6)

    def test_hash_embed_rejects_empty(self, impl):
        with pytest.raises(ValueError):
            impl.hash_embed("", 64)

    def test_matvec_matches_sequential_dot(self, impl):
        rng = random.Random(3)
        matrix = np.asarray(
            [[rng.uniform(-1, 1) for _ in range(32)] for _ in range(20)], dtype=np.float32
        )
        query = np.asarray([rng.uniform(-1, 1) for _ in range(32)], dtype=np.float64)
        expected = []
        for row in matrix.tolist():
            acc = 0.0
            for x, y in zip(row, query.tolist()):
                acc += x * y
            expected.append(acc)
        assert impl.matvec_scores(matrix, query) == expected

    def test_matvec_rejects_width_mismatch(self, impl):
        matrix = np.zeros((2, 4), dtype=np.float32)
        query = np.zeros(5, dtype=np.float64)
        with pytest.raises(ValueError):
            impl.matvec_scores(matrix, query)


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
class TestImplementationsAgree:
    """The compiled and pure kernels must agree bit for bit; reports and
    index files would otherwise depend on which build is installed."""

    def test_hash_embed_bitwise_equal(self):
        rng = random.Random(11)
        alphabet = "abcdefghijklmnopqrstuvwxyzäöüß日本 0123456789.,-+/"
        for _ in range(200):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 120)))
            dim = rng.choice([8, 16, 64, 256])
            assert _pykernels.hash_embed(text, dim) == _ckernels.hash_embed(text, dim)

    def test_matvec_bitwise_equal(self):
        rng = random.Random(12)
        for _ in range(50):
            n, d = rng.randint(1, 60), rng.choice([8, 64, 256])
            matrix = np.asarray(
                [[rng.uniform(-2, 2) for _ in range(d)] for _ in range(n)], dtype=np.float32
            )
            query = np.asarray([rng.uniform(-2, 2) for _ in range(d)], dtype=np.float64)
            assert _pykernels.matvec_scores(matrix, query) == _ckernels.matvec_scores(
                matrix, query
            )

    def test_results_are_plain_floats(self):
        matrix = np.ones((2, 8), dtype=np.float32)
        query = np.ones(8, dtype=np.float64)
        for impl in IMPLS:
            assert all(type(v) is float for v in impl.hash_embed("abc", 8))
            assert all(type(v) is float for v in impl.matvec_scores(matrix, query))


def test_l2_normalize_unit_norm():
    vec = _pykernels.l2_normalize([3.0, 4.0])
    assert vec == [0.6, 0.8]


def test_l2_normalize_rejects_zero():
    with pytest.raises(ValueError):
        _pykernels.l2_normalize([0.0, 0.0])
