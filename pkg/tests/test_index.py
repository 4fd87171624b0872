from __future__ import annotations

import random

import numpy as np
import pytest

from ecolink.embedding import LocalHashEmbedder, cosine
from ecolink.errors import IndexIntegrityError
from ecolink.index import (
    ActivityIndex,
    build_index,
    embedding_text,
    load_index,
    save_index,
    top_k,
)
from ecolink.model import Embedding, LcaActivity


def _activity(aid: str, name: str, description: str = "") -> LcaActivity:
    return LcaActivity(id=aid, name=name, description=description, emission_factor=1.0, unit="kg")


def brute_force_ranking(index: ActivityIndex, query: Embedding) -> list[tuple[str, float]]:
    """Oracle: score every entry independently, full sort, tie rule by id."""
    import math

    q = [float(x) for x in query.values]
    norm = math.sqrt(sum(x * x for x in q))
    q_hat = [x / norm for x in q]
    scored = []
    for aid, row in zip(index.ids, index.vectors):
        acc = 0.0
        for x, y in zip(row.tolist(), q_hat):
            acc += x * y
        scored.append((aid, acc))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


def test_embedding_text_layout():
    act = _activity("a1", "Steel production, electric arc furnace, EU", "This process models…")
    assert embedding_text(act) == "Steel production, electric arc furnace, EU\nThis process models…"


def test_self_retrieval(embedder):
    act = _activity("a1", "Steel production", "melting of recycled scrap")
    index = build_index([act], embedder)
    assert len(index) == 1
    query = embedder.embed([embedding_text(act)])[0]
    results = top_k(index, query, 1)
    assert results[0][0] == "a1"
    assert results[0][1] >= 0.99


def test_build_index_size_and_order(embedder):
    acts = [_activity(f"a{i:03}", f"activity number {i}", "text " * i) for i in range(100)]
    index = build_index(acts, embedder)
    assert len(index.entries) == 100
    assert list(index.ids) == [a.id for a in acts]
    assert index.fingerprint == embedder.fingerprint


def test_build_index_rejects_empty(embedder):
    with pytest.raises(ValueError):
        build_index([], embedder)


def test_top_k_clamps_to_corpus(embedder):
    acts = [_activity(f"a{i}", f"thing {i}") for i in range(3)]
    index = build_index(acts, embedder)
    query = embedder.embed(["thing 1"])[0]
    assert len(top_k(index, query, 10)) == 3


def test_top_k_exact_match_scores_one(embedder):
    acts = [_activity("a1", "unique text alpha"), _activity("a2", "different beta")]
    index = build_index(acts, embedder)
    query = Embedding(index.vectors[0])
    results = top_k(index, query, 1)
    assert results[0][0] == "a1"
    assert abs(results[0][1] - 1.0) <= 1e-6


def test_top_k_dimension_mismatch(embedder):
    index = build_index([_activity("a1", "xyz")], embedder)
    with pytest.raises(ValueError, match="mismatch"):
        top_k(index, Embedding([1.0, 0.0]), 1)
    with pytest.raises(ValueError):
        top_k(index, Embedding(index.vectors[0]), 0)


def test_top_k_matches_brute_force_with_ties():
    rng = random.Random(99)
    for _ in range(25):
        n, dim = rng.randint(1, 50), rng.choice([8, 16])
        vectors = np.asarray(
            [[rng.uniform(-1, 1) for _ in range(dim)] for _ in range(n)], dtype=np.float32
        )
        # Duplicate some rows under new ids to force score ties.
        dup = rng.randint(0, n - 1)
        vectors = np.vstack([vectors, vectors[dup : dup + 1]])
        ids = [f"a{i:04}" for i in range(len(vectors))]
        index = ActivityIndex(ids, vectors, "test")
        query = Embedding([rng.uniform(-1, 1) for _ in range(dim)])
        k = rng.randint(1, len(ids) + 2)
        assert top_k(index, query, k) == brute_force_ranking(index, query)[:k]


def test_ranking_invariant_under_query_scaling(embedder):
    acts = [_activity(f"a{i}", f"text sample {i} {'x' * i}") for i in range(20)]
    index = build_index(acts, embedder)
    query = embedder.embed(["text sample"])[0]
    base = top_k(index, query, 5)
    for exponent in (-4, -1, 1, 6):
        scaled = Embedding(query.values * np.float32(2.0**exponent))
        assert top_k(index, scaled, 5) == base


def test_save_load_round_trip(tmp_path, embedder, demo_corpus):
    index = build_index(demo_corpus.activities, embedder)
    path = tmp_path / "demo.idx"
    save_index(index, path)
    loaded = load_index(path)
    assert loaded == index
    assert loaded.fingerprint == "local-hash-256"


def test_save_load_bit_identical_file(tmp_path, embedder):
    index = build_index([_activity("a1", "steel"), _activity("a2", "iron")], embedder)
    p1, p2 = tmp_path / "one.idx", tmp_path / "two.idx"
    save_index(index, p1)
    save_index(load_index(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_load_truncated_file(tmp_path, embedder):
    index = build_index([_activity("a1", "steel production")], embedder)
    path = tmp_path / "x.idx"
    save_index(index, path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) - 7])
    with pytest.raises(IndexIntegrityError):
        load_index(path)


def test_load_corrupted_payload(tmp_path, embedder):
    index = build_index([_activity("a1", "steel production")], embedder)
    path = tmp_path / "x.idx"
    save_index(index, path)
    data = bytearray(path.read_bytes())
    data[-3] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(IndexIntegrityError, match="checksum"):
        load_index(path)


def test_load_rejects_foreign_file(tmp_path):
    path = tmp_path / "x.idx"
    path.write_bytes(b"definitely not an index")
    with pytest.raises(IndexIntegrityError):
        load_index(path)


def test_fingerprint_mismatch_flag(tmp_path, embedder):
    index = build_index([_activity("a1", "steel")], embedder)
    assert index.matches_backend(embedder)
    other = LocalHashEmbedder(dim=64)
    assert not index.matches_backend(other)


def test_stored_vectors_normalized(demo_index):
    for _aid, emb in demo_index.entries:
        assert emb.is_normalized()


def test_scores_consistent_with_cosine(embedder, demo_index):
    query = embedder.embed(["grey cast iron housing"])[0]
    for aid, score in top_k(demo_index, query, 5):
        row = demo_index.vectors[demo_index.ids.index(aid)]
        assert abs(score - cosine(query, Embedding(row))) <= 1e-6
