"""Datasheet selection: pick the pool document matching a BOM entry via
thresholded embedding cosine similarity.

One datasheet at most is matched per component; the threshold is inclusive
(a score of exactly 0.5 under the default config is a match).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ecolink.embedding import cosine
from ecolink.model import BomEntry, Datasheet


@dataclass(frozen=True)
class DatasheetMatch:
    """Winning datasheet and its similarity score."""

    sheet: Datasheet
    score: float


def datasheet_query_text(entry: BomEntry) -> str:
    """Query side of the match: component name, supplier, material.

    Empty fields contribute empty lines so the layout stays stable.
    """
    return f"{entry.name}\n{entry.supplier}\n{entry.material}"


def datasheet_doc_text(sheet: Datasheet) -> str:
    """Document side of the match: filename, newline, body."""
    return f"{sheet.filename}\n{sheet.body}"


def select_datasheet(
    entry: BomEntry,
    pool: Sequence[Datasheet],
    backend,
    threshold: float,
    pool_embeddings=None,
) -> DatasheetMatch | None:
    """Return the best-scoring datasheet iff its score reaches the threshold.

    Ties are broken by filename ascending; an empty pool yields None.
    ``pool_embeddings`` lets callers reuse embeddings across components
    (order must match ``pool``).
    """
    if not -1.0 <= threshold <= 1.0:
        raise ValueError("threshold must be within [-1, 1]")
    if not pool:
        return None
    query = backend.embed([datasheet_query_text(entry)])[0]
    if pool_embeddings is None:
        pool_embeddings = embed_pool(pool, backend)
    best: tuple[float, str, Datasheet] | None = None
    for sheet, emb in zip(pool, pool_embeddings):
        score = cosine(query, emb)
        if best is None or score > best[0] or (score == best[0] and sheet.filename < best[1]):
            best = (score, sheet.filename, sheet)
    assert best is not None
    if best[0] >= threshold:
        return DatasheetMatch(sheet=best[2], score=best[0])
    return None


def embed_pool(pool: Sequence[Datasheet], backend) -> list:
    """Embed every pool document once; reuse across per-component calls."""
    if not pool:
        return []
    return backend.embed([datasheet_doc_text(sheet) for sheet in pool])
