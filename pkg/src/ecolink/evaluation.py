"""Hits@n evaluation over gold labels and the three-mode ablation table.

Hits@n is the fraction of evaluated components whose gold activity appears
among the first n ranked candidates. Components without a ranking (failed
or missing) count as misses, matching how a practitioner would score an
unavailable recommendation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

from ecolink import pipeline
from ecolink.errors import EvalError, UnknownActivityError
from ecolink.index import build_index
from ecolink.ingest import GoldLabel
from ecolink.model import BomEntry, CandidateRanking, LcaActivity, Mode, PipelineConfig


@dataclass(frozen=True)
class EvalResult:
    """Hits@n outcome for one mode."""

    mode: Mode | None
    hits: dict[int, float]  # n -> ratio, full precision
    numerators: dict[int, int]
    denominator: int
    ranks: dict[str, int | None]  # component -> 1-based rank of gold, or None
    missing: tuple[str, ...]  # gold components that had no ranking


def hits_at(
    rankings: Sequence[CandidateRanking],
    gold: Sequence[GoldLabel],
    ns: Sequence[int],
    known_activity_ids: set[str] | None = None,
    mode: Mode | None = None,
) -> EvalResult:
    """Compute Hits@n for every n over the gold labels.

    ``known_activity_ids``, when given, guards against label corruption:
    a gold activity id absent from the database is an error, not a miss.
    """
    if not gold:
        raise EvalError("no gold labels to evaluate")
    if any(n < 1 for n in ns):
        raise ValueError("hits@n cutoffs must be positive")
    seen: set[str] = set()
    for label in gold:
        if label.component_id in seen:
            raise EvalError(f"duplicate gold label for component '{label.component_id}'")
        seen.add(label.component_id)
        if known_activity_ids is not None and label.activity_id not in known_activity_ids:
            raise UnknownActivityError(
                f"gold label for '{label.component_id}' references unknown activity "
                f"'{label.activity_id}'"
            )

    by_component = {r.component_id: r for r in rankings}
    ranks: dict[str, int | None] = {}
    missing: list[str] = []
    for label in gold:
        ranking = by_component.get(label.component_id)
        if ranking is None:
            ranks[label.component_id] = None
            missing.append(label.component_id)
            continue
        rank = None
        for position, (activity_id, _score) in enumerate(ranking.candidates, start=1):
            if activity_id == label.activity_id:
                rank = position
                break
        ranks[label.component_id] = rank

    if mode is None and rankings:
        mode = rankings[0].mode
    denominator = len(gold)
    numerators = {
        n: sum(1 for r in ranks.values() if r is not None and r <= n) for n in ns
    }
    hits = {n: numerators[n] / denominator for n in ns}
    return EvalResult(
        mode=mode,
        hits=hits,
        numerators=numerators,
        denominator=denominator,
        ranks=ranks,
        missing=tuple(missing),
    )


def ablation_report(
    bom: Sequence[BomEntry],
    pool: Sequence,
    db: Sequence[LcaActivity],
    gold: Sequence[GoldLabel],
    config: PipelineConfig,
    backends: pipeline.Backends,
) -> list[EvalResult]:
    """Run all three modes on identical inputs, sharing one index build."""
    if not gold:
        raise EvalError("no gold labels to evaluate")
    index = build_index(db, backends.embedder)
    known = {act.id for act in db}
    results = []
    for mode in (Mode.SEMANTIC_ONLY, Mode.LLM, Mode.LLM_DATASHEET):
        run = pipeline.run_bom(bom, mode, index, pool, config, backends)
        results.append(
            hits_at(run.rankings, gold, config.hits_at, known_activity_ids=known, mode=mode)
        )
    return results


def format_eval_table(results: Sequence[EvalResult], ns: Sequence[int]) -> str:
    """Human-readable table, ratios rounded to 2 decimals."""
    header = ["mode"] + [f"Hits@{n}" for n in ns]
    rows = [header]
    for result in results:
        label = result.mode.value if result.mode else "-"
        rows.append([label] + [f"{result.hits[n]:.2f}" for n in ns])
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for idx, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"


def write_eval_records(results: Sequence[EvalResult], ns: Sequence[int], sink: TextIO) -> None:
    """Machine output: one record per (mode, n), full-precision ratios."""
    for result in results:
        for n in ns:
            sink.write(
                json.dumps(
                    {
                        "mode": result.mode.value if result.mode else None,
                        "n": n,
                        "numerator": result.numerators[n],
                        "denominator": result.denominator,
                        "ratio": result.hits[n],
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
            )
            sink.write("\n")


def save_eval_records(results: Sequence[EvalResult], ns: Sequence[int], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_eval_records(results, ns, fh)
