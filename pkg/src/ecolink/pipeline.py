"""Pipeline orchestration: the three ablation modes, per-BOM runs with
partial-failure tolerance, run-report persistence, and footprint
aggregation.

Components are processed with bounded parallelism but results are always
collected in BOM order, so output files are deterministic for local/canned
backends. Backend failures are captured per component instead of aborting
the run.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from ecolink import docmatch, llm
from ecolink.errors import BackendError, IngestError, UnknownActivityError
from ecolink.index import ActivityIndex, top_k
from ecolink.model import (
    BomEntry,
    CandidateRanking,
    LcaActivity,
    MappingDecision,
    Mode,
    PipelineConfig,
)


@dataclass(frozen=True)
class Backends:
    """The pluggable services a pipeline run talks to."""

    embedder: object
    chat: object | None = None


@dataclass(frozen=True)
class DatasheetDecision:
    """Outcome of datasheet retrieval recorded in the run report."""

    filename: str
    score: float


@dataclass(frozen=True)
class ComponentReport:
    """Everything the run learned about one component."""

    component_id: str
    mode: Mode
    query_text: str
    candidates: tuple[tuple[str, float], ...]
    datasheet: DatasheetDecision | None
    error: str | None
    millis: dict[str, int] | None = None

    def to_ranking(self) -> CandidateRanking:
        return CandidateRanking(
            component_id=self.component_id,
            query_text=self.query_text,
            mode=self.mode,
            candidates=self.candidates,
        )


@dataclass(frozen=True)
class BomRunResult:
    """Reports for every component, in BOM order."""

    reports: tuple[ComponentReport, ...]

    @property
    def rankings(self) -> list[CandidateRanking]:
        return [r.to_ranking() for r in self.reports if r.error is None]

    @property
    def failures(self) -> list[ComponentReport]:
        return [r for r in self.reports if r.error is not None]


def semantic_only_query(entry: BomEntry) -> str:
    """Ranking query from raw BOM fields: name, supplier, material."""
    return docmatch.datasheet_query_text(entry)


def run_component(
    entry: BomEntry,
    mode: Mode,
    index: ActivityIndex,
    pool: Sequence,
    config: PipelineConfig,
    backends: Backends,
) -> CandidateRanking:
    """Run one component through the selected mode; raises on backend failure."""
    return _execute(entry, mode, index, pool, config, backends, pool_embeddings=None).to_ranking()


def _execute(
    entry: BomEntry,
    mode: Mode,
    index: ActivityIndex,
    pool: Sequence,
    config: PipelineConfig,
    backends: Backends,
    pool_embeddings,
) -> ComponentReport:
    millis: dict[str, int] = {}
    datasheet_decision: DatasheetDecision | None = None

    def timed(stage: str, fn):
        start = time.perf_counter()
        try:
            return fn()
        finally:
            millis[stage] = int((time.perf_counter() - start) * 1000)

    if mode is Mode.SEMANTIC_ONLY:
        query_text = semantic_only_query(entry)
    else:
        sheet = None
        if mode is Mode.LLM_DATASHEET:
            match = timed(
                "datasheet",
                lambda: docmatch.select_datasheet(
                    entry,
                    pool,
                    backends.embedder,
                    config.datasheet_threshold,
                    pool_embeddings=pool_embeddings,
                ),
            )
            if match is not None:
                datasheet_decision = DatasheetDecision(match.sheet.filename, match.score)
                sheet = match.sheet
        if backends.chat is None:
            raise ValueError(f"mode {mode.value} requires a chat backend")
        prompt = llm.build_prompt(entry, sheet)
        raw = timed("llm", lambda: llm.complete(prompt, backends.chat))
        query_text = llm.ranking_query_text(llm.parse_llm_response(raw))

    def rank() -> tuple[tuple[str, float], ...]:
        query = backends.embedder.embed([query_text])[0]
        return tuple(top_k(index, query, config.top_k))

    candidates = timed("ranking", rank)
    return ComponentReport(
        component_id=entry.id,
        mode=mode,
        query_text=query_text,
        candidates=candidates,
        datasheet=datasheet_decision,
        error=None,
        millis=millis if config.timings else None,
    )


def run_bom(
    entries: Sequence[BomEntry],
    mode: Mode,
    index: ActivityIndex,
    pool: Sequence,
    config: PipelineConfig,
    backends: Backends,
) -> BomRunResult:
    """Run every component, capturing backend failures per component."""
    if index.fingerprint != backends.embedder.fingerprint:
        logging.getLogger(__name__).warning(
            "index fingerprint %r does not match live backend %r",
            index.fingerprint,
            backends.embedder.fingerprint,
        )
    pool_embeddings = None
    if mode is Mode.LLM_DATASHEET and pool:
        pool_embeddings = docmatch.embed_pool(pool, backends.embedder)

    def guarded(entry: BomEntry) -> ComponentReport:
        try:
            return _execute(entry, mode, index, pool, config, backends, pool_embeddings)
        except BackendError as exc:
            return ComponentReport(
                component_id=entry.id,
                mode=mode,
                query_text="",
                candidates=(),
                datasheet=None,
                error=str(exc),
                millis=None,
            )

    if config.parallelism == 1 or len(entries) <= 1:
        reports = [guarded(entry) for entry in entries]
    else:
        with ThreadPoolExecutor(max_workers=config.parallelism) as executor:
            reports = list(executor.map(guarded, entries))
    return BomRunResult(reports=tuple(reports))


def _report_record(report: ComponentReport) -> dict:
    record = {
        "component_id": report.component_id,
        "mode": report.mode.value,
        "query_text": report.query_text,
        "candidates": [
            {"activity_id": aid, "score": score} for aid, score in report.candidates
        ],
        "datasheet": (
            {"filename": report.datasheet.filename, "score": report.datasheet.score}
            if report.datasheet
            else None
        ),
        "error": report.error,
    }
    if report.millis is not None:
        record["millis"] = report.millis
    return record


def write_report(result: BomRunResult, sink: TextIO) -> None:
    """Emit the run report, one JSON record per component, BOM order."""
    for report in result.reports:
        sink.write(json.dumps(_report_record(report), ensure_ascii=False, sort_keys=True))
        sink.write("\n")


def save_report(result: BomRunResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_report(result, fh)


def read_report(source: TextIO) -> BomRunResult:
    """Parse a run report written by write_report."""
    reports: list[ComponentReport] = []
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"run report line {lineno}: invalid JSON ({exc.msg})") from None
        try:
            datasheet = record["datasheet"]
            reports.append(
                ComponentReport(
                    component_id=record["component_id"],
                    mode=Mode(record["mode"]),
                    query_text=record["query_text"],
                    candidates=tuple(
                        (c["activity_id"], float(c["score"])) for c in record["candidates"]
                    ),
                    datasheet=(
                        DatasheetDecision(datasheet["filename"], float(datasheet["score"]))
                        if datasheet
                        else None
                    ),
                    error=record["error"],
                    millis=record.get("millis"),
                )
            )
        except (KeyError, ValueError) as exc:
            raise IngestError(f"run report line {lineno}: {exc}") from None
    return BomRunResult(reports=tuple(reports))


def load_report(path: str | Path) -> BomRunResult:
    with open(path, encoding="utf-8") as fh:
        return read_report(fh)


@dataclass(frozen=True)
class FootprintRow:
    """Per-component contribution to the product footprint."""

    component_id: str
    activity_id: str
    quantity: float
    emission_factor: float
    unit: str
    kg_co2e: float
    source: str


@dataclass(frozen=True)
class FootprintResult:
    total_kg_co2e: float
    rows: tuple[FootprintRow, ...]
    uncovered: tuple[str, ...]


def footprint(
    decisions: Iterable[MappingDecision],
    bom: Sequence[BomEntry],
    db: Sequence[LcaActivity],
) -> FootprintResult:
    """Total kg CO2e = sum of quantity x emission factor over decided
    components; components without a decision are listed as uncovered.

    Later decisions supersede earlier ones for the same component. Rows and
    the total follow BOM order, so the result is invariant under decision
    permutation (for one decision per component) and reproducible bit for
    bit.
    """
    by_component: dict[str, MappingDecision] = {}
    for decision in decisions:
        by_component[decision.component_id] = decision
    activities = {act.id: act for act in db}

    rows: list[FootprintRow] = []
    uncovered: list[str] = []
    total = 0.0
    for entry in bom:
        decision = by_component.get(entry.id)
        if decision is None:
            uncovered.append(entry.id)
            continue
        activity = activities.get(decision.activity_id)
        if activity is None:
            raise UnknownActivityError(
                f"decision for {entry.id} references unknown activity "
                f"'{decision.activity_id}'"
            )
        kg = entry.quantity * activity.emission_factor
        total += kg
        rows.append(
            FootprintRow(
                component_id=entry.id,
                activity_id=activity.id,
                quantity=entry.quantity,
                emission_factor=activity.emission_factor,
                unit=activity.unit,
                kg_co2e=kg,
                source=decision.source,
            )
        )
    return FootprintResult(total_kg_co2e=total, rows=tuple(rows), uncovered=tuple(uncovered))
