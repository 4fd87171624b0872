"""HTTP API for the expert review workflow.

Serves component shortlists with their evidence trail, accepts
confirm/override decisions, persists them to an append-only log, and
reports the running footprint. GETs are side-effect free; POSTs go through
a single writer. Every JSON response carries a schema version field "v".
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from ecolink.model import BomEntry, LcaActivity, MappingDecision
from ecolink.pipeline import BomRunResult, footprint

SCHEMA_VERSION = 1


class DecisionLog:
    """Append-only JSONL decision store with latest-wins replay.

    Each append is flushed and fsynced so complete records survive a crash;
    replay keeps only lines that are complete (newline-terminated) and
    parseable, so a record truncated mid-write is discarded.
    """

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, decision: MappingDecision) -> None:
        record = {
            "component_id": decision.component_id,
            "activity_id": decision.activity_id,
            "source": decision.source,
            "reviewer": decision.reviewer,
            "decided_at": decision.decided_at,
        }
        if decision.rank is not None:
            record["rank"] = decision.rank
        line = json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())

    def replay(self) -> list[MappingDecision]:
        """All complete records, in append order (full history)."""
        if not self.path.exists():
            return []
        decisions: list[MappingDecision] = []
        with open(self.path, "rb") as fh:
            data = fh.read()
        for raw_line in data.split(b"\n")[:-1]:  # no trailing newline = incomplete
            if not raw_line.strip():
                continue
            try:
                record = json.loads(raw_line.decode("utf-8"))
                decisions.append(
                    MappingDecision(
                        component_id=record["component_id"],
                        activity_id=record["activity_id"],
                        source=record["source"],
                        rank=record.get("rank"),
                        reviewer=record["reviewer"],
                        decided_at=record["decided_at"],
                    )
                )
            except (json.JSONDecodeError, UnicodeDecodeError, KeyError):
                continue  # partial or foreign line; latest-wins state unaffected
        return decisions

    def latest(self) -> dict[str, MappingDecision]:
        state: dict[str, MappingDecision] = {}
        for decision in self.replay():
            state[decision.component_id] = decision
        return state


@dataclass
class ReviewSession:
    """One loaded run under review: immutable inputs plus the decision log."""

    session_id: str
    bom: list[BomEntry]
    db: list[LcaActivity]
    run: BomRunResult
    log: DecisionLog

    def __post_init__(self) -> None:
        self.activities = {act.id: act for act in self.db}
        self.reports = {report.component_id: report for report in self.run.reports}


def _decision_json(decision: MappingDecision) -> dict:
    return {
        "component_id": decision.component_id,
        "activity_id": decision.activity_id,
        "source": decision.source,
        "rank": decision.rank,
        "reviewer": decision.reviewer,
        "decided_at": decision.decided_at,
    }


def _candidate_json(session: ReviewSession, activity_id: str, score: float) -> dict:
    activity = session.activities.get(activity_id)
    return {
        "activity_id": activity_id,
        "activity_name": activity.name if activity else activity_id,
        "score": score,
    }


def create_app(session: ReviewSession | None, static_dir: str | Path | None = None) -> FastAPI:
    """Build the review API over one session; ``None`` means no run loaded."""
    app = FastAPI(title="ecolink review service")

    def no_session() -> JSONResponse:
        return JSONResponse({"v": SCHEMA_VERSION, "error": "no run loaded"}, status_code=409)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/components")
    def components():
        if session is None:
            return no_session()
        decided = session.log.latest()
        items = []
        for entry in session.bom:
            report = session.reports.get(entry.id)
            top = None
            if report and report.candidates:
                top = _candidate_json(session, *report.candidates[0])
            decision = decided.get(entry.id)
            items.append(
                {
                    "component": {
                        "id": entry.id,
                        "name": entry.name,
                        "material": entry.material,
                        "supplier": entry.supplier,
                        "quantity": entry.quantity,
                    },
                    "status": "decided" if decision else "pending",
                    "top_candidate": top,
                    "decision": _decision_json(decision) if decision else None,
                }
            )
        return {"v": SCHEMA_VERSION, "components": items}

    @app.get("/components/{component_id}/candidates")
    def candidates(component_id: str):
        if session is None:
            return no_session()
        report = session.reports.get(component_id)
        if report is None:
            return JSONResponse(
                {"v": SCHEMA_VERSION, "error": f"unknown component '{component_id}'"},
                status_code=404,
            )
        decision = session.log.latest().get(component_id)
        return {
            "v": SCHEMA_VERSION,
            "component_id": component_id,
            "mode": report.mode.value,
            "query_text": report.query_text,
            "candidates": [_candidate_json(session, aid, score) for aid, score in report.candidates],
            "datasheet": (
                {"filename": report.datasheet.filename, "score": report.datasheet.score}
                if report.datasheet
                else None
            ),
            "error": report.error,
            "decision": _decision_json(decision) if decision else None,
        }

    @app.post("/components/{component_id}/decision")
    def decide(component_id: str, body: dict):
        if session is None:
            return no_session()
        report = session.reports.get(component_id)
        if report is None:
            return JSONResponse(
                {"v": SCHEMA_VERSION, "error": f"unknown component '{component_id}'"},
                status_code=404,
            )
        activity_id = body.get("activity_id")
        if not isinstance(activity_id, str) or activity_id not in session.activities:
            return JSONResponse(
                {"v": SCHEMA_VERSION, "error": f"unknown activity {activity_id!r}"},
                status_code=422,
            )
        # The server derives the source: a shortlist pick is recorded with
        # its rank, anything else is an expert override.
        rank = None
        for position, (aid, _score) in enumerate(report.candidates, start=1):
            if aid == activity_id:
                rank = position
                break
        source = f"accepted_rank_{rank}" if rank is not None else "expert_override"
        reviewer = body.get("reviewer") or "expert"
        decision = MappingDecision(
            component_id=component_id,
            activity_id=activity_id,
            source=source,
            rank=rank,
            reviewer=str(reviewer),
            decided_at=datetime.now(timezone.utc).isoformat(),
        )
        session.log.append(decision)
        return {"v": SCHEMA_VERSION, "decision": _decision_json(decision)}

    @app.get("/footprint")
    def footprint_endpoint():
        if session is None:
            return no_session()
        result = footprint(session.log.latest().values(), session.bom, session.db)
        return {
            "v": SCHEMA_VERSION,
            "total_kg_co2e": result.total_kg_co2e,
            "breakdown": [
                {
                    "component_id": row.component_id,
                    "component_name": next(
                        (e.name for e in session.bom if e.id == row.component_id),
                        row.component_id,
                    ),
                    "activity_id": row.activity_id,
                    "activity_name": session.activities[row.activity_id].name,
                    "quantity": row.quantity,
                    "emission_factor": row.emission_factor,
                    "unit": row.unit,
                    "kg_co2e": row.kg_co2e,
                    "source": row.source,
                }
                for row in result.rows
            ],
            "uncovered": list(result.uncovered),
        }

    @app.get("/activities")
    def activities():
        if session is None:
            return no_session()
        return {
            "v": SCHEMA_VERSION,
            "activities": [
                {"id": act.id, "name": act.name, "unit": act.unit}
                for act in session.db
            ],
        }

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def session_from_files(
    bom: list[BomEntry],
    db: list[LcaActivity],
    run: BomRunResult,
    data_dir: str | Path,
    session_id: str = "default",
) -> ReviewSession:
    """Assemble a session whose decision log lives in ``data_dir``."""
    data_path = Path(data_dir)
    data_path.mkdir(parents=True, exist_ok=True)
    return ReviewSession(
        session_id=session_id,
        bom=bom,
        db=db,
        run=run,
        log=DecisionLog(data_path / "decisions.jsonl"),
    )
