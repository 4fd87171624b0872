"""Domain types shared by every other module.

All values are immutable after construction and safe to share across
threads. Invariants are checked by pure predicates (``validate_bom``,
``Embedding.is_normalized``), not enforced in constructors, so parsers can
surface every problem in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

NORM_TOLERANCE = 1e-6


class Mode(str, Enum):
    """Which pipeline stages contribute to the ranking query."""

    SEMANTIC_ONLY = "semantic-only"
    LLM = "llm"
    LLM_DATASHEET = "llm-datasheet"


@dataclass(frozen=True)
class BomEntry:
    """One bill-of-materials row."""

    id: str
    name: str
    material: str = ""
    supplier: str = ""
    quantity: float = 1.0


@dataclass(frozen=True)
class LcaActivity:
    """One life-cycle-assessment database entry."""

    id: str
    name: str
    description: str
    emission_factor: float
    unit: str


@dataclass(frozen=True)
class Datasheet:
    """One supplier technical document, already extracted to plain text."""

    id: str
    filename: str
    body: str


class Embedding:
    """Fixed-length float32 vector produced by an embedding backend."""

    __slots__ = ("values",)

    def __init__(self, values) -> None:
        arr = np.asarray(values, dtype=np.float32)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("embedding must be a non-empty 1-D vector")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    def is_normalized(self, tolerance: float = NORM_TOLERANCE) -> bool:
        norm = float(np.linalg.norm(self.values.astype(np.float64)))
        return abs(norm - 1.0) <= tolerance

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Embedding):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))

    def __repr__(self) -> str:
        return f"Embedding(dim={self.dim})"


@dataclass(frozen=True)
class CandidateRanking:
    """Ordered activity shortlist for one component.

    ``candidates`` holds (activity_id, cosine score) pairs, scores
    nonincreasing, ties broken by activity id ascending.
    """

    component_id: str
    query_text: str
    mode: Mode
    candidates: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class MappingDecision:
    """Expert-confirmed or expert-corrected component-to-activity link."""

    component_id: str
    activity_id: str
    source: str  # "accepted_rank_<n>" or "expert_override"
    rank: int | None
    reviewer: str
    decided_at: str  # ISO-8601


@dataclass(frozen=True)
class ValidationIssue:
    """One invariant violation found by ``validate_bom``."""

    entry_id: str
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.entry_id}.{self.field}: {self.message}"


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable knobs for a pipeline run."""

    datasheet_threshold: float = 0.5
    top_k: int = 5
    embedding_backend: str = "local-hash:256"
    llm_backend: str = "canned"
    hits_at: tuple[int, ...] = (1, 5)
    parallelism: int = 4
    timings: bool = False

    def __post_init__(self) -> None:
        if not -1.0 <= self.datasheet_threshold <= 1.0:
            raise ValueError("datasheet_threshold must be within [-1, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if any(n < 1 for n in self.hits_at):
            raise ValueError("hits_at values must be positive")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")


def validate_bom(entries: list[BomEntry]) -> list[ValidationIssue]:
    """Check BOM invariants; an empty result means the BOM is valid."""
    issues: list[ValidationIssue] = []
    seen: set[str] = set()
    for entry in entries:
        if entry.id in seen:
            issues.append(ValidationIssue(entry.id, "id", "duplicate id"))
        seen.add(entry.id)
        if not entry.name:
            issues.append(ValidationIssue(entry.id, "name", "name must be nonempty"))
        if not entry.quantity >= 0:  # also catches NaN
            issues.append(ValidationIssue(entry.id, "quantity", "quantity must be >= 0"))
    return issues


def validate_activities(activities: list[LcaActivity]) -> list[ValidationIssue]:
    """Check LCA database invariants; empty result means valid."""
    issues: list[ValidationIssue] = []
    seen: set[str] = set()
    for act in activities:
        if act.id in seen:
            issues.append(ValidationIssue(act.id, "id", "duplicate id"))
        seen.add(act.id)
        if not act.name:
            issues.append(ValidationIssue(act.id, "name", "name must be nonempty"))
        if not act.emission_factor >= 0:
            issues.append(
                ValidationIssue(act.id, "emission_factor", "emission factor must be >= 0")
            )
    return issues
