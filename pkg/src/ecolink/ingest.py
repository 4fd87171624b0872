"""Parsers and writers for BOM files, LCA database dumps, datasheet pools,
and gold-label files.

Parsers are pure per-source: output order depends only on input content,
never on filesystem enumeration order. Every parser has a matching writer
so parse -> emit -> parse round-trips to identical lists.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from ecolink.errors import IngestError
from ecolink.model import BomEntry, Datasheet, LcaActivity

_HEADER_ALIASES = {
    "id": "id",
    "name": "name",
    "component": "name",
    "component name": "name",
    "component_name": "name",
    "material": "material",
    "supplier": "supplier",
    "manufacturer": "supplier",
    "quantity": "quantity",
    "qty": "quantity",
}
_MANDATORY_FIELDS = ("name", "material", "supplier")


@dataclass(frozen=True)
class GoldLabel:
    """Expert-assigned correct activity for one component."""

    component_id: str
    activity_id: str


def detect_delimiter(header_line: str) -> str:
    """Pick the BOM delimiter from the header row: ';' or ','.

    Industrial exports from German-speaking suppliers commonly use
    semicolons, so ';' wins ties.
    """
    if header_line.count(",") > header_line.count(";"):
        return ","
    return ";"


def parse_bom(source: TextIO, delimiter: str | None = None) -> list[BomEntry]:
    """Parse delimiter-separated BOM text into entries, in file order.

    The header row must contain name, material and supplier columns
    (case-insensitive, see _HEADER_ALIASES). Missing id column synthesizes
    ids as "row-<1-based index>"; missing quantity column defaults to 1.
    """
    text = source.read()
    if not text.strip():
        raise IngestError("BOM is empty: missing header row")
    first_line = text.splitlines()[0]
    if delimiter is None:
        delimiter = detect_delimiter(first_line)

    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    try:
        raw_header = next(reader)
    except StopIteration:  # pragma: no cover - guarded by the strip() check
        raise IngestError("BOM is empty: missing header row") from None

    columns: dict[str, int] = {}
    for pos, cell in enumerate(raw_header):
        key = _HEADER_ALIASES.get(cell.strip().lower())
        if key is not None and key not in columns:
            columns[key] = pos
    for required in _MANDATORY_FIELDS:
        if required not in columns:
            raise IngestError(f"BOM header is missing a '{required}' column")

    entries: list[BomEntry] = []
    width = len(raw_header)
    for row_index, row in enumerate(reader, start=1):
        if len(row) != width:
            raise IngestError(
                f"BOM line {reader.line_num}: expected {width} cells, got {len(row)}"
            )
        if "id" in columns:
            entry_id = row[columns["id"]].strip()
        else:
            entry_id = f"row-{row_index}"
        quantity = 1.0
        if "quantity" in columns:
            cell = row[columns["quantity"]].strip()
            if cell:
                try:
                    quantity = float(cell)
                except ValueError:
                    raise IngestError(
                        f"BOM line {reader.line_num}: invalid quantity {cell!r}"
                    ) from None
        entries.append(
            BomEntry(
                id=entry_id,
                name=row[columns["name"]].strip(),
                material=row[columns["material"]].strip(),
                supplier=row[columns["supplier"]].strip(),
                quantity=quantity,
            )
        )
    return entries


def write_bom(entries: Iterable[BomEntry], sink: TextIO, delimiter: str = ";") -> None:
    """Emit entries in the canonical BOM layout."""
    writer = csv.writer(sink, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["id", "name", "material", "supplier", "quantity"])
    for entry in entries:
        writer.writerow([entry.id, entry.name, entry.material, entry.supplier, repr(entry.quantity)])


def parse_lca_db(source: TextIO) -> list[LcaActivity]:
    """Parse one JSON record per line into activities, in file order."""
    activities: list[LcaActivity] = []
    seen: set[str] = set()
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"LCA db line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(record, dict):
            raise IngestError(f"LCA db line {lineno}: expected an object")
        for key in ("id", "name", "description", "emission_factor", "unit"):
            if key not in record:
                raise IngestError(f"LCA db line {lineno}: missing key '{key}'")
        activity_id = record["id"]
        if not isinstance(activity_id, str):
            raise IngestError(f"LCA db line {lineno}: id must be a string")
        if activity_id in seen:
            raise IngestError(f"LCA db: duplicate id '{activity_id}'")
        seen.add(activity_id)
        factor = record["emission_factor"]
        if not isinstance(factor, (int, float)) or isinstance(factor, bool):
            raise IngestError(f"LCA db line {lineno}: emission_factor must be a number")
        if factor < 0:
            raise IngestError(
                f"LCA db line {lineno}: emission_factor must be >= 0, got {factor}"
            )
        activities.append(
            LcaActivity(
                id=activity_id,
                name=str(record["name"]),
                description=str(record["description"]),
                emission_factor=float(factor),
                unit=str(record["unit"]),
            )
        )
    return activities


def write_lca_db(activities: Iterable[LcaActivity], sink: TextIO) -> None:
    """Emit activities as one JSON record per line."""
    for act in activities:
        record = {
            "id": act.id,
            "name": act.name,
            "description": act.description,
            "emission_factor": act.emission_factor,
            "unit": act.unit,
        }
        sink.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
        sink.write("\n")


def load_datasheets(directory: str | Path) -> list[Datasheet]:
    """Load every .txt file in the directory, sorted by filename ascending."""
    root = Path(directory)
    if not root.is_dir():
        raise IngestError(f"datasheet directory not found: {root}")
    sheets: list[Datasheet] = []
    for path in sorted(root.glob("*.txt"), key=lambda p: p.name):
        try:
            body = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IngestError(f"cannot read datasheet {path}: {exc}") from None
        except UnicodeDecodeError:
            raise IngestError(f"datasheet {path} is not valid UTF-8") from None
        sheets.append(Datasheet(id=path.name, filename=path.name, body=body))
    return sheets


def write_datasheets(sheets: Iterable[Datasheet], directory: str | Path) -> None:
    """Write each datasheet body to <directory>/<filename>."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    for sheet in sheets:
        (root / sheet.filename).write_text(sheet.body, encoding="utf-8")


def parse_gold_labels(source: TextIO) -> list[GoldLabel]:
    """Parse one JSON record per line into gold labels.

    Id resolution against the loaded BOM and database happens at eval time,
    not here.
    """
    labels: list[GoldLabel] = []
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"gold labels line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(record, dict):
            raise IngestError(f"gold labels line {lineno}: expected an object")
        for key in ("component_id", "activity_id"):
            if key not in record or not isinstance(record[key], str):
                raise IngestError(f"gold labels line {lineno}: missing string key '{key}'")
        labels.append(GoldLabel(record["component_id"], record["activity_id"]))
    return labels


def write_gold_labels(labels: Iterable[GoldLabel], sink: TextIO) -> None:
    """Emit gold labels as one JSON record per line."""
    for label in labels:
        sink.write(
            json.dumps(
                {"component_id": label.component_id, "activity_id": label.activity_id},
                ensure_ascii=False,
                sort_keys=True,
            )
        )
        sink.write("\n")


def load_bom(path: str | Path) -> list[BomEntry]:
    with open(path, encoding="utf-8") as fh:
        return parse_bom(fh)


def load_lca_db(path: str | Path) -> list[LcaActivity]:
    with open(path, encoding="utf-8") as fh:
        return parse_lca_db(fh)


def load_gold_labels(path: str | Path) -> list[GoldLabel]:
    with open(path, encoding="utf-8") as fh:
        return parse_gold_labels(fh)
