"""Report serialization.

Every artifact the pipeline writes is JSON Lines with a header record
carrying the schema tag and run metadata. Records are emitted with
sorted keys and fixed separators, and documents are ordered by id, so
a rerun with the same inputs produces byte-identical files except for
the header's creation timestamp. Per-document wall times go to a
separate timings sidecar precisely because they never repeat.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from ghostink.verifier import DetectionVerdict

SCHEMA_SCAN = "ghostink/scan@1"
SCHEMA_CORPUS = "ghostink/corpus@1"
SCHEMA_TAXONOMY = "ghostink/taxonomy@1"
SCHEMA_METRICS = "ghostink/metrics@1"


def dump_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(dump_record(record) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def make_header(schema: str, **meta) -> dict:
    header = {
        "record": "header",
        "schema": schema,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    header.update(meta)
    return header


def split_records(records: list[dict]) -> tuple[dict, list[dict]]:
    """(header, body); a missing header yields an empty dict."""
    if records and records[0].get("record") == "header":
        return records[0], records[1:]
    return {}, records


def _excerpt_record(verdict_excerpt) -> dict:
    return {
        "excerpt_id": verdict_excerpt.excerpt_id,
        "page_index": verdict_excerpt.page_index,
        "bbox": [round(v, 4) for v in verdict_excerpt.bbox],
        "element_ids": list(verdict_excerpt.element_ids),
        "text": verdict_excerpt.text,
        "flags": list(verdict_excerpt.flags),
        "label": verdict_excerpt.label,
        "rationale": verdict_excerpt.rationale,
        "backend": verdict_excerpt.backend,
    }


def document_record(verdict: DetectionVerdict) -> dict:
    return {
        "record": "document",
        "document_id": verdict.document_id,
        "detector": verdict.detector,
        "malicious": verdict.malicious,
        "excerpts": [_excerpt_record(e) for e in verdict.excerpts],
        "error": verdict.error,
        "usage": {
            "prompt_tokens": verdict.usage.prompt_tokens,
            "completion_tokens": verdict.usage.completion_tokens,
        },
    }


def write_scan_report(
    path: str | Path,
    verdicts: list[DetectionVerdict],
    meta: dict | None = None,
    unprocessed: list[dict] | None = None,
) -> None:
    """Scan report: header, one record per (document, detector), summary."""
    unprocessed = unprocessed or []
    records: list[dict] = [make_header(SCHEMA_SCAN, **(meta or {}))]
    ordered = sorted(verdicts, key=lambda v: (v.document_id, v.detector))
    records.extend(document_record(v) for v in ordered)
    records.append({
        "record": "summary",
        "documents": len({v.document_id for v in verdicts}),
        "verdicts": len(verdicts),
        "malicious": sum(1 for v in verdicts if v.malicious),
        "prompt_tokens": sum(v.usage.prompt_tokens for v in verdicts),
        "completion_tokens": sum(v.usage.completion_tokens for v in verdicts),
        "unprocessed": sorted(unprocessed, key=lambda u: u.get("document_id", "")),
    })
    write_jsonl(path, records)


def write_timings(
    path: str | Path, rows: list[tuple[str, str, float]]
) -> None:
    """Wall-clock sidecar: (document_id, detector, seconds) rows."""
    write_jsonl(path, (
        {
            "record": "timing",
            "document_id": document_id,
            "detector": detector,
            "seconds": round(seconds, 6),
        }
        for document_id, detector, seconds in rows
    ))


def read_scan_report(path: str | Path) -> tuple[dict, list[dict], dict]:
    """(header, document records, summary record)."""
    header, body = split_records(read_jsonl(path))
    summary: dict = {}
    documents: list[dict] = []
    for record in body:
        if record.get("record") == "summary":
            summary = record
        elif record.get("record") == "document":
            documents.append(record)
    return header, documents, summary


def reports_equal_modulo_header(path_a: str | Path, path_b: str | Path) -> bool:
    """Byte equality after dropping each file's header line."""
    lines_a = Path(path_a).read_bytes().split(b"\n")
    lines_b = Path(path_b).read_bytes().split(b"\n")
    drop = lambda lines: [
        line for line in lines
        if line and not line.startswith(b'{"created_utc"')
        and b'"record":"header"' not in line
    ]
    return drop(lines_a) == drop(lines_b)
