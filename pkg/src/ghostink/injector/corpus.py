"""Adversarial corpus builder.

Takes a rendered resume template, hides a payload in it with one of
four concealment techniques, and records ground truth (element ids,
page, bbox, payload text) in a manifest. Each technique is constructed
with margin to its hiding contract:

* ColorBased: near-white text (every channel >= 252) on the white page,
  well under the contrast threshold at normal size.
* SizeBased: black text at 2 pt or less, below both the tiny-font
  threshold and the rasterizer's glyph quantization floor.
* PositionBased: normal text placed entirely outside the page box.
* LayerBased: normal text either on an optional-content layer that is
  off by default or drawn in invisible render mode.

Payload ops are always appended after all template content, so the
payload elements are the last ordinals on their page and ground-truth
ids survive any rewrite that preserves ordinal positions.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ghostink.document import (
    DocumentHandle,
    TextElement,
    extract_elements,
    load_document,
)
from ghostink.errors import PlacementConflictError
from ghostink.injector.payloads import PAYLOAD_CELLS, generate_payload
from ghostink.injector.templates import (
    PAGE_H,
    PAGE_W,
    TEMPLATE_NAMES,
    TemplateDoc,
    build_template,
    wrap_payload,
)
from ghostink.patterns import normalize_text
from ghostink.reports import SCHEMA_CORPUS, dump_record, make_header, read_jsonl

TECHNIQUES = ("ColorBased", "SizeBased", "PositionBased", "LayerBased")

KIND_CLEAN = "clean"
KIND_INJECTED = "injected"
KIND_ARTIFACT = "artifact"

PAYLOAD_FONT = "Helvetica"
LINE_LEADING_FACTOR = 1.2

# Every channel >= 252 keeps the Euclidean distance to the white page
# below 5, a third of the contrast threshold.
_NEAR_WHITE = (
    (253, 253, 253),
    (254, 254, 254),
    (252, 253, 254),
    (255, 254, 253),
    (253, 254, 255),
)
_TINY_SIZES = (1.0, 1.5, 2.0)
_SHOW_OPS = ("Tj", "TJ", "'", '"')

# Benign hidden furniture: page decorations and tool droppings that
# trip the same concealment analyzers but carry no payload.
ARTIFACT_TEXTS = (
    "Page 1 of 1",
    "Generated by ResumeForge 3.2",
    "Converted with PDFSmith trial version",
    "Draft - do not distribute",
    "CONFIDENTIAL",
    "2025-02-14",
    "https://track.example/r/4821",
    "resume_final_v2.pdf",
    "Template (c) CareerDocs, all rights reserved.",
    "Last modified 2025-01-30",
)

PERIODS = ("2025-01", "2025-02", "2025-03", "2025-04", "2025-05", "2025-06")


@dataclass(frozen=True)
class ManifestEntry:
    """Ground truth for one generated document."""

    document_id: str
    path: str
    kind: str
    template: str
    technique: str | None
    top_level: str | None
    subtype: str | None
    payload_text: str | None
    element_ids: tuple[str, ...]
    page_index: int | None
    bbox: tuple[float, float, float, float] | None
    seed: int
    period: str

    def to_record(self) -> dict:
        return {
            "record": "entry",
            "document_id": self.document_id,
            "path": self.path,
            "kind": self.kind,
            "template": self.template,
            "technique": self.technique,
            "top_level": self.top_level,
            "subtype": self.subtype,
            "payload_text": self.payload_text,
            "element_ids": list(self.element_ids),
            "page_index": self.page_index,
            "bbox": None if self.bbox is None else [round(v, 4) for v in self.bbox],
            "seed": self.seed,
            "period": self.period,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ManifestEntry":
        bbox = record.get("bbox")
        return cls(
            document_id=record["document_id"],
            path=record["path"],
            kind=record["kind"],
            template=record["template"],
            technique=record.get("technique"),
            top_level=record.get("top_level"),
            subtype=record.get("subtype"),
            payload_text=record.get("payload_text"),
            element_ids=tuple(record.get("element_ids") or ()),
            page_index=record.get("page_index"),
            bbox=None if bbox is None else tuple(bbox),
            seed=record["seed"],
            period=record["period"],
        )


@dataclass
class CorpusManifest:
    seed: int
    entries: list[ManifestEntry] = field(default_factory=list)

    def by_kind(self, kind: str) -> list[ManifestEntry]:
        return [e for e in self.entries if e.kind == kind]

    def entry(self, document_id: str) -> ManifestEntry:
        for e in self.entries:
            if e.document_id == document_id:
                return e
        raise KeyError(document_id)

    def write(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        counts = {
            kind: len(self.by_kind(kind))
            for kind in (KIND_CLEAN, KIND_INJECTED, KIND_ARTIFACT)
        }
        lines = [dump_record(make_header(SCHEMA_CORPUS, seed=self.seed, counts=counts))]
        ordered = sorted(self.entries, key=lambda e: e.document_id)
        lines.extend(dump_record(e.to_record()) for e in ordered)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "CorpusManifest":
        records = read_jsonl(path)
        seed = 0
        entries = []
        for record in records:
            if record.get("record") == "header":
                seed = record.get("seed", 0)
            elif record.get("record") == "entry":
                entries.append(ManifestEntry.from_record(record))
        return cls(seed=seed, entries=entries)


@dataclass(frozen=True)
class InjectionResult:
    data: bytes
    page_index: int
    element_ids: tuple[str, ...]
    bbox: tuple[float, float, float, float]
    technique: str
    payload_text: str


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from string-ish parts via sha256."""
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def _union_bbox(elements: Sequence[TextElement]) -> tuple[float, float, float, float]:
    x0 = min(e.bbox[0] for e in elements)
    y0 = min(e.bbox[1] for e in elements)
    x1 = max(e.bbox[2] for e in elements)
    y1 = max(e.bbox[3] for e in elements)
    return (x0, y0, x1, y1)


def _boxes_overlap(a, b) -> bool:
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def _emit_lines(page, lines, x, y_top, font, size, color, render_mode, layer, rng):
    leading = size * LINE_LEADING_FACTOR
    y = y_top
    for line in lines:
        page.text(
            x,
            y,
            line,
            font=font,
            size=size,
            color=color,
            render_mode=render_mode,
            layer=layer,
            op=rng.choice(_SHOW_OPS),
            leading=leading,
        )
        y -= leading


def inject_payload(
    template: TemplateDoc,
    technique: str,
    payload_text: str,
    rng: random.Random,
    validate: bool = True,
) -> InjectionResult:
    """Hide payload_text in the template and return the finished bytes.

    The template writer is consumed: payload ops are appended to one of
    its reserved slots and the document is serialized. Ground truth is
    recovered by re-parsing the output, which also proves the payload
    text survives extraction byte-for-byte (modulo whitespace).
    """
    if technique not in TECHNIQUES:
        raise PlacementConflictError(f"unknown technique: {technique}")
    slot = rng.choice(template.slots)
    page = template.writer.pages[slot.page_index]
    page_w, page_h = template.page_sizes[slot.page_index]

    size = 9.5
    color = (0, 0, 0)
    render_mode = 0
    layer = None
    x, width = slot.x, slot.width

    if technique == "ColorBased":
        size = 8.0
        color = rng.choice(_NEAR_WHITE)
    elif technique == "SizeBased":
        size = rng.choice(_TINY_SIZES)
    elif technique == "LayerBased":
        if rng.random() < 0.5:
            layer = template.writer.define_layer("Background", visible=False)
        else:
            render_mode = 3

    lines = wrap_payload(payload_text, PAYLOAD_FONT, size, width)
    leading = size * LINE_LEADING_FACTOR

    if technique == "PositionBased":
        # All wrapped lines must land outside the page box, so pick a
        # side and offset far enough that descenders stay out too.
        variant = rng.choice(("right", "below", "above"))
        if variant == "right":
            x = page_w + 24.0
            y_top = slot.baseline_y
        elif variant == "below":
            y_top = -24.0
        else:
            y_top = page_h + 24.0 + (len(lines) - 1) * leading
    else:
        y_top = slot.baseline_y

    _emit_lines(page, lines, x, y_top, PAYLOAD_FONT, size, color, render_mode, layer, rng)
    data = template.writer.to_bytes()

    doc = load_document(data, document_id="pending")
    page_elements = [
        e for e in extract_elements(doc) if e.page_index == slot.page_index
    ]
    payload_elements = page_elements[-len(lines):]
    element_ids = tuple(e.element_id for e in payload_elements)
    bbox = _union_bbox(payload_elements)

    if validate:
        _validate_injection(
            doc, technique, payload_text, payload_elements,
            page_elements[: -len(lines)], (page_w, page_h),
        )
    return InjectionResult(
        data=data,
        page_index=slot.page_index,
        element_ids=element_ids,
        bbox=bbox,
        technique=technique,
        payload_text=payload_text,
    )


def _validate_injection(
    doc: DocumentHandle,
    technique: str,
    payload_text: str,
    payload_elements: Sequence[TextElement],
    template_elements: Sequence[TextElement],
    page_size: tuple[float, float],
) -> None:
    joined = normalize_text(" ".join(e.text for e in payload_elements))
    if joined != normalize_text(payload_text):
        raise PlacementConflictError(
            f"payload text did not round-trip: {joined!r}"
        )

    page_w, page_h = page_size
    page_box = (0.0, 0.0, page_w, page_h)
    for element in payload_elements:
        if technique == "ColorBased":
            r, g, b = element.fill_color.as_tuple()
            if min(r, g, b) < 252:
                raise PlacementConflictError(
                    f"color-based payload not near-white: {(r, g, b)}"
                )
        elif technique == "SizeBased":
            if element.font_size > 2.0:
                raise PlacementConflictError(
                    f"size-based payload too large: {element.font_size}pt"
                )
        elif technique == "PositionBased":
            if _boxes_overlap(element.bbox, page_box):
                raise PlacementConflictError(
                    f"position-based payload overlaps the page: {element.bbox}"
                )
        elif technique == "LayerBased":
            if not element.layer_hidden and element.render_mode != 3:
                raise PlacementConflictError(
                    "layer-based payload is neither on a hidden layer "
                    "nor in an invisible render mode"
                )

    if technique != "PositionBased":
        visible_template = [
            e for e in template_elements
            if not e.layer_hidden and e.render_mode not in (3, 7)
        ]
        for element in payload_elements:
            for other in visible_template:
                if _boxes_overlap(element.bbox, other.bbox):
                    raise PlacementConflictError(
                        f"payload overlaps template text at {other.bbox}"
                    )


def _build_clean(template_name: str, seed: int) -> bytes:
    template = build_template(template_name, random.Random(seed))
    return template.writer.to_bytes()


def build_corpus(
    out_dir: str | Path,
    clean: int = 200,
    per_cell: int = 10,
    artifacts: int = 40,
    seed: int = 0,
    template_names: Sequence[str] = TEMPLATE_NAMES,
    cells: Iterable[tuple[str, tuple[str, str]]] | None = None,
) -> CorpusManifest:
    """Generate the corpus under out_dir and write manifest.jsonl.

    Injected documents cover every (technique, payload cell) pair
    per_cell times. Clean documents are untouched templates; artifact
    documents hide benign furniture with the same techniques. Every
    document gets its own sha256-derived seed, so any single file can
    be regenerated without rebuilding the rest.
    """
    out_dir = Path(out_dir)
    docs_dir = out_dir / "docs"
    docs_dir.mkdir(parents=True, exist_ok=True)

    if cells is None:
        cells = [
            (technique, cell)
            for technique in TECHNIQUES
            for cell in PAYLOAD_CELLS
        ]
    else:
        cells = list(cells)

    manifest = CorpusManifest(seed=seed)
    serial = 0

    def _write(document_id: str, data: bytes) -> str:
        rel = f"docs/{document_id}.pdf"
        (out_dir / rel).write_bytes(data)
        return rel

    def _period() -> str:
        nonlocal serial
        period = PERIODS[serial % len(PERIODS)]
        serial += 1
        return period

    for i in range(clean):
        document_id = f"clean-{i:04d}"
        doc_seed = derive_seed(seed, "clean", i)
        template_name = template_names[i % len(template_names)]
        data = _build_clean(template_name, doc_seed)
        manifest.entries.append(ManifestEntry(
            document_id=document_id,
            path=_write(document_id, data),
            kind=KIND_CLEAN,
            template=template_name,
            technique=None,
            top_level=None,
            subtype=None,
            payload_text=None,
            element_ids=(),
            page_index=None,
            bbox=None,
            seed=doc_seed,
            period=_period(),
        ))

    for technique, (top_level, subtype) in cells:
        for i in range(per_cell):
            document_id = f"inj-{technique.lower()}-{subtype.lower()}-{i:03d}"
            doc_seed = derive_seed(seed, "inject", technique, top_level, subtype, i)
            rng = random.Random(doc_seed)
            template_name = template_names[
                (i + len(manifest.entries)) % len(template_names)
            ]
            template = build_template(template_name, rng)
            payload = generate_payload(top_level, subtype, rng)
            result = inject_payload(template, technique, payload, rng)
            manifest.entries.append(ManifestEntry(
                document_id=document_id,
                path=_write(document_id, result.data),
                kind=KIND_INJECTED,
                template=template_name,
                technique=technique,
                top_level=top_level,
                subtype=subtype,
                payload_text=payload,
                element_ids=result.element_ids,
                page_index=result.page_index,
                bbox=result.bbox,
                seed=doc_seed,
                period=_period(),
            ))

    for i in range(artifacts):
        document_id = f"art-{i:04d}"
        doc_seed = derive_seed(seed, "artifact", i)
        rng = random.Random(doc_seed)
        template_name = template_names[i % len(template_names)]
        technique = TECHNIQUES[i % len(TECHNIQUES)]
        template = build_template(template_name, rng)
        text = ARTIFACT_TEXTS[i % len(ARTIFACT_TEXTS)]
        result = inject_payload(template, technique, text, rng)
        manifest.entries.append(ManifestEntry(
            document_id=document_id,
            path=_write(document_id, result.data),
            kind=KIND_ARTIFACT,
            template=template_name,
            technique=technique,
            top_level=None,
            subtype=None,
            payload_text=text,
            element_ids=result.element_ids,
            page_index=result.page_index,
            bbox=result.bbox,
            seed=doc_seed,
            period=_period(),
        ))

    manifest.write(out_dir / "manifest.jsonl")
    return manifest
