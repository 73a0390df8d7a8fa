"""Visual discrepancy analysis.

Builds two representations of the same document, one from the parser
(every text element the file claims to contain) and one from the
renderer (the pixels a reader actually sees), then labels each element
Visible or Invisible by what its removal does to the rendered page.

The deterministic oracle renders the element's neighborhood twice, with
the element present and suppressed, and counts changed pixels. An
element whose removal changes almost nothing was never visible in the
first place. Off-page elements are Invisible by construction, since no
window of the page can contain them. A remote vision backend can stand
in for the oracle; its answers are parsed into the same reading type so
downstream code cannot tell the routes apart.

Invisible elements merge into excerpts with the same geometry rule the
rule-based screen uses, and the semantic verifier judges the recovered
text. The result is a second, independently constructed detector over
the same documents.
"""

from __future__ import annotations

import base64
import io
import json
from dataclasses import dataclass, field

import numpy as np

from ghostink.backend import BackendConfig, RemoteBackend, TokenUsage
from ghostink.document import DocumentHandle, TextElement, extract_elements
from ghostink.errors import (
    EmptyRegionError,
    MalformedBackendResponseError,
    OutOfPageBoundsError,
)
from ghostink.pdf.raster import DEFAULT_DPI
from ghostink.stage1 import merge_into_excerpts
from ghostink.verifier import DetectionVerdict, classify_document, load_prompt

VISIBLE = "Visible"
INVISIBLE = "Invisible"

FLAG_RENDER_DIFF = "render_diff"


@dataclass(frozen=True, slots=True)
class VdaConfig:
    """Render-diff oracle constants.

    An element is Invisible when suppressing it changes fewer than
    ``min_changed_fraction`` of window pixels, a changed pixel being one
    that moves more than ``diff_tolerance`` on any channel.
    """

    dpi: int = DEFAULT_DPI
    window_pad_pt: float = 4.0
    diff_tolerance: int = 8
    min_changed_fraction: float = 0.005
    merge_gap_pt: float = 6.0
    chunk_pages: int = 4

    def __post_init__(self) -> None:
        if self.dpi <= 0:
            raise ValueError("dpi must be positive")
        if self.diff_tolerance < 0:
            raise ValueError("diff_tolerance must be non-negative")
        if not 0.0 <= self.min_changed_fraction <= 1.0:
            raise ValueError("min_changed_fraction must be in [0, 1]")
        if self.chunk_pages <= 0:
            raise ValueError("chunk_pages must be positive")


@dataclass(frozen=True, slots=True)
class VisibilityReading:
    element_id: str
    visibility: str
    changed_fraction: float
    pixels_compared: int

    @property
    def invisible(self) -> bool:
        return self.visibility == INVISIBLE


@dataclass(slots=True)
class DualRepresentation:
    """Parser view and render view of one document, side by side."""

    document_id: str
    elements: list[TextElement]
    page_count: int
    _doc: DocumentHandle

    def page_pixels(self, page_index: int, dpi: int = DEFAULT_DPI) -> np.ndarray:
        return self._doc.page_render(page_index, dpi).buffer

    def parser_view(self, page_index: int) -> list[TextElement]:
        return [e for e in self.elements if e.page_index == page_index]


def build_representations(doc: DocumentHandle) -> DualRepresentation:
    return DualRepresentation(
        document_id=doc.document_id,
        elements=extract_elements(doc),
        page_count=doc.page_count,
        _doc=doc,
    )


def visibility_oracle(
    doc: DocumentHandle,
    element: TextElement,
    config: VdaConfig = VdaConfig(),
) -> VisibilityReading:
    """Label one element by differencing renders with and without it."""
    mx0, my0, mx1, my1 = doc.media_box(element.page_index)
    x0, y0, x1, y1 = element.bbox
    if min(x1, mx1) <= max(x0, mx0) or min(y1, my1) <= max(y0, my0):
        return VisibilityReading(element.element_id, INVISIBLE, 0.0, 0)

    pad = config.window_pad_pt
    window = (x0 - pad, y0 - pad, x1 + pad, y1 + pad)
    ordinal = int(element.element_id.split(".")[1])
    try:
        with_element = doc.render_region(element.page_index, window, config.dpi)
        without = doc.render_region(
            element.page_index, window, config.dpi,
            skip_ordinals=frozenset({ordinal}),
        )
    except (OutOfPageBoundsError, EmptyRegionError):
        return VisibilityReading(element.element_id, INVISIBLE, 0.0, 0)

    diff = np.abs(with_element.astype(np.int16) - without.astype(np.int16))
    changed = (diff > config.diff_tolerance).any(axis=-1)
    fraction = float(changed.mean()) if changed.size else 0.0
    visibility = INVISIBLE if fraction < config.min_changed_fraction else VISIBLE
    return VisibilityReading(
        element.element_id, visibility, fraction, int(changed.size)
    )


def visibility_readings(
    doc: DocumentHandle,
    config: VdaConfig = VdaConfig(),
    page_indices: list[int] | None = None,
) -> list[VisibilityReading]:
    """Oracle readings for every element, optionally restricted to pages."""
    readings = []
    for element in extract_elements(doc):
        if page_indices is not None and element.page_index not in page_indices:
            continue
        readings.append(visibility_oracle(doc, element, config))
    return readings


def detect_discrepancies(
    doc: DocumentHandle,
    config: VdaConfig = VdaConfig(),
    analyzer: "RemoteVisualAnalyzer | None" = None,
) -> list[VisibilityReading]:
    """Invisible-element readings for the whole document."""
    if analyzer is not None:
        return [r for r in analyzer.read_document(doc) if r.invisible]
    return [r for r in visibility_readings(doc, config) if r.invisible]


@dataclass(slots=True)
class ChunkedScan:
    readings: list[VisibilityReading] = field(default_factory=list)
    pages_processed: int = 0
    stopped_early: bool = False

    @property
    def discrepancies(self) -> list[VisibilityReading]:
        return [r for r in self.readings if r.invisible]


def detect_discrepancies_chunked(
    doc: DocumentHandle,
    config: VdaConfig = VdaConfig(),
    early_stop: bool = True,
) -> ChunkedScan:
    """Page-chunked scan for long documents.

    Pages are processed ``chunk_pages`` at a time; with early_stop the
    scan ends at the first chunk containing any discrepancy, which keeps
    triage cost proportional to where the hidden content sits rather
    than to document length.
    """
    scan = ChunkedScan()
    pages = list(range(doc.page_count))
    for start in range(0, len(pages), config.chunk_pages):
        chunk = pages[start:start + config.chunk_pages]
        scan.readings.extend(visibility_readings(doc, config, chunk))
        scan.pages_processed += len(chunk)
        if early_stop and scan.discrepancies:
            scan.stopped_early = scan.pages_processed < len(pages)
            break
    return scan


def vda_verdict(
    doc: DocumentHandle,
    config: VdaConfig = VdaConfig(),
    verifier=None,
    analyzer: "RemoteVisualAnalyzer | None" = None,
) -> DetectionVerdict:
    """Full second-route verdict: oracle (or remote analyzer), merge,
    semantic verification, document fold."""
    from ghostink.verifier import HeuristicVerifier

    verifier = verifier or HeuristicVerifier()
    discrepancies = detect_discrepancies(doc, config, analyzer)
    invisible_ids = {r.element_id for r in discrepancies}
    elements = [
        e for e in extract_elements(doc) if e.element_id in invisible_ids
    ]
    flags = {e.element_id: [FLAG_RENDER_DIFF] for e in elements}
    excerpts = merge_into_excerpts(
        doc.document_id, elements, flags, config.merge_gap_pt
    )
    verdicts = [verifier.verify(excerpt) for excerpt in excerpts]
    verdict = classify_document(doc.document_id, verdicts, detector="vda")
    total = TokenUsage()
    total.add(getattr(verifier, "usage", TokenUsage()))
    if analyzer is not None:
        total.add(analyzer.usage)
    verdict.usage = total
    return verdict


class RemoteVisualAnalyzer:
    """Vision-model route: page image plus parser view in, invisible
    element ids out. Interchangeable with the oracle, never mixed with it."""

    def __init__(self, config: BackendConfig | None = None, transport=None):
        self.config = config or BackendConfig()
        self.backend = RemoteBackend(self.config, transport=transport)
        self.system_prompt = load_prompt("vda", self.config.prompt_version)

    @property
    def usage(self) -> TokenUsage:
        return self.backend.usage

    def read_document(self, doc: DocumentHandle) -> list[VisibilityReading]:
        readings: list[VisibilityReading] = []
        rep = build_representations(doc)
        for page_index in range(rep.page_count):
            page_elements = rep.parser_view(page_index)
            if not page_elements:
                continue
            invisible = self._read_page(rep, page_index, page_elements)
            for element in page_elements:
                visibility = (
                    INVISIBLE if element.element_id in invisible else VISIBLE
                )
                readings.append(VisibilityReading(
                    element.element_id, visibility, -1.0, 0
                ))
        return readings

    def _read_page(
        self,
        rep: DualRepresentation,
        page_index: int,
        page_elements: list[TextElement],
    ) -> set[str]:
        listing = [
            {
                "element_id": e.element_id,
                "text": e.text,
                "bbox": [round(v, 2) for v in e.bbox],
                "font_size": round(e.font_size, 2),
            }
            for e in page_elements
        ]
        payload = {
            "page_index": page_index,
            "page_image_png_base64": _encode_png(
                rep.page_pixels(page_index)
            ),
            "parser_elements": listing,
        }
        reply = self.backend.chat_json(
            self.system_prompt, json.dumps(payload, sort_keys=True)
        )
        ids = reply.get("invisible_element_ids")
        if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
            raise MalformedBackendResponseError(
                "invisible_element_ids missing or not a list of strings"
            )
        known = {e.element_id for e in page_elements}
        return {i for i in ids if i in known}


def _encode_png(pixels: np.ndarray) -> str:
    from PIL import Image

    buffer = io.BytesIO()
    Image.fromarray(pixels, mode="RGB").save(buffer, format="PNG")
    return base64.b64encode(buffer.getvalue()).decode("ascii")
