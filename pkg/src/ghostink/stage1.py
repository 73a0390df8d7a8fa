"""Stage 1: rule-based visual screening of text elements.

Four analyzers inspect every extracted element for the physical
signatures of hidden text, plus a positional check for content placed
outside the page:

* tiny type (effective size below a legibility floor);
* fill color nearly identical to the sampled local background;
* a flat pixel window (luminance variance close to zero);
* a window whose ink fraction is near zero despite text being present.

Flagged elements that sit close together merge into candidate excerpts,
the unit the semantic verifier later judges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ghostink.document import (
    DocumentHandle,
    RgbColor,
    TextElement,
    extract_elements,
    sample_background_color,
)
from ghostink.errors import EmptyRegionError, OutOfPageBoundsError
from ghostink.pdf.raster import DEFAULT_DPI

FLAG_TINY_FONT = "tiny_font"
FLAG_LOW_CONTRAST = "low_contrast"
FLAG_LOW_VARIANCE = "low_variance"
FLAG_LOW_INK = "low_ink"
FLAG_OUT_OF_BOUNDS = "out_of_bounds"

ALL_FLAGS = (
    FLAG_TINY_FONT,
    FLAG_LOW_CONTRAST,
    FLAG_LOW_VARIANCE,
    FLAG_LOW_INK,
    FLAG_OUT_OF_BOUNDS,
)


@dataclass(frozen=True, slots=True)
class AnalyzerThresholds:
    """Decision constants for the Stage 1 analyzers.

    Values are strict upper bounds: an element is flagged when its
    measurement falls strictly below the threshold.
    """

    min_font_size_pt: float = 4.0
    color_distance: float = 15.0
    luma_std: float = 3.0
    ink_fraction: float = 0.015
    ink_tolerance: int = 8
    window_pad_pt: float = 4.0
    merge_gap_pt: float = 6.0

    def __post_init__(self) -> None:
        for name in (
            "min_font_size_pt", "color_distance", "luma_std",
            "ink_fraction", "window_pad_pt", "merge_gap_pt",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.ink_tolerance < 0:
            raise ValueError("ink_tolerance must be non-negative")


def color_distance(a: RgbColor, b: RgbColor) -> float:
    """Euclidean distance in RGB space."""
    return math.sqrt(
        (a.r - b.r) ** 2 + (a.g - b.g) ** 2 + (a.b - b.b) ** 2
    )


def luma_std(pixels: np.ndarray) -> float:
    """Population standard deviation of Rec. 601 luminance over a window."""
    flat = pixels.reshape(-1, 3).astype(np.float64)
    luma = flat @ np.array([0.299, 0.587, 0.114])
    return float(luma.std())


def ink_fraction(pixels: np.ndarray, background: RgbColor, tolerance: int) -> float:
    """Fraction of pixels that differ from the background by more than
    ``tolerance`` on any channel."""
    diff = np.abs(
        pixels.astype(np.int16)
        - np.array(background.as_tuple(), dtype=np.int16)
    )
    inked = (diff > tolerance).any(axis=-1)
    return float(inked.mean())


@dataclass(frozen=True, slots=True)
class ElementFlag:
    """One analyzer firing on one element, with its evidence."""

    element_id: str
    kind: str
    value: float
    threshold: float


@dataclass(frozen=True, slots=True)
class CandidateExcerpt:
    """A merged cluster of flagged elements handed to Stage 2."""

    excerpt_id: str
    document_id: str
    page_index: int
    bbox: tuple[float, float, float, float]
    element_ids: tuple[str, ...]
    text: str
    flags: tuple[str, ...]


@dataclass(slots=True)
class Stage1Result:
    document_id: str
    element_count: int
    flags: list[ElementFlag] = field(default_factory=list)
    excerpts: list[CandidateExcerpt] = field(default_factory=list)

    def flagged_element_ids(self) -> set[str]:
        return {flag.element_id for flag in self.flags}


def analyze_element(
    doc: DocumentHandle,
    element: TextElement,
    thresholds: AnalyzerThresholds = AnalyzerThresholds(),
    dpi: int = DEFAULT_DPI,
) -> list[ElementFlag]:
    """Run every analyzer against one element."""
    flags: list[ElementFlag] = []
    mx0, my0, mx1, my1 = doc.media_box(element.page_index)
    x0, y0, x1, y1 = element.bbox

    overlap_w = min(x1, mx1) - max(x0, mx0)
    overlap_h = min(y1, my1) - max(y0, my0)
    if overlap_w <= 0 or overlap_h <= 0:
        flags.append(ElementFlag(
            element.element_id, FLAG_OUT_OF_BOUNDS, 0.0, 0.0
        ))

    if element.font_size < thresholds.min_font_size_pt:
        flags.append(ElementFlag(
            element.element_id, FLAG_TINY_FONT,
            element.font_size, thresholds.min_font_size_pt,
        ))

    if overlap_w <= 0 or overlap_h <= 0:
        return flags  # no pixels to inspect

    pad = thresholds.window_pad_pt
    window = (x0 - pad, y0 - pad, x1 + pad, y1 + pad)
    try:
        background = sample_background_color(doc, element.page_index, element.bbox, dpi)
        pixels = doc.render_region(element.page_index, window, dpi)
    except (OutOfPageBoundsError, EmptyRegionError):
        return flags

    distance = color_distance(element.fill_color, background)
    if distance < thresholds.color_distance:
        flags.append(ElementFlag(
            element.element_id, FLAG_LOW_CONTRAST,
            distance, thresholds.color_distance,
        ))

    variance = luma_std(pixels)
    if variance < thresholds.luma_std:
        flags.append(ElementFlag(
            element.element_id, FLAG_LOW_VARIANCE,
            variance, thresholds.luma_std,
        ))

    ink = ink_fraction(pixels, background, thresholds.ink_tolerance)
    if ink < thresholds.ink_fraction:
        flags.append(ElementFlag(
            element.element_id, FLAG_LOW_INK,
            ink, thresholds.ink_fraction,
        ))

    return flags


def _rect_gap(a: tuple[float, ...], b: tuple[float, ...]) -> tuple[float, float]:
    dx = max(a[0] - b[2], b[0] - a[2], 0.0)
    dy = max(a[1] - b[3], b[1] - a[3], 0.0)
    return dx, dy


def merge_into_excerpts(
    document_id: str,
    flagged: list[TextElement],
    flags_by_element: dict[str, list[str]],
    merge_gap_pt: float = 6.0,
) -> list[CandidateExcerpt]:
    """Cluster flagged elements into verifier-sized excerpts.

    Elements on the same page whose boxes come within ``merge_gap_pt``
    of each other (both axes) join one excerpt; members keep
    content-stream order so the excerpt reads like the hidden text.
    """
    excerpts: list[CandidateExcerpt] = []
    for page_index in sorted({e.page_index for e in flagged}):
        members = [e for e in flagged if e.page_index == page_index]
        parent = list(range(len(members)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                dx, dy = _rect_gap(members[i].bbox, members[j].bbox)
                if dx <= merge_gap_pt and dy <= merge_gap_pt:
                    parent[find(i)] = find(j)

        clusters: dict[int, list[TextElement]] = {}
        for i, element in enumerate(members):
            clusters.setdefault(find(i), []).append(element)

        for cluster in sorted(
            clusters.values(),
            key=lambda group: min(int(e.element_id.split(".")[1]) for e in group),
        ):
            cluster.sort(key=lambda e: int(e.element_id.split(".")[1]))
            xs0, ys0, xs1, ys1 = zip(*(e.bbox for e in cluster))
            kinds: list[str] = []
            for element in cluster:
                for kind in flags_by_element.get(element.element_id, ()):
                    if kind not in kinds:
                        kinds.append(kind)
            excerpts.append(CandidateExcerpt(
                excerpt_id=f"{document_id}:x{len(excerpts)}",
                document_id=document_id,
                page_index=page_index,
                bbox=(min(xs0), min(ys0), max(xs1), max(ys1)),
                element_ids=tuple(e.element_id for e in cluster),
                text=" ".join(e.text for e in cluster),
                flags=tuple(kinds),
            ))
    return excerpts


def run_stage1(
    doc: DocumentHandle,
    thresholds: AnalyzerThresholds = AnalyzerThresholds(),
    dpi: int = DEFAULT_DPI,
) -> Stage1Result:
    """Screen a whole document and merge flagged elements into excerpts."""
    elements = extract_elements(doc)
    result = Stage1Result(doc.document_id, len(elements))
    flagged: list[TextElement] = []
    for element in elements:
        flags = analyze_element(doc, element, thresholds, dpi)
        if flags:
            result.flags.extend(flags)
            flagged.append(element)

    flags_by_element: dict[str, list[str]] = {}
    for flag in result.flags:
        flags_by_element.setdefault(flag.element_id, []).append(flag.kind)

    result.excerpts = merge_into_excerpts(
        doc.document_id, flagged, flags_by_element, thresholds.merge_gap_pt
    )
    return result
