"""Display-list rasterizer.

Paints a page's display list into a white-background RGB buffer at a
fixed dots-per-inch scale. Glyphs are painted as deterministic bar
patterns covering roughly a third of each glyph cell rather than real
outlines; every visual analyzer in this toolkit measures aggregate
pixel statistics (ink fraction, variance, color distance, diff counts),
for which a stable ink pattern with faithful geometry and color is what
matters, not typographic shape.

Two properties the analyzers rely on:

* window renders are aligned to the full-page pixel grid, so rendering
  a sub-window equals cropping a full-page render, pixel for pixel;
* glyph cells shorter than ``MIN_GLYPH_PX`` device pixels deposit no
  ink at all, mirroring how sub-pixel type disappears at screen and
  screenshot resolutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ghostink.errors import EmptyRegionError
from ghostink.pdf.content import RectItem, TextRunItem

DEFAULT_DPI = 150
MIN_GLYPH_PX = 5
WHITE = 255

# Render modes that deposit no ink: 3 = invisible, 7 = clip-only.
_INKLESS_MODES = frozenset({3, 7})


@dataclass(frozen=True, slots=True)
class PixelWindow:
    """A grid-aligned raster window over a page.

    ``col0/row0`` locate the window on the full-page pixel grid (row 0 is
    the top of the page); ``buffer`` is (rows, cols, 3) uint8.
    """

    col0: int
    row0: int
    buffer: np.ndarray

    @property
    def width(self) -> int:
        return self.buffer.shape[1]

    @property
    def height(self) -> int:
        return self.buffer.shape[0]


def page_grid(media_box: tuple[float, float, float, float], dpi: int) -> tuple[int, int]:
    """Full-page raster dimensions (cols, rows) at ``dpi``."""
    mx0, my0, mx1, my1 = media_box
    scale = dpi / 72.0
    return (
        max(1, math.ceil((mx1 - mx0) * scale - 1e-6)),
        max(1, math.ceil((my1 - my0) * scale - 1e-6)),
    )


def window_bounds(
    media_box: tuple[float, float, float, float],
    rect: tuple[float, float, float, float],
    dpi: int,
) -> tuple[int, int, int, int]:
    """Clamp a page-space rect to integer grid bounds (col0, row0, col1, row1).

    Raises :class:`EmptyRegionError` when the clamped window is empty.
    """
    mx0, my0, mx1, my1 = media_box
    cols, rows = page_grid(media_box, dpi)
    scale = dpi / 72.0
    x0, y0, x1, y1 = rect
    col0 = max(0, math.floor((min(x0, x1) - mx0) * scale))
    col1 = min(cols, math.ceil((max(x0, x1) - mx0) * scale))
    row0 = max(0, math.floor((my1 - max(y0, y1)) * scale))
    row1 = min(rows, math.ceil((my1 - min(y0, y1)) * scale))
    if col1 <= col0 or row1 <= row0:
        raise EmptyRegionError(
            f"window {rect} is empty on a {cols}x{rows}px page"
        )
    return col0, row0, col1, row1


def render_window(
    items: list[TextRunItem | RectItem],
    media_box: tuple[float, float, float, float],
    rect: tuple[float, float, float, float] | None = None,
    dpi: int = DEFAULT_DPI,
    skip_ordinals: frozenset[int] = frozenset(),
) -> PixelWindow:
    """Render the display list into the window covering ``rect`` (full page
    when None). ``skip_ordinals`` suppresses specific text runs, which is
    how with/without-element comparisons are produced."""
    mx0, my0, mx1, my1 = media_box
    if rect is None:
        rect = media_box
    col0, row0, col1, row1 = window_bounds(media_box, rect, dpi)
    buffer = np.full((row1 - row0, col1 - col0, 3), WHITE, dtype=np.uint8)
    window = PixelWindow(col0, row0, buffer)
    scale = dpi / 72.0

    def to_cols(x: float) -> float:
        return (x - mx0) * scale

    def to_rows(y: float) -> float:
        return (my1 - y) * scale

    def paint_box(x0: float, y0: float, x1: float, y1: float, color) -> None:
        c0 = int(round(to_cols(x0))) - col0
        c1 = int(round(to_cols(x1))) - col0
        r0 = int(round(to_rows(y1))) - row0
        r1 = int(round(to_rows(y0))) - row0
        c0, c1 = max(0, c0), min(buffer.shape[1], c1)
        r0, r1 = max(0, r0), min(buffer.shape[0], r1)
        if c1 > c0 and r1 > r0:
            buffer[r0:r1, c0:c1] = color

    # Window extent in page space, slightly inflated, for fast rejection.
    wx0 = mx0 + col0 / scale - 1.0
    wx1 = mx0 + col1 / scale + 1.0
    wy0 = my1 - row1 / scale - 1.0
    wy1 = my1 - row0 / scale + 1.0

    for item in items:
        if isinstance(item, RectItem):
            xs = [pt[0] for pt in item.quad]
            ys = [pt[1] for pt in item.quad]
            paint_box(min(xs), min(ys), max(xs), max(ys), item.fill)
            continue
        if item.render_mode in _INKLESS_MODES or item.hidden_by_ocg:
            continue
        if item.ordinal in skip_ordinals:
            continue
        bx0, by0, bx1, by1 = item.bbox
        if bx1 < wx0 or bx0 > wx1 or by1 < wy0 or by0 > wy1:
            continue
        for glyph in item.glyphs:
            if glyph.char.isspace():
                continue
            xs = [pt[0] for pt in glyph.quad]
            ys = [pt[1] for pt in glyph.quad]
            gx0, gx1 = min(xs), max(xs)
            gy0, gy1 = min(ys), max(ys)
            if (gy1 - gy0) * scale < MIN_GLYPH_PX:
                continue
            if (gx1 - gx0) * scale < 1.0:
                continue
            for bar in _glyph_bars(glyph.char, gx0, gy0, gx1, gy1):
                paint_box(*bar, item.fill)
    return window


def _glyph_bars(
    char: str, x0: float, y0: float, x1: float, y1: float
) -> list[tuple[float, float, float, float]]:
    """Deterministic pseudo-glyph: a stem, a foot, and for roughly half
    the alphabet a crossbar. Position varies with the character so text
    does not collapse into a uniform block."""
    w = x1 - x0
    h = y1 - y0
    seed = (ord(char[0]) * 2654435761) & 0xFFFFFFFF
    stem_w = max(w * 0.18, 0.1)
    stem_left = x0 + w * (0.10 + 0.15 * ((seed >> 4) & 3) / 3.0)
    foot_h = max(h * 0.16, 0.1)
    bars = [
        (stem_left, y0 + h * 0.10, min(stem_left + stem_w, x1), y1 - h * 0.08),
        (x0 + w * 0.08, y0 + h * 0.08, x1 - w * 0.08, y0 + h * 0.08 + foot_h),
    ]
    if seed & 1:
        mid = y0 + h * (0.45 + 0.15 * ((seed >> 8) & 1))
        bars.append((x0 + w * 0.12, mid, x1 - w * 0.12, mid + max(h * 0.12, 0.1)))
    return bars
