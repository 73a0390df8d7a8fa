"""Document model: load, extract, rasterize, sample, and rewrite.

This is the layer every detector talks to. It owns the mapping between
parsed content-stream runs and stable element ids, caches page display
lists and full-page renders, and provides the one structural edit the
toolkit needs: removing a single text element while leaving every other
element's geometry, text, and id untouched.
"""

from __future__ import annotations

import hashlib
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ghostink.errors import (
    EmptyRegionError,
    OutOfPageBoundsError,
    RewriteError,
    UnknownElementError,
)
from ghostink.pdf.content import (
    TextRunItem,
    build_font_map,
    interpret_page,
    ocg_visibility,
)
from ghostink.pdf.objects import PdfName, PdfStream, format_number
from ghostink.pdf.raster import DEFAULT_DPI, PixelWindow, render_window, window_bounds
from ghostink.pdf.reader import PdfFile, decode_stream
from ghostink.pdf.writer import DocumentWriter

BBox = tuple[float, float, float, float]


@dataclass(frozen=True, slots=True)
class RgbColor:
    """sRGB color with 8-bit channels."""

    r: int
    g: int
    b: int

    def __post_init__(self) -> None:
        for channel in (self.r, self.g, self.b):
            if not 0 <= channel <= 255:
                raise ValueError(f"channel {channel} outside 0..255")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r, self.g, self.b)

    def luma(self) -> float:
        """Rec. 601 luminance, 0 (black) to 255 (white)."""
        return 0.299 * self.r + 0.587 * self.g + 0.114 * self.b


@dataclass(frozen=True, slots=True)
class TextElement:
    """One text-showing run as seen by the parser (visible or not)."""

    element_id: str
    page_index: int
    text: str
    bbox: BBox
    font_name: str
    font_size: float
    fill_color: RgbColor
    render_mode: int
    rotation_degrees: float
    layer_hidden: bool


@dataclass(eq=False, slots=True)
class PixelRegion:
    """Rendered pixels for a page region; ``pixels`` is (h, w, 3) uint8."""

    width_px: int
    height_px: int
    dpi: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.pixels.shape != (self.height_px, self.width_px, 3):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height_px}x{self.width_px}x3"
            )

    def pixel_at(self, x: int, y: int) -> RgbColor:
        r, g, b = self.pixels[y, x]
        return RgbColor(int(r), int(g), int(b))


@dataclass(slots=True)
class _PageModel:
    media_box: BBox
    content: bytes
    items: list
    runs: dict[int, TextRunItem] = field(default_factory=dict)


class DocumentHandle:
    """An opened document plus lazily built per-page caches."""

    def __init__(self, data: bytes, document_id: str, path: str | None = None):
        self.data = data
        self.document_id = document_id
        self.path = path
        self._pdf = PdfFile(data)
        self._page_dicts = self._pdf.pages()
        self._pages: dict[int, _PageModel] = {}
        self._elements: list[TextElement] | None = None
        self._renders: dict[tuple[int, int], PixelWindow] = {}

    @property
    def page_count(self) -> int:
        return len(self._page_dicts)

    # -- internals ---------------------------------------------------------

    def _page(self, page_index: int) -> _PageModel:
        if not 0 <= page_index < self.page_count:
            raise ValueError(
                f"page_index {page_index} outside 0..{self.page_count - 1}"
            )
        model = self._pages.get(page_index)
        if model is None:
            page_dict = self._page_dicts[page_index]
            content = self._pdf.page_content(page_dict)
            items = interpret_page(
                content,
                build_font_map(self._pdf, page_dict),
                ocg_visibility(self._pdf, page_dict),
            )
            model = _PageModel(
                self._pdf.page_media_box(page_dict), content, items
            )
            for item in items:
                if isinstance(item, TextRunItem):
                    model.runs[item.ordinal] = item
            self._pages[page_index] = model
        return model

    def media_box(self, page_index: int) -> BBox:
        return self._page(page_index).media_box

    def display_list(self, page_index: int) -> list:
        return self._page(page_index).items

    def page_render(self, page_index: int, dpi: int = DEFAULT_DPI) -> PixelWindow:
        """Cached full-page render."""
        key = (page_index, dpi)
        cached = self._renders.get(key)
        if cached is None:
            model = self._page(page_index)
            cached = render_window(model.items, model.media_box, None, dpi)
            self._renders[key] = cached
        return cached

    def render_region(
        self,
        page_index: int,
        rect: BBox,
        dpi: int = DEFAULT_DPI,
        skip_ordinals: frozenset[int] = frozenset(),
    ) -> np.ndarray:
        """Pixels for a grid-aligned window. Full-content requests crop the
        cached page render; skip renders rebuild just the window."""
        model = self._page(page_index)
        col0, row0, col1, row1 = window_bounds(model.media_box, rect, dpi)
        if not skip_ordinals:
            page = self.page_render(page_index, dpi)
            return page.buffer[row0:row1, col0:col1]
        window = render_window(model.items, model.media_box, rect, dpi, skip_ordinals)
        return window.buffer

    def run_for(self, element_id: str) -> tuple[int, TextRunItem]:
        try:
            page_part, ordinal_part = element_id.split(".", 1)
            page_index = int(page_part.lstrip("p"))
            ordinal = int(ordinal_part)
        except (ValueError, AttributeError):
            raise UnknownElementError(f"malformed element id {element_id!r}") from None
        if not 0 <= page_index < self.page_count:
            raise UnknownElementError(f"no page for element id {element_id!r}")
        run = self._page(page_index).runs.get(ordinal)
        if run is None or not run.text:
            raise UnknownElementError(f"no element {element_id!r}")
        return page_index, run


def load_document(
    source: str | Path | bytes, document_id: str | None = None
) -> DocumentHandle:
    """Open a document from a path or raw bytes.

    Raises :class:`~ghostink.errors.ParseError` for non-PDF input and
    :class:`~ghostink.errors.EncryptedDocumentError` for encrypted files.
    """
    if isinstance(source, bytes):
        data = source
        path = None
        default_id = hashlib.sha256(data).hexdigest()[:12]
    else:
        path = str(source)
        data = Path(source).read_bytes()
        default_id = Path(source).stem
    return DocumentHandle(data, document_id or default_id, path)


def extract_elements(doc: DocumentHandle) -> list[TextElement]:
    """Every text-showing run, in content-stream order, page by page.

    Includes runs that are visually absent (render mode 3, hidden layers,
    off-page positions); the parser's view is deliberately blind to
    visibility.
    """
    if doc._elements is None:
        out: list[TextElement] = []
        for page_index in range(doc.page_count):
            model = doc._page(page_index)
            for item in model.items:
                if not isinstance(item, TextRunItem) or not item.text:
                    continue
                r, g, b = item.fill
                out.append(TextElement(
                    element_id=f"p{page_index}.{item.ordinal}",
                    page_index=page_index,
                    text=item.text,
                    bbox=item.bbox,
                    font_name=item.font_name,
                    font_size=item.font_size,
                    fill_color=RgbColor(r, g, b),
                    render_mode=item.render_mode,
                    rotation_degrees=item.rotation,
                    layer_hidden=item.hidden_by_ocg,
                ))
        doc._elements = out
    return list(doc._elements)


def rasterize_region(
    doc: DocumentHandle,
    page_index: int,
    bbox: BBox,
    dpi: int = DEFAULT_DPI,
) -> PixelRegion:
    """Render a page region. The region is clipped to the page; a region
    with no page overlap raises :class:`OutOfPageBoundsError`."""
    model = doc._page(page_index)
    mx0, my0, mx1, my1 = model.media_box
    x0, x1 = sorted((bbox[0], bbox[2]))
    y0, y1 = sorted((bbox[1], bbox[3]))
    if x1 < mx0 or x0 > mx1 or y1 < my0 or y0 > my1:
        raise OutOfPageBoundsError(
            f"region {bbox} lies outside page {page_index} media box"
        )
    pixels = doc.render_region(page_index, (x0, y0, x1, y1), dpi)
    return PixelRegion(
        width_px=pixels.shape[1],
        height_px=pixels.shape[0],
        dpi=dpi,
        pixels=pixels.copy(),
    )


def sample_background_color(
    doc: DocumentHandle,
    page_index: int,
    bbox: BBox,
    dpi: int = DEFAULT_DPI,
    ring: float = 6.0,
) -> RgbColor:
    """Median color of the ring around ``bbox``, the local page background.

    The median makes the sample robust to stray ink crossing the ring;
    when the ring has no pixels (region covers the page) the whole window
    is used instead.
    """
    model = doc._page(page_index)
    x0, x1 = sorted((bbox[0], bbox[2]))
    y0, y1 = sorted((bbox[1], bbox[3]))
    outer = (x0 - ring, y0 - ring, x1 + ring, y1 + ring)
    mx0, my0, mx1, my1 = model.media_box
    if outer[2] < mx0 or outer[0] > mx1 or outer[3] < my0 or outer[1] > my1:
        raise OutOfPageBoundsError(
            f"region {bbox} and its ring lie outside page {page_index}"
        )
    pixels = doc.render_region(page_index, outer, dpi)
    o_col0, o_row0, _, _ = window_bounds(model.media_box, outer, dpi)
    mask = np.ones(pixels.shape[:2], dtype=bool)
    try:
        i_col0, i_row0, i_col1, i_row1 = window_bounds(
            model.media_box, (x0, y0, x1, y1), dpi
        )
        mask[
            max(0, i_row0 - o_row0):max(0, i_row1 - o_row0),
            max(0, i_col0 - o_col0):max(0, i_col1 - o_col0),
        ] = False
    except EmptyRegionError:
        pass
    ring_pixels = pixels[mask]
    if ring_pixels.size == 0:
        ring_pixels = pixels.reshape(-1, 3)
    med = np.median(ring_pixels.reshape(-1, 3), axis=0)
    return RgbColor(int(round(med[0])), int(round(med[1])), int(round(med[2])))


def remove_element(doc: DocumentHandle, element_id: str) -> DocumentHandle:
    """Produce a new document without the given element.

    The show op is replaced by a no-op ``TJ`` carrying the same pen
    advance (plus any line-move or spacing side effects the original
    operator had), so every other element keeps its id, text, and
    geometry bit for bit.
    """
    page_index, run = doc.run_for(element_id)
    model = doc._page(page_index)
    start, end = run.span
    replacement = _null_show_op(run)
    new_content = model.content[:start] + replacement + model.content[end:]
    # Rewrite against a fresh parse so the source handle's object graph
    # is never mutated.
    data = _rewrite_page_content(PdfFile(doc.data), page_index, new_content)
    return DocumentHandle(data, doc.document_id, None)


def _null_show_op(run: TextRunItem) -> bytes:
    adj = format_number(round(run.tj_advance, 4))
    show = b"[" + adj + b"] TJ" if run.tj_advance else b"[] TJ"
    if run.op == "'":
        return b"T* " + show
    if run.op == '"':
        return b"%s Tw %s Tc T* %s" % (
            format_number(round(run.word_spacing, 4)),
            format_number(round(run.char_spacing, 4)),
            show,
        )
    return show


def _rewrite_page_content(pdf: PdfFile, page_index: int, content: bytes) -> bytes:
    """Re-emit the document with one page's content stream swapped out."""
    page_dict = pdf.pages()[page_index]
    contents_ref = page_dict.get(PdfName("Contents"))
    target = pdf.resolve(contents_ref)
    if isinstance(target, list):
        # Multi-part content: fold into the first stream, blank the rest.
        refs = [pdf.resolve(r) for r in target]
        streams = [s for s in refs if isinstance(s, PdfStream)]
        if not streams:
            raise RewriteError("page has no content stream to rewrite")
        _set_stream(streams[0], content)
        for stream in streams[1:]:
            _set_stream(stream, b"")
    elif isinstance(target, PdfStream):
        _set_stream(target, content)
    else:
        raise RewriteError("page has no content stream to rewrite")
    objects = sorted(pdf.objects.items())
    flattened = [(num, obj) for (num, _gen), obj in objects]
    return DocumentWriter._emit(flattened)


def _set_stream(stream: PdfStream, content: bytes) -> None:
    filters = stream.dictionary.get(PdfName("Filter"))
    if filters == PdfName("FlateDecode") or (
        isinstance(filters, list) and PdfName("FlateDecode") in filters
    ):
        stream.dictionary[PdfName("Filter")] = PdfName("FlateDecode")
        stream.raw = zlib.compress(content, 9)
    else:
        stream.dictionary.pop(PdfName("Filter"), None)
        stream.raw = content
    stream.dictionary[PdfName("Length")] = len(stream.raw)
