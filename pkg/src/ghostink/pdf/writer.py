"""Deterministic PDF writer.

Builds simple text-and-rectangle documents: standard-14 fonts, WinAnsi
text, Flate-compressed content streams, optional content groups for
layered text. Output bytes depend only on the calls made, never on
time, environment, or dict ordering, so identical build scripts yield
byte-identical files.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

from ghostink.pdf import fonts as fontmod
from ghostink.pdf.objects import (
    PdfName,
    PdfRef,
    PdfStream,
    escape_string,
    format_number,
    serialize,
)


def _num(value: float) -> bytes:
    return format_number(float(value))


def _color_ops(color: tuple[int, int, int]) -> bytes:
    r, g, b = (max(0, min(255, int(c))) / 255.0 for c in color)
    return b" ".join((_num(r), _num(g), _num(b), b"rg"))


@dataclass(slots=True)
class Layer:
    """Handle for an optional content group."""

    name: str
    visible: bool
    index: int


@dataclass
class PageBuilder:
    width: float
    height: float
    _ops: list[bytes] = field(default_factory=list)
    _fonts: set[str] = field(default_factory=set)
    _layers: list[Layer] = field(default_factory=list)

    def fill_rect(
        self,
        x: float,
        y: float,
        w: float,
        h: float,
        color: tuple[int, int, int],
    ) -> None:
        self._ops.append(b" ".join((
            b"q", _color_ops(color),
            _num(x), _num(y), _num(w), _num(h), b"re", b"f", b"Q",
        )))

    def text(
        self,
        x: float,
        y: float,
        text: str,
        font: str = "Helvetica",
        size: float = 11.0,
        color: tuple[int, int, int] = (0, 0, 0),
        render_mode: int = 0,
        layer: Layer | None = None,
        op: str = "Tj",
        leading: float | None = None,
        word_spacing: float = 0.0,
        char_spacing: float = 0.0,
    ) -> None:
        """Emit one text-showing run at baseline (x, y).

        ``op`` picks the showing operator: plain ``Tj``, an array ``TJ``
        with the text as a single element, or the line operators ``'`` and
        ``\"`` (those first advance by the leading, so the pre-advance
        position is compensated to keep the baseline at ``y``).
        """
        if op not in ("Tj", "TJ", "'", '"'):
            raise ValueError(f"unsupported text operator {op!r}")
        self._fonts.add(font)
        lead = size * 1.2 if leading is None else leading
        # q/Q around the block keeps color and text state from leaking
        # into later runs; BT alone resets only the text matrices.
        parts = [b"q", b"BT", b"/%s %s Tf" % (
            self._font_token(font), _num(size)
        )]
        if color != (0, 0, 0):
            parts.append(_color_ops(color))
        if render_mode:
            parts.append(b"%d Tr" % render_mode)
        payload = escape_string(fontmod.encode_text(text))
        if op == "Tj":
            parts.append(b" ".join((_num(x), _num(y), b"Td")))
            parts.append(payload + b" Tj")
        elif op == "TJ":
            parts.append(b" ".join((_num(x), _num(y), b"Td")))
            parts.append(b"[" + payload + b"] TJ")
        elif op == "'":
            parts.append(_num(lead) + b" TL")
            parts.append(b" ".join((_num(x), _num(y + lead), b"Td")))
            parts.append(payload + b" '")
        else:  # '"'
            parts.append(_num(lead) + b" TL")
            parts.append(b" ".join((_num(x), _num(y + lead), b"Td")))
            parts.append(b" ".join((
                _num(word_spacing), _num(char_spacing), payload, b'"',
            )))
        parts.append(b"ET")
        parts.append(b"Q")
        body = b" ".join(parts)
        if layer is not None:
            if layer not in self._layers:
                self._layers.append(layer)
            body = b"/OC /oc%d BDC %s EMC" % (layer.index, body)
        self._ops.append(body)

    def raw_ops(self, ops: bytes, fonts: tuple[str, ...] = ()) -> None:
        """Append raw content-stream operators (testing escape hatch)."""
        self._fonts.update(fonts)
        self._ops.append(ops)

    def _font_token(self, font: str) -> bytes:
        # Resource names are assigned per base font at document build time;
        # a stable placeholder keyed by font name keeps pages independent.
        return b"f-" + font.encode("ascii")

    def content(self, font_tokens: dict[str, bytes]) -> bytes:
        stream = b"\n".join(self._ops)
        # Longest names first so "f-Helvetica" never clips "f-Helvetica-Bold".
        for font in sorted(font_tokens, key=len, reverse=True):
            stream = stream.replace(
                b"/f-" + font.encode("ascii"), b"/" + font_tokens[font]
            )
        return stream


class DocumentWriter:
    """Whole-document builder; render with :meth:`to_bytes`."""

    def __init__(self) -> None:
        self.pages: list[PageBuilder] = []
        self.layers: list[Layer] = []
        self.compress = True

    def add_page(self, width: float = 612.0, height: float = 792.0) -> PageBuilder:
        page = PageBuilder(width, height)
        self.pages.append(page)
        return page

    def define_layer(self, name: str, visible: bool) -> Layer:
        layer = Layer(name, visible, len(self.layers))
        self.layers.append(layer)
        return layer

    def to_bytes(self) -> bytes:
        fonts = sorted({f for page in self.pages for f in page._fonts})
        font_tokens = {
            font: b"F%d" % (idx + 1) for idx, font in enumerate(fonts)
        }
        n_pages = len(self.pages)
        catalog_num = 1
        pages_num = 2
        first_page = 3
        first_font = first_page + 2 * n_pages
        first_ocg = first_font + len(fonts)

        font_refs = {
            font: PdfRef(first_font + idx) for idx, font in enumerate(fonts)
        }
        ocg_refs = [PdfRef(first_ocg + layer.index) for layer in self.layers]

        objects: list[tuple[int, object]] = []

        catalog: dict = {
            PdfName("Type"): PdfName("Catalog"),
            PdfName("Pages"): PdfRef(pages_num),
        }
        if self.layers:
            off = [
                ocg_refs[layer.index] for layer in self.layers if not layer.visible
            ]
            catalog[PdfName("OCProperties")] = {
                PdfName("OCGs"): list(ocg_refs),
                PdfName("D"): {
                    PdfName("Order"): list(ocg_refs),
                    PdfName("OFF"): off,
                },
            }
        objects.append((catalog_num, catalog))

        objects.append((pages_num, {
            PdfName("Type"): PdfName("Pages"),
            PdfName("Kids"): [PdfRef(first_page + 2 * i) for i in range(n_pages)],
            PdfName("Count"): n_pages,
        }))

        font_resource = {
            PdfName(token.decode("ascii")): font_refs[font]
            for font, token in font_tokens.items()
        }
        for idx, page in enumerate(self.pages):
            page_num = first_page + 2 * idx
            content_num = page_num + 1
            resources: dict = {PdfName("Font"): dict(font_resource)}
            if page._layers:
                resources[PdfName("Properties")] = {
                    PdfName(f"oc{layer.index}"): ocg_refs[layer.index]
                    for layer in page._layers
                }
            objects.append((page_num, {
                PdfName("Type"): PdfName("Page"),
                PdfName("Parent"): PdfRef(pages_num),
                PdfName("MediaBox"): [0, 0, page.width, page.height],
                PdfName("Resources"): resources,
                PdfName("Contents"): PdfRef(content_num),
            }))
            raw = page.content(font_tokens)
            if self.compress:
                stream = PdfStream(
                    {PdfName("Filter"): PdfName("FlateDecode")},
                    zlib.compress(raw, 9),
                )
            else:
                stream = PdfStream({}, raw)
            objects.append((content_num, stream))

        for font in fonts:
            objects.append((font_refs[font].num, {
                PdfName("Type"): PdfName("Font"),
                PdfName("Subtype"): PdfName("Type1"),
                PdfName("BaseFont"): PdfName(font),
                PdfName("Encoding"): PdfName("WinAnsiEncoding"),
            }))

        for layer in self.layers:
            objects.append((ocg_refs[layer.index].num, {
                PdfName("Type"): PdfName("OCG"),
                PdfName("Name"): layer.name.encode("cp1252", "replace"),
            }))

        return self._emit(objects)

    @staticmethod
    def _emit(objects: list[tuple[int, object]]) -> bytes:
        out = bytearray(b"%PDF-1.4\n%\xe2\xe3\xcf\xd3\n")
        offsets: dict[int, int] = {}
        for num, obj in sorted(objects):
            offsets[num] = len(out)
            out += b"%d 0 obj\n" % num
            out += serialize(obj)
            out += b"\nendobj\n"
        size = max(offsets) + 1
        xref_pos = len(out)
        out += b"xref\n0 %d\n" % size
        out += b"0000000000 65535 f \n"
        for num in range(1, size):
            if num in offsets:
                out += b"%010d 00000 n \n" % offsets[num]
            else:
                out += b"0000000000 65535 f \n"
        trailer = {
            PdfName("Size"): size,
            PdfName("Root"): PdfRef(1),
        }
        out += b"trailer\n" + serialize(trailer)
        out += b"\nstartxref\n%d\n%%%%EOF\n" % xref_pos
        return bytes(out)
