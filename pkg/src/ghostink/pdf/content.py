"""Content stream interpreter.

Walks a page's operator stream with full graphics-state tracking and
produces a display list: one item per text-showing op (with per-glyph
page-space quads) and one per filled rectangle. Extraction, background
sampling, and rasterization all consume this single geometry model, so
what the parser reports and what the renderer paints cannot drift apart.

Coordinates everywhere are page space (points, origin bottom-left).
Matrices are six-tuples ``(a, b, c, d, e, f)`` mapping
``(x, y) -> (a*x + c*y + e, b*x + d*y + f)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from ghostink.pdf import fonts as fontmod
from ghostink.pdf.objects import PdfName
from ghostink.pdf.reader import _Lexer, PdfFile

Matrix = tuple[float, float, float, float, float, float]
IDENTITY: Matrix = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

_NUMBER = re.compile(rb"^[+-]?(?:\d+\.?\d*|\.\d+)$")
_SHOW_OPS = ("Tj", "TJ", "'", '"')


def mat_mul(m1: Matrix, m2: Matrix) -> Matrix:
    """Compose transforms: apply ``m1`` first, then ``m2``."""
    a1, b1, c1, d1, e1, f1 = m1
    a2, b2, c2, d2, e2, f2 = m2
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
        e1 * a2 + f1 * c2 + e2,
        e1 * b2 + f1 * d2 + f2,
    )


def mat_apply(m: Matrix, x: float, y: float) -> tuple[float, float]:
    a, b, c, d, e, f = m
    return (a * x + c * y + e, b * x + d * y + f)


@dataclass(slots=True)
class ContentOp:
    operator: str
    operands: list
    start: int
    end: int


def tokenize_content(data: bytes) -> list[ContentOp]:
    """Assemble operator calls with operand lists and byte spans. The span
    covers the first operand through the operator keyword, which is exactly
    the slice a rewrite must replace to drop the op."""
    lex = _Lexer(data)
    ops: list[ContentOp] = []
    operands: list = []
    span_start: int | None = None
    n = len(data)
    while True:
        lex.skip_space()
        if lex.pos >= n:
            break
        pos = lex.pos
        byte = data[pos]
        if byte in b"/(<[":
            if span_start is None:
                span_start = pos
            operands.append(lex.parse_object())
            continue
        if byte in b")>]}{":
            lex.pos += 1  # stray delimiter; skip defensively
            continue
        token = lex.read_token()
        if _NUMBER.match(token):
            if span_start is None:
                span_start = pos
            text = token.decode("ascii")
            operands.append(float(text) if b"." in token else int(text))
            continue
        if token in (b"true", b"false", b"null"):
            if span_start is None:
                span_start = pos
            operands.append(token == b"true")
            continue
        operator = token.decode("latin-1")
        if operator == "BI":
            end = data.find(b"EI", lex.pos)
            lex.pos = n if end < 0 else end + 2
            operands = []
            span_start = None
            continue
        ops.append(ContentOp(
            operator,
            operands,
            pos if span_start is None else span_start,
            lex.pos,
        ))
        operands = []
        span_start = None
    return ops


@dataclass(slots=True)
class FontInfo:
    """What the interpreter needs from a /Font resource."""

    resource_name: str
    base_font: str
    widths: dict[int, float] | None = None  # char code -> 1/1000 em
    ascent: float = 718.0
    descent: float = -207.0

    def advance(self, code: int, char: str) -> float:
        if self.widths is not None and code in self.widths:
            return self.widths[code]
        return fontmod.char_width(self.base_font, char)


def build_font_map(pdf: PdfFile, page: dict) -> dict[str, FontInfo]:
    resources = pdf.get(page, "Resources") or {}
    font_dicts = pdf.resolve(resources.get(PdfName("Font"))) if isinstance(resources, dict) else None
    out: dict[str, FontInfo] = {}
    if not isinstance(font_dicts, dict):
        return out
    for name, ref in font_dicts.items():
        font = pdf.resolve(ref)
        if not isinstance(font, dict):
            continue
        base = pdf.get(font, "BaseFont")
        base_name = fontmod.normalize_base_font(str(base)) if base else "Helvetica"
        ascent, descent = fontmod.vertical_metrics(base_name)
        widths = None
        width_array = pdf.get(font, "Widths")
        first_char = pdf.get(font, "FirstChar")
        if isinstance(width_array, list) and isinstance(first_char, int):
            widths = {}
            for idx, w in enumerate(width_array):
                w = pdf.resolve(w)
                if isinstance(w, (int, float)):
                    widths[first_char + idx] = float(w)
        out[str(name)] = FontInfo(str(name), base_name, widths, ascent, descent)
    return out


def ocg_visibility(pdf: PdfFile, page: dict) -> dict[str, bool]:
    """Map page /Properties resource names to True when that optional
    content group is switched off by the document default configuration."""
    hidden = pdf.hidden_ocgs()
    resources = pdf.get(page, "Resources")
    if not isinstance(resources, dict):
        return {}
    props = pdf.resolve(resources.get(PdfName("Properties")))
    if not isinstance(props, dict):
        return {}
    out: dict[str, bool] = {}
    for name, ref in props.items():
        key = (ref.num, ref.gen) if hasattr(ref, "num") else None
        out[str(name)] = key in hidden
    return out


@dataclass(slots=True)
class GlyphBox:
    char: str
    quad: tuple[tuple[float, float], ...]  # four page-space corners


@dataclass(slots=True)
class TextRunItem:
    ordinal: int
    text: str
    glyphs: list[GlyphBox]
    bbox: tuple[float, float, float, float]
    font_name: str
    font_size: float
    fill: tuple[int, int, int]
    render_mode: int
    rotation: float
    hidden_by_ocg: bool
    span: tuple[int, int]
    op: str
    # Rewrite support: a TJ adjustment reproducing this run's pen advance,
    # and the spacing values a '"' operator installed.
    tj_advance: float = 0.0
    word_spacing: float = 0.0
    char_spacing: float = 0.0


@dataclass(slots=True)
class RectItem:
    quad: tuple[tuple[float, float], ...]
    fill: tuple[int, int, int]


@dataclass(slots=True)
class _State:
    ctm: Matrix = IDENTITY
    fill: tuple[float, float, float] = (0.0, 0.0, 0.0)
    font: FontInfo | None = None
    size: float = 0.0
    char_spacing: float = 0.0
    word_spacing: float = 0.0
    hscale: float = 1.0
    leading: float = 0.0
    rise: float = 0.0
    render_mode: int = 0

    def clone(self) -> "_State":
        return _State(
            self.ctm, self.fill, self.font, self.size, self.char_spacing,
            self.word_spacing, self.hscale, self.leading, self.rise,
            self.render_mode,
        )


def _rgb_bytes(fill: tuple[float, float, float]) -> tuple[int, int, int]:
    return tuple(
        max(0, min(255, round(channel * 255.0))) for channel in fill
    )  # type: ignore[return-value]


def _cmyk_to_rgb(c: float, m: float, y: float, k: float) -> tuple[float, float, float]:
    return ((1 - c) * (1 - k), (1 - m) * (1 - k), (1 - y) * (1 - k))


_DEFAULT_FONT = FontInfo("", "Helvetica")


def interpret_page(
    content: bytes,
    font_map: dict[str, FontInfo],
    ocg_hidden: dict[str, bool],
) -> list[TextRunItem | RectItem]:
    """Run the operator stream and return the page display list."""
    items: list[TextRunItem | RectItem] = []
    state = _State()
    stack: list[_State] = []
    tm: Matrix = IDENTITY
    tlm: Matrix = IDENTITY
    path_rects: list[tuple[float, float, float, float]] = []
    mc_stack: list[bool] = []  # True entries mark hidden-OCG sections
    show_ordinal = 0

    def hidden_now() -> bool:
        return any(mc_stack)

    def number(value, default: float = 0.0) -> float:
        return float(value) if isinstance(value, (int, float)) else default

    def flush_path(fill_it: bool) -> None:
        nonlocal path_rects
        if fill_it:
            for x, y, w, h in path_rects:
                corners = (
                    mat_apply(state.ctm, x, y),
                    mat_apply(state.ctm, x + w, y),
                    mat_apply(state.ctm, x + w, y + h),
                    mat_apply(state.ctm, x, y + h),
                )
                items.append(RectItem(corners, _rgb_bytes(state.fill)))
        path_rects = []

    def show_text(op: ContentOp, pieces: list) -> None:
        nonlocal tm, show_ordinal
        font = state.font or _DEFAULT_FONT
        size = state.size
        trm = mat_mul(tm, state.ctm)
        chars: list[str] = []
        glyphs: list[GlyphBox] = []
        pen = 0.0
        asc = font.ascent / 1000.0 * size + state.rise
        desc = font.descent / 1000.0 * size + state.rise
        for piece in pieces:
            if isinstance(piece, (int, float)):
                pen -= piece / 1000.0 * size * state.hscale
                continue
            if not isinstance(piece, bytes):
                continue
            for code in piece:
                char = bytes([code]).decode("cp1252", errors="replace")
                chars.append(char)
                w0 = font.advance(code, char) / 1000.0 * size
                x0, x1 = pen, pen + w0 * state.hscale
                glyphs.append(GlyphBox(char, (
                    mat_apply(trm, x0, desc),
                    mat_apply(trm, x1, desc),
                    mat_apply(trm, x1, asc),
                    mat_apply(trm, x0, asc),
                )))
                pen += (
                    w0 + state.char_spacing
                    + (state.word_spacing if code == 0x20 else 0.0)
                ) * state.hscale
        # Advance the text matrix past the run.
        tm = mat_mul((1.0, 0.0, 0.0, 1.0, pen, 0.0), tm)
        text = "".join(chars)
        if not text:
            show_ordinal += 1
            return
        xs = [pt[0] for g in glyphs for pt in g.quad]
        ys = [pt[1] for g in glyphs for pt in g.quad]
        a, b, c, d, _, _ = trm
        denom = size * state.hscale
        items.append(TextRunItem(
            ordinal=show_ordinal,
            text=text,
            glyphs=glyphs,
            bbox=(min(xs), min(ys), max(xs), max(ys)),
            font_name=font.base_font,
            font_size=size * math.hypot(c, d),
            fill=_rgb_bytes(state.fill),
            render_mode=state.render_mode,
            rotation=math.degrees(math.atan2(b, a)),
            hidden_by_ocg=hidden_now(),
            span=(op.start, op.end),
            op=op.operator,
            tj_advance=(-pen * 1000.0 / denom) if denom else 0.0,
            word_spacing=state.word_spacing,
            char_spacing=state.char_spacing,
        ))
        show_ordinal += 1

    for op in tokenize_content(content):
        name = op.operator
        args = op.operands
        if name == "q":
            stack.append(state.clone())
        elif name == "Q":
            if stack:
                state = stack.pop()
        elif name == "cm" and len(args) >= 6:
            m = tuple(number(v) for v in args[:6])
            state.ctm = mat_mul(m, state.ctm)  # type: ignore[arg-type]
        elif name == "rg" and len(args) >= 3:
            state.fill = (number(args[0]), number(args[1]), number(args[2]))
        elif name == "g" and args:
            v = number(args[0])
            state.fill = (v, v, v)
        elif name == "k" and len(args) >= 4:
            state.fill = _cmyk_to_rgb(*(number(v) for v in args[:4]))
        elif name in ("sc", "scn"):
            numeric = [number(v) for v in args if isinstance(v, (int, float))]
            if len(numeric) == 1:
                state.fill = (numeric[0],) * 3
            elif len(numeric) == 3:
                state.fill = tuple(numeric)  # type: ignore[assignment]
            elif len(numeric) == 4:
                state.fill = _cmyk_to_rgb(*numeric)
        elif name == "re" and len(args) >= 4:
            path_rects.append(tuple(number(v) for v in args[:4]))  # type: ignore[arg-type]
        elif name in ("f", "F", "f*", "b", "b*", "B", "B*"):
            flush_path(True)
        elif name in ("n", "S", "s"):
            flush_path(False)
        elif name == "BT":
            tm = tlm = IDENTITY
        elif name == "ET":
            pass
        elif name == "Tf" and len(args) >= 2:
            font_name = str(args[0]) if isinstance(args[0], PdfName) else ""
            state.font = font_map.get(font_name, _DEFAULT_FONT)
            state.size = number(args[1])
        elif name == "Td" and len(args) >= 2:
            tlm = mat_mul((1.0, 0.0, 0.0, 1.0, number(args[0]), number(args[1])), tlm)
            tm = tlm
        elif name == "TD" and len(args) >= 2:
            state.leading = -number(args[1])
            tlm = mat_mul((1.0, 0.0, 0.0, 1.0, number(args[0]), number(args[1])), tlm)
            tm = tlm
        elif name == "Tm" and len(args) >= 6:
            tlm = tm = tuple(number(v) for v in args[:6])  # type: ignore[assignment]
        elif name == "T*":
            tlm = mat_mul((1.0, 0.0, 0.0, 1.0, 0.0, -state.leading), tlm)
            tm = tlm
        elif name == "TL" and args:
            state.leading = number(args[0])
        elif name == "Tc" and args:
            state.char_spacing = number(args[0])
        elif name == "Tw" and args:
            state.word_spacing = number(args[0])
        elif name == "Tz" and args:
            state.hscale = number(args[0], 100.0) / 100.0
        elif name == "Ts" and args:
            state.rise = number(args[0])
        elif name == "Tr" and args:
            state.render_mode = int(number(args[0]))
        elif name == "Tj" and args:
            show_text(op, [args[-1]])
        elif name == "TJ" and args and isinstance(args[-1], list):
            show_text(op, args[-1])
        elif name == "'" and args:
            tlm = mat_mul((1.0, 0.0, 0.0, 1.0, 0.0, -state.leading), tlm)
            tm = tlm
            show_text(op, [args[-1]])
        elif name == '"' and len(args) >= 3:
            state.word_spacing = number(args[0])
            state.char_spacing = number(args[1])
            tlm = mat_mul((1.0, 0.0, 0.0, 1.0, 0.0, -state.leading), tlm)
            tm = tlm
            show_text(op, [args[2]])
        elif name == "BDC" and len(args) >= 2:
            is_oc = args[0] == PdfName("OC")
            tag = str(args[1]) if isinstance(args[1], PdfName) else ""
            mc_stack.append(bool(is_oc and ocg_hidden.get(tag, False)))
        elif name == "BMC":
            mc_stack.append(False)
        elif name == "EMC":
            if mc_stack:
                mc_stack.pop()
        # Unknown operators are ignored; the grammar keeps us aligned.
    return items
