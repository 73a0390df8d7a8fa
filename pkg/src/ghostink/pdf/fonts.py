"""Font metrics and text decoding for simple (single-byte) fonts.

Width and vertical metrics for the fourteen standard Type 1 fonts come
from reportlab's bundled AFM data. Documents that carry an explicit
/Widths array get those widths instead. Text bytes are decoded as
WinAnsi (cp1252), the encoding the writer emits.
"""

from __future__ import annotations

from functools import lru_cache

from reportlab.pdfbase import pdfmetrics

STANDARD_14 = {
    "Courier", "Courier-Bold", "Courier-Oblique", "Courier-BoldOblique",
    "Helvetica", "Helvetica-Bold", "Helvetica-Oblique", "Helvetica-BoldOblique",
    "Times-Roman", "Times-Bold", "Times-Italic", "Times-BoldItalic",
    "Symbol", "ZapfDingbats",
}

_FALLBACK_WIDTH = 500.0  # thousandths of an em, used for unknown fonts
_FALLBACK_ASCENT = 718.0
_FALLBACK_DESCENT = -207.0


def normalize_base_font(name: str) -> str:
    """Strip a subset prefix like ``ABCDEF+`` and map common aliases."""
    if len(name) > 7 and name[6] == "+" and name[:6].isalpha() and name[:6].isupper():
        name = name[7:]
    aliases = {
        "Arial": "Helvetica",
        "Arial-Bold": "Helvetica-Bold",
        "Arial,Bold": "Helvetica-Bold",
        "ArialMT": "Helvetica",
        "Arial-BoldMT": "Helvetica-Bold",
        "TimesNewRoman": "Times-Roman",
        "TimesNewRomanPSMT": "Times-Roman",
        "CourierNew": "Courier",
    }
    return aliases.get(name, name)


@lru_cache(maxsize=64)
def _char_widths(base_font: str) -> dict[str, float]:
    if base_font not in STANDARD_14:
        return {}
    font = pdfmetrics.getFont(base_font)
    widths: dict[str, float] = {}
    for code in range(32, 256):
        char = bytes([code]).decode("cp1252", errors="ignore")
        if char:
            widths[char] = font.stringWidth(char, 1000.0)
    return widths


def char_width(base_font: str, char: str) -> float:
    """Glyph advance in thousandths of an em."""
    widths = _char_widths(normalize_base_font(base_font))
    if not widths:
        return _FALLBACK_WIDTH
    return widths.get(char, widths.get(" ", _FALLBACK_WIDTH))


def string_width(base_font: str, text: str, size: float) -> float:
    """Advance of ``text`` in points at ``size``, no kerning or spacing."""
    return sum(char_width(base_font, c) for c in text) * size / 1000.0


def vertical_metrics(base_font: str) -> tuple[float, float]:
    """(ascent, descent) in thousandths of an em; descent is negative."""
    name = normalize_base_font(base_font)
    if name not in STANDARD_14:
        return (_FALLBACK_ASCENT, _FALLBACK_DESCENT)
    face = pdfmetrics.getFont(name).face
    ascent = float(face.ascent or _FALLBACK_ASCENT)
    descent = float(face.descent or _FALLBACK_DESCENT)
    if descent > 0:
        descent = -descent
    return (ascent, descent)


def decode_text(raw: bytes) -> str:
    """WinAnsi decode; undecodable bytes become U+FFFD rather than raising."""
    return raw.decode("cp1252", errors="replace")


def encode_text(text: str) -> bytes:
    """WinAnsi encode; unencodable characters degrade to ``?``."""
    return text.encode("cp1252", errors="replace")
