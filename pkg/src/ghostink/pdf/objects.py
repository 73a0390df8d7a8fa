"""PDF object model and serializer.

Python natives stand in for most PDF types: bool, int, float, bytes
(strings), list (arrays), dict (dictionaries keyed by :class:`PdfName`),
and None (null). Names, indirect references, and streams get their own
small types. :func:`serialize` writes any of these back out in a stable,
whitespace-normalized form so that identical object graphs always produce
identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass


class PdfName(str):
    """A PDF name token. Subclasses str; the value excludes the slash."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"PdfName({str.__repr__(self)})"


@dataclass(frozen=True, slots=True)
class PdfRef:
    """Indirect reference ``num gen R``."""

    num: int
    gen: int = 0


class PdfStream:
    """A stream object: dictionary plus raw (possibly encoded) data."""

    __slots__ = ("dictionary", "raw")

    def __init__(self, dictionary: dict, raw: bytes):
        self.dictionary = dictionary
        self.raw = raw

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"PdfStream(dict={self.dictionary!r}, raw={len(self.raw)} bytes)"


_NAME_PLAIN = set(
    b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_.+*'"
)

_STRING_ESCAPES = {
    0x0A: b"\\n",
    0x0D: b"\\r",
    0x09: b"\\t",
    0x08: b"\\b",
    0x0C: b"\\f",
    0x28: b"\\(",
    0x29: b"\\)",
    0x5C: b"\\\\",
}


def format_number(value: float | int) -> bytes:
    """Render a number the way the writer always does: integers bare,
    floats with up to four decimals and no trailing zeros."""
    if isinstance(value, bool):
        raise TypeError("bool is not a PDF number")
    if isinstance(value, int):
        return b"%d" % value
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite number {value!r} cannot be serialized")
    if float(value).is_integer():
        return b"%d" % int(value)
    text = f"{value:.4f}".rstrip("0").rstrip(".")
    if text in ("", "-"):
        text = "0"
    return text.encode("ascii")


def escape_name(name: str) -> bytes:
    out = bytearray(b"/")
    for byte in name.encode("latin-1"):
        if byte in _NAME_PLAIN:
            out.append(byte)
        else:
            out += b"#%02X" % byte
    return bytes(out)


def escape_string(data: bytes) -> bytes:
    """Literal-string form with parens, backslashes, and control bytes
    escaped. Bytes above 0x7E are kept verbatim; PDF strings are binary."""
    out = bytearray(b"(")
    for byte in data:
        esc = _STRING_ESCAPES.get(byte)
        if esc is not None:
            out += esc
        elif byte < 0x20:
            out += b"\\%03o" % byte
        else:
            out.append(byte)
    out += b")"
    return bytes(out)


def serialize(obj) -> bytes:
    """Serialize a direct object (not a full indirect ``N G obj`` wrapper)."""
    if obj is None:
        return b"null"
    if isinstance(obj, bool):
        return b"true" if obj else b"false"
    if isinstance(obj, PdfName):
        return escape_name(str(obj))
    if isinstance(obj, (int, float)):
        return format_number(obj)
    if isinstance(obj, PdfRef):
        return b"%d %d R" % (obj.num, obj.gen)
    if isinstance(obj, bytes):
        return escape_string(obj)
    if isinstance(obj, str):
        raise TypeError(
            "plain str is ambiguous in PDF output; use bytes for strings "
            "or PdfName for names"
        )
    if isinstance(obj, list):
        return b"[" + b" ".join(serialize(item) for item in obj) + b"]"
    if isinstance(obj, dict):
        parts = [b"<<"]
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"dictionary key {key!r} is not a name")
            parts.append(escape_name(str(key)) + b" " + serialize(obj[key]))
        parts.append(b">>")
        return b" ".join(parts)
    if isinstance(obj, PdfStream):
        body = dict(obj.dictionary)
        body[PdfName("Length")] = len(obj.raw)
        return serialize(body) + b"\nstream\n" + obj.raw + b"\nendstream"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
