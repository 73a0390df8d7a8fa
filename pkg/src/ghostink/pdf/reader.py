"""PDF file reader.

Loads a document into an object map plus trailer, then exposes the page
tree. Two loading strategies:

* parse the cross-reference table(s) from ``startxref`` back through
  ``/Prev`` chains, classic tables only;
* if that fails (corrupt offsets, xref streams, truncated tail), fall
  back to scanning the whole byte stream for ``N G obj`` headers.

Object streams (``/Type /ObjStm``) are expanded in both strategies so
compressed documents still load. Encrypted documents are refused up
front; silently misreading ciphertext would poison every downstream
measurement.
"""

from __future__ import annotations

import re
import zlib

from ghostink.errors import EncryptedDocumentError, ParseError
from ghostink.pdf.objects import PdfName, PdfRef, PdfStream

_WHITESPACE = b"\x00\t\n\x0c\r "
_DELIMITERS = b"()<>[]{}/%"
_REGULAR_STOP = _WHITESPACE + _DELIMITERS

_OBJ_HEADER = re.compile(rb"(\d{1,10})\s+(\d{1,5})\s+obj\b")


class _Lexer:
    """Cursor over raw PDF bytes with recursive object parsing."""

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def skip_space(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            byte = data[self.pos]
            if byte in _WHITESPACE:
                self.pos += 1
            elif byte == 0x25:  # '%' comment runs to end of line
                while self.pos < n and data[self.pos] not in b"\r\n":
                    self.pos += 1
            else:
                return

    def peek(self) -> int:
        if self.pos >= len(self.data):
            raise ParseError("unexpected end of data")
        return self.data[self.pos]

    def expect(self, token: bytes) -> None:
        self.skip_space()
        if not self.data.startswith(token, self.pos):
            raise ParseError(
                f"expected {token!r} at offset {self.pos}, "
                f"found {self.data[self.pos:self.pos + 12]!r}"
            )
        self.pos += len(token)

    def read_token(self) -> bytes:
        """Read a run of regular characters (number, keyword)."""
        self.skip_space()
        start = self.pos
        data, n = self.data, len(self.data)
        while self.pos < n and data[self.pos] not in _REGULAR_STOP:
            self.pos += 1
        if self.pos == start:
            raise ParseError(f"expected token at offset {start}")
        return data[start:self.pos]

    def parse_object(self):
        self.skip_space()
        byte = self.peek()
        if byte == 0x2F:  # '/'
            return self._parse_name()
        if byte == 0x28:  # '('
            return self._parse_literal_string()
        if byte == 0x3C:  # '<'
            if self.data.startswith(b"<<", self.pos):
                return self._parse_dict_or_stream()
            return self._parse_hex_string()
        if byte == 0x5B:  # '['
            self.pos += 1
            items = []
            while True:
                self.skip_space()
                if self.peek() == 0x5D:
                    self.pos += 1
                    return items
                items.append(self.parse_object())
        token = self.read_token()
        if token == b"true":
            return True
        if token == b"false":
            return False
        if token == b"null":
            return None
        return self._parse_numeric(token)

    def _parse_numeric(self, token: bytes):
        try:
            first = int(token)
        except ValueError:
            try:
                return float(token)
            except ValueError:
                raise ParseError(f"unparseable token {token!r}") from None
        # Look ahead for "G R": an indirect reference.
        save = self.pos
        try:
            second = self.read_token()
            third = self.read_token()
        except ParseError:
            self.pos = save
            return first
        if third == b"R" and second.isdigit() and first >= 0:
            return PdfRef(first, int(second))
        self.pos = save
        return first

    def _parse_name(self) -> PdfName:
        self.pos += 1
        data, n = self.data, len(self.data)
        out = bytearray()
        while self.pos < n:
            byte = data[self.pos]
            if byte in _REGULAR_STOP:
                break
            if byte == 0x23 and self.pos + 2 < n:  # '#' hex escape
                try:
                    out.append(int(data[self.pos + 1:self.pos + 3], 16))
                    self.pos += 3
                    continue
                except ValueError:
                    pass
            out.append(byte)
            self.pos += 1
        return PdfName(out.decode("latin-1"))

    def _parse_literal_string(self) -> bytes:
        self.pos += 1
        data, n = self.data, len(self.data)
        out = bytearray()
        depth = 1
        while self.pos < n:
            byte = data[self.pos]
            if byte == 0x5C:  # backslash
                self.pos += 1
                if self.pos >= n:
                    break
                esc = data[self.pos]
                simple = {
                    0x6E: 0x0A, 0x72: 0x0D, 0x74: 0x09,
                    0x62: 0x08, 0x66: 0x0C,
                    0x28: 0x28, 0x29: 0x29, 0x5C: 0x5C,
                }.get(esc)
                if simple is not None:
                    out.append(simple)
                    self.pos += 1
                elif esc in b"01234567":
                    digits = bytearray()
                    while self.pos < n and len(digits) < 3 and data[self.pos] in b"01234567":
                        digits.append(data[self.pos])
                        self.pos += 1
                    out.append(int(digits, 8) & 0xFF)
                elif esc in b"\r\n":  # line continuation
                    self.pos += 1
                    if esc == 0x0D and self.pos < n and data[self.pos] == 0x0A:
                        self.pos += 1
                else:
                    out.append(esc)
                    self.pos += 1
            elif byte == 0x28:
                depth += 1
                out.append(byte)
                self.pos += 1
            elif byte == 0x29:
                depth -= 1
                if depth == 0:
                    self.pos += 1
                    return bytes(out)
                out.append(byte)
                self.pos += 1
            else:
                out.append(byte)
                self.pos += 1
        raise ParseError("unterminated literal string")

    def _parse_hex_string(self) -> bytes:
        self.pos += 1
        end = self.data.find(b">", self.pos)
        if end < 0:
            raise ParseError("unterminated hex string")
        digits = bytes(
            b for b in self.data[self.pos:end] if b not in _WHITESPACE
        )
        self.pos = end + 1
        if len(digits) % 2:
            digits += b"0"
        try:
            return bytes.fromhex(digits.decode("ascii"))
        except ValueError:
            raise ParseError("invalid hex string") from None

    def _parse_dict_or_stream(self):
        self.pos += 2
        out: dict = {}
        while True:
            self.skip_space()
            if self.data.startswith(b">>", self.pos):
                self.pos += 2
                break
            if self.peek() != 0x2F:
                raise ParseError(
                    f"dictionary key at offset {self.pos} is not a name"
                )
            key = self._parse_name()
            out[key] = self.parse_object()
        save = self.pos
        self.skip_space()
        if not self.data.startswith(b"stream", self.pos):
            self.pos = save
            return out
        self.pos += len(b"stream")
        if self.data.startswith(b"\r\n", self.pos):
            self.pos += 2
        elif self.data.startswith(b"\n", self.pos):
            self.pos += 1
        length = out.get(PdfName("Length"))
        if isinstance(length, int) and length >= 0:
            raw = self.data[self.pos:self.pos + length]
            guess = self.pos + length
            tail = self.data.find(b"endstream", guess)
            # Trust /Length only if endstream actually follows it closely.
            if tail < 0 or tail - guess > 4:
                raw, tail = self._scan_stream_end()
            else:
                raw = self.data[self.pos:self.pos + length]
        else:
            raw, tail = self._scan_stream_end()
        self.pos = tail + len(b"endstream")
        return PdfStream(out, raw)

    def _scan_stream_end(self) -> tuple[bytes, int]:
        tail = self.data.find(b"endstream", self.pos)
        if tail < 0:
            raise ParseError("stream without endstream")
        raw = self.data[self.pos:tail]
        if raw.endswith(b"\r\n"):
            raw = raw[:-2]
        elif raw.endswith(b"\n") or raw.endswith(b"\r"):
            raw = raw[:-1]
        return raw, tail


def decode_stream(stream: PdfStream, resolve) -> bytes:
    """Apply the stream's filter chain. Only FlateDecode (optionally with
    a PNG predictor) is supported; that is all this toolkit emits or reads."""
    filters = resolve(stream.dictionary.get(PdfName("Filter")))
    if filters is None:
        return stream.raw
    if not isinstance(filters, list):
        filters = [filters]
    data = stream.raw
    params = resolve(stream.dictionary.get(PdfName("DecodeParms")))
    if not isinstance(params, list):
        params = [params] * len(filters)
    for filt, parm in zip(filters, params):
        filt = resolve(filt)
        if filt == PdfName("FlateDecode"):
            try:
                data = zlib.decompress(data)
            except zlib.error as exc:
                raise ParseError(f"flate decode failed: {exc}") from None
            data = _apply_predictor(data, resolve(parm), resolve)
        else:
            raise ParseError(f"unsupported stream filter {filt!r}")
    return data


def _apply_predictor(data: bytes, parm, resolve) -> bytes:
    if not isinstance(parm, dict):
        return data
    predictor = resolve(parm.get(PdfName("Predictor"), 1))
    if predictor in (None, 1):
        return data
    if predictor < 10:
        raise ParseError(f"unsupported predictor {predictor}")
    columns = resolve(parm.get(PdfName("Columns"), 1))
    colors = resolve(parm.get(PdfName("Colors"), 1))
    bpc = resolve(parm.get(PdfName("BitsPerComponent"), 8))
    sample = max(1, (colors * bpc) // 8)
    row_len = columns * sample
    out = bytearray()
    prev = bytearray(row_len)
    pos = 0
    while pos + 1 + row_len <= len(data) + row_len and pos < len(data):
        tag = data[pos]
        row = bytearray(data[pos + 1:pos + 1 + row_len])
        pos += 1 + row_len
        if tag == 2:  # Up, the only predictor xref streams use in practice
            for i in range(len(row)):
                row[i] = (row[i] + prev[i]) & 0xFF
        elif tag == 1:
            for i in range(sample, len(row)):
                row[i] = (row[i] + row[i - sample]) & 0xFF
        elif tag != 0:
            raise ParseError(f"unsupported PNG predictor tag {tag}")
        out += row
        prev = row
    return bytes(out)


class PdfFile:
    """Parsed document: object map, trailer, and page accessors."""

    def __init__(self, data: bytes):
        if not data.lstrip(b"\x00\t\n\x0c\r ").startswith(b"%PDF-"):
            raise ParseError("missing %PDF header")
        self.data = data
        self.objects: dict[tuple[int, int], object] = {}
        self.trailer: dict = {}
        try:
            self._load_via_xref()
        except ParseError:
            self.objects.clear()
            self.trailer = {}
            self._load_via_scan()
        self._expand_object_streams()
        if not self.trailer:
            self._recover_trailer()
        if PdfName("Encrypt") in self.trailer:
            raise EncryptedDocumentError(
                "document declares /Encrypt; encrypted files are not supported"
            )
        root = self.resolve(self.trailer.get(PdfName("Root")))
        if not isinstance(root, dict):
            raise ParseError("document has no catalog")
        self.catalog = root

    # -- loading -----------------------------------------------------------

    def _load_via_xref(self) -> None:
        tail = self.data[-2048:]
        marker = tail.rfind(b"startxref")
        if marker < 0:
            raise ParseError("no startxref")
        lex = _Lexer(tail, marker + len(b"startxref"))
        start = lex.parse_object()
        if not isinstance(start, int):
            raise ParseError("startxref offset is not an integer")
        seen_offsets: set[int] = set()
        offset = start
        while offset is not None:
            if offset in seen_offsets or not 0 <= offset < len(self.data):
                raise ParseError("bad xref chain")
            seen_offsets.add(offset)
            offset = self._load_xref_section(offset)
        if not self.objects:
            raise ParseError("xref yielded no objects")

    def _load_xref_section(self, offset: int) -> int | None:
        lex = _Lexer(self.data, offset)
        lex.skip_space()
        if self.data.startswith(b"xref", lex.pos):
            lex.pos += 4
            trailer = self._load_xref_table(lex)
        else:
            trailer = self._load_xref_stream(lex)
        for key, value in trailer.items():
            self.trailer.setdefault(key, value)
        prev = trailer.get(PdfName("Prev"))
        return prev if isinstance(prev, int) else None

    def _load_xref_table(self, lex: _Lexer) -> dict:
        entries: dict[int, int] = {}
        while True:
            lex.skip_space()
            if self.data.startswith(b"trailer", lex.pos):
                lex.pos += len(b"trailer")
                trailer = lex.parse_object()
                if not isinstance(trailer, dict):
                    raise ParseError("trailer is not a dictionary")
                self._materialize(entries)
                return trailer
            first = lex.parse_object()
            count = lex.parse_object()
            if not isinstance(first, int) or not isinstance(count, int):
                raise ParseError("malformed xref subsection header")
            for idx in range(count):
                lex.skip_space()
                row = self.data[lex.pos:lex.pos + 18]
                if len(row) < 18:
                    raise ParseError("truncated xref row")
                lex.pos += 18
                kind = row[17:18]
                if kind == b"n":
                    entries[first + idx] = int(row[0:10])

    def _load_xref_stream(self, lex: _Lexer) -> dict:
        header = _OBJ_HEADER.match(self.data, lex.pos)
        if not header:
            raise ParseError("xref offset points at neither table nor stream")
        lex.pos = header.end()
        obj = lex.parse_object()
        if not isinstance(obj, PdfStream):
            raise ParseError("xref stream object is not a stream")
        info = obj.dictionary
        widths = info.get(PdfName("W"))
        size = info.get(PdfName("Size"))
        if not isinstance(widths, list) or not isinstance(size, int):
            raise ParseError("xref stream missing W or Size")
        index = info.get(PdfName("Index"), [0, size])
        data = decode_stream(obj, lambda o: o)
        w0, w1, w2 = (int(w) for w in widths[:3])
        row_len = w0 + w1 + w2
        entries: dict[int, int] = {}
        compressed: dict[int, tuple[int, int]] = {}
        pos = 0
        for first, count in zip(index[::2], index[1::2]):
            for idx in range(count):
                row = data[pos:pos + row_len]
                if len(row) < row_len:
                    raise ParseError("truncated xref stream")
                pos += row_len
                kind = int.from_bytes(row[:w0], "big") if w0 else 1
                f2 = int.from_bytes(row[w0:w0 + w1], "big")
                f3 = int.from_bytes(row[w0 + w1:], "big")
                num = first + idx
                if kind == 1:
                    entries[num] = f2
                elif kind == 2:
                    compressed[num] = (f2, f3)
        self._materialize(entries)
        self._pending_compressed = getattr(self, "_pending_compressed", {})
        self._pending_compressed.update(compressed)
        return dict(info)

    def _materialize(self, entries: dict[int, int]) -> None:
        for num, offset in entries.items():
            if not 0 <= offset < len(self.data):
                continue
            header = _OBJ_HEADER.match(self.data, offset) or _OBJ_HEADER.search(
                self.data, max(0, offset - 2), offset + 32
            )
            if not header:
                continue
            key = (int(header.group(1)), int(header.group(2)))
            if key in self.objects:
                continue
            lex = _Lexer(self.data, header.end())
            try:
                self.objects[key] = lex.parse_object()
            except ParseError:
                continue

    def _load_via_scan(self) -> None:
        for header in _OBJ_HEADER.finditer(self.data):
            # Headers must sit at a token boundary, not inside a stream body.
            if header.start() > 0 and self.data[header.start() - 1:header.start()] not in (
                b"\n", b"\r", b" ", b"\t", b"\x00", b"\x0c"
            ):
                continue
            key = (int(header.group(1)), int(header.group(2)))
            lex = _Lexer(self.data, header.end())
            try:
                obj = lex.parse_object()
            except ParseError:
                continue
            self.objects[key] = obj
        if not self.objects:
            raise ParseError("no objects found in document")
        for match in re.finditer(rb"trailer\b", self.data):
            lex = _Lexer(self.data, match.end())
            try:
                trailer = lex.parse_object()
            except ParseError:
                continue
            if isinstance(trailer, dict):
                for key, value in trailer.items():
                    self.trailer.setdefault(key, value)

    def _expand_object_streams(self) -> None:
        containers = [
            obj for obj in list(self.objects.values())
            if isinstance(obj, PdfStream)
            and obj.dictionary.get(PdfName("Type")) == PdfName("ObjStm")
        ]
        for stream in containers:
            try:
                data = decode_stream(stream, self.resolve)
                count = self.resolve(stream.dictionary.get(PdfName("N")))
                first = self.resolve(stream.dictionary.get(PdfName("First")))
                lex = _Lexer(data)
                pairs = []
                for _ in range(int(count)):
                    num = lex.parse_object()
                    rel = lex.parse_object()
                    pairs.append((int(num), int(rel)))
                for num, rel in pairs:
                    inner = _Lexer(data, int(first) + rel)
                    self.objects.setdefault((num, 0), inner.parse_object())
            except (ParseError, TypeError, ValueError):
                continue

    def _recover_trailer(self) -> None:
        for key, obj in self.objects.items():
            holder = obj.dictionary if isinstance(obj, PdfStream) else obj
            if isinstance(holder, dict) and PdfName("Root") in holder:
                self.trailer = {PdfName("Root"): holder[PdfName("Root")]}
                return
        for key, obj in self.objects.items():
            if isinstance(obj, dict) and obj.get(PdfName("Type")) == PdfName("Catalog"):
                self.trailer = {PdfName("Root"): PdfRef(*key)}
                return
        raise ParseError("cannot locate document catalog")

    # -- access ------------------------------------------------------------

    def resolve(self, obj, _depth: int = 0):
        while isinstance(obj, PdfRef):
            if _depth > 32:
                raise ParseError("reference cycle")
            obj = self.objects.get((obj.num, obj.gen))
            _depth += 1
        return obj

    def get(self, holder: dict, key: str, default=None):
        return self.resolve(holder.get(PdfName(key), default))

    def pages(self) -> list[dict]:
        """Flattened page dictionaries in document order, with inherited
        Resources and MediaBox pushed down."""
        root = self.get(self.catalog, "Pages")
        if not isinstance(root, dict):
            raise ParseError("catalog has no page tree")
        out: list[dict] = []

        def walk(node: dict, inherited: dict, depth: int) -> None:
            if depth > 64:
                raise ParseError("page tree too deep")
            merged = dict(inherited)
            for key in ("Resources", "MediaBox", "Rotate"):
                if PdfName(key) in node:
                    merged[key] = node[PdfName(key)]
            node_type = self.get(node, "Type")
            kids = self.get(node, "Kids")
            if node_type == PdfName("Page") or (kids is None and node_type != PdfName("Pages")):
                page = dict(node)
                for key, value in merged.items():
                    page.setdefault(PdfName(key), value)
                out.append(page)
                return
            if not isinstance(kids, list):
                return
            for kid in kids:
                kid = self.resolve(kid)
                if isinstance(kid, dict):
                    walk(kid, merged, depth + 1)

        walk(root, {}, 0)
        if not out:
            raise ParseError("document has no pages")
        return out

    def page_content(self, page: dict) -> bytes:
        """Decoded, concatenated content streams for a page."""
        contents = self.get(page, "Contents")
        if contents is None:
            return b""
        streams = contents if isinstance(contents, list) else [contents]
        parts = []
        for item in streams:
            item = self.resolve(item)
            if isinstance(item, PdfStream):
                parts.append(decode_stream(item, self.resolve))
        return b"\n".join(parts)

    def page_media_box(self, page: dict) -> tuple[float, float, float, float]:
        box = self.get(page, "MediaBox")
        if not isinstance(box, list) or len(box) != 4:
            return (0.0, 0.0, 612.0, 792.0)
        x0, y0, x1, y1 = (float(self.resolve(v)) for v in box)
        return (min(x0, x1), min(y0, y1), max(x0, x1), max(y0, y1))

    def hidden_ocgs(self) -> set[tuple[int, int]]:
        """Object keys of optional content groups switched off in the
        default configuration."""
        props = self.get(self.catalog, "OCProperties")
        if not isinstance(props, dict):
            return set()
        default = self.get(props, "D")
        if not isinstance(default, dict):
            return set()
        off = default.get(PdfName("OFF"))
        if not isinstance(off, list):
            return set()
        return {
            (ref.num, ref.gen) for ref in off if isinstance(ref, PdfRef)
        }
