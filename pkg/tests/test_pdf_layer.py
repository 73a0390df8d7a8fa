"""Object model, serializer, reader, and writer round trips."""

import zlib

import pytest
from hypothesis import given, strategies as st

from ghostink.errors import EncryptedDocumentError, ParseError
from ghostink.pdf import DocumentWriter, PdfFile, PdfName, PdfStream
from ghostink.pdf.content import (
    build_font_map,
    interpret_page,
    ocg_visibility,
    tokenize_content,
)
from ghostink.pdf.objects import escape_name, escape_string, format_number, serialize
from ghostink.pdf.reader import decode_stream


class TestSerializer:
    def test_format_number_integers_bare(self):
        assert format_number(4.0) == b"4"
        assert format_number(-12) == b"-12"

    def test_format_number_trims_trailing_zeros(self):
        assert format_number(0.5) == b"0.5"
        assert format_number(1.2346) == b"1.2346"

    def test_names_escape_delimiters(self):
        assert escape_name("F 1") == b"/F#201"

    def test_string_escaping_wraps_in_parens(self):
        body = escape_string(b"line\nbreak (paren) \\ tail \x02")
        assert body.startswith(b"(") and body.endswith(b")")

    def test_serialize_rejects_plain_str(self):
        with pytest.raises(TypeError):
            serialize({PdfName("Key"): "bare string"})

    def test_dict_keys_sorted(self):
        out = serialize({PdfName("Zeta"): 1, PdfName("Alpha"): 2})
        assert out.index(b"/Alpha") < out.index(b"/Zeta")

    @given(st.binary(max_size=64))
    def test_escape_string_parses_back(self, raw):
        from ghostink.pdf.reader import _Lexer

        lexer = _Lexer(escape_string(raw))
        assert lexer.parse_object() == raw


def _single_page_pdf() -> bytes:
    writer = DocumentWriter()
    page = writer.add_page()
    page.text(72, 700, "Hello reader", font="Helvetica", size=12)
    return writer.to_bytes()


class TestReader:
    def test_round_trip_page_text(self):
        pdf = PdfFile(_single_page_pdf())
        pages = pdf.pages()
        assert len(pages) == 1
        content = pdf.page_content(pages[0])
        assert b"Tj" in content or b"TJ" in content

    def test_non_pdf_rejected(self):
        with pytest.raises(ParseError):
            PdfFile(b"plain text, not a document")

    def test_encrypted_rejected(self):
        data = _single_page_pdf()
        # graft an /Encrypt entry into the trailer
        data = data.replace(b"/Root", b"/Encrypt 99 0 R /Root", 1)
        with pytest.raises(EncryptedDocumentError):
            PdfFile(data)

    def test_scan_fallback_survives_broken_xref(self):
        data = _single_page_pdf()
        where = data.rfind(b"startxref")
        broken = data[:where] + b"startxref\n999999999\n%%EOF\n"
        pdf = PdfFile(broken)
        assert len(pdf.pages()) == 1

    def test_flate_streams_decode(self):
        payload = b"BT /F1 12 Tf (x) Tj ET"
        stream = PdfStream(
            {PdfName("Filter"): PdfName("FlateDecode")},
            zlib.compress(payload, 9),
        )
        assert decode_stream(stream, lambda obj: obj) == payload

    def test_media_box_letter(self):
        pdf = PdfFile(_single_page_pdf())
        assert pdf.page_media_box(pdf.pages()[0]) == (0.0, 0.0, 612.0, 792.0)


class TestWriterRoundTrip:
    def test_interpreter_recovers_writer_attributes(self):
        writer = DocumentWriter()
        page = writer.add_page()
        page.text(100, 700, "big heading", font="Helvetica-Bold", size=18)
        page.text(100, 650, "tiny", font="Helvetica", size=1.5)
        page.text(100, 600, "ghost", font="Helvetica", size=10,
                  color=(250, 250, 250))
        page.text(100, 550, "quoted", font="Helvetica", size=10, op="'")

        pdf = PdfFile(writer.to_bytes())
        page_dict = pdf.pages()[0]
        runs = [
            item for item in interpret_page(
                pdf.page_content(page_dict),
                build_font_map(pdf, page_dict),
                {},
            )
            if hasattr(item, "text")
        ]
        assert [r.text for r in runs] == ["big heading", "tiny", "ghost", "quoted"]
        assert runs[0].font_size == pytest.approx(18.0)
        assert runs[1].font_size == pytest.approx(1.5)
        assert runs[2].fill == (250, 250, 250)

    def test_layer_marks_runs_hidden(self):
        writer = DocumentWriter()
        page = writer.add_page()
        off = writer.define_layer("Background", visible=False)
        page.text(72, 700, "visible", font="Helvetica", size=10)
        page.text(72, 650, "submerged", font="Helvetica", size=10, layer=off)

        pdf = PdfFile(writer.to_bytes())
        page_dict = pdf.pages()[0]
        runs = [
            item for item in interpret_page(
                pdf.page_content(page_dict),
                build_font_map(pdf, page_dict),
                ocg_visibility(pdf, page_dict),
            )
            if hasattr(item, "text")
        ]
        assert [r.hidden_by_ocg for r in runs] == [False, True]

    def test_serialization_is_deterministic(self):
        def build() -> bytes:
            writer = DocumentWriter()
            page = writer.add_page()
            page.fill_rect(20, 20, 100, 40, color=(52, 73, 94))
            page.text(72, 700, "same bytes", font="Times-Roman", size=11)
            return writer.to_bytes()

        assert build() == build()

    def test_content_ops_tokenize_with_spans(self):
        content = b"BT /F1 9 Tf 72 700 Td (abc) Tj ET"
        ops = tokenize_content(content)
        shown = [op for op in ops if op.operator == "Tj"]
        assert len(shown) == 1
        assert content[shown[0].start:shown[0].end] == b"(abc) Tj"
