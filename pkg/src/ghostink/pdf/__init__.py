"""Minimal PDF machinery: object model, reader, content interpreter,
deterministic writer, and a numpy rasterizer.

The toolkit carries its own PDF layer so that parsing, rewriting, and
rendering all agree on one geometry model. Only simple, uncompressed or
Flate-compressed documents with standard simple fonts are supported; that
covers the resume-style documents this toolkit generates and measures.
"""

from ghostink.pdf.objects import PdfName, PdfRef, PdfStream
from ghostink.pdf.reader import PdfFile
from ghostink.pdf.writer import DocumentWriter

__all__ = ["PdfName", "PdfRef", "PdfStream", "PdfFile", "DocumentWriter"]
