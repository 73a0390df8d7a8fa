import random

import pytest

from ghostink.document import load_document
from ghostink.pdf.writer import DocumentWriter

PAGE_W = 612.0
PAGE_H = 792.0


def build_mixed_page():
    """One page exercising every concealment trick next to normal text.

    Returns (writer, expectations) where expectations maps element text
    to the property that makes it hidden.
    """
    writer = DocumentWriter()
    page = writer.add_page(PAGE_W, PAGE_H)
    page.text(72, 720, "Jordan Alvarez", font="Helvetica-Bold", size=16)
    page.text(72, 700, "Data Engineer", font="Helvetica", size=11)
    page.text(72, 660, "Built streaming pipelines for ad analytics.",
              font="Helvetica", size=10)
    page.text(72, 500, "white on white secret", font="Helvetica", size=9,
              color=(254, 254, 254))
    page.text(72, 450, "microscopic note", font="Helvetica", size=1.5)
    page.text(PAGE_W + 40, 400, "parked outside the page", font="Helvetica",
              size=10)
    page.text(72, 350, "unpainted glyphs", font="Helvetica", size=10,
              render_mode=3)
    hidden_layer = writer.define_layer("Background", visible=False)
    page.text(72, 300, "layered away", font="Helvetica", size=10,
              layer=hidden_layer)
    return writer


@pytest.fixture
def mixed_doc():
    writer = build_mixed_page()
    return load_document(writer.to_bytes(), document_id="mixed")


@pytest.fixture
def rng():
    return random.Random(1234)
