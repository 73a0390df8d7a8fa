"""Rasterizer invariants the detectors depend on."""

import numpy as np
import pytest

from ghostink.document import extract_elements, load_document
from ghostink.errors import EmptyRegionError
from ghostink.pdf.raster import MIN_GLYPH_PX, render_window, window_bounds
from ghostink.pdf.writer import DocumentWriter


def _doc(build):
    writer = DocumentWriter()
    build(writer)
    return load_document(writer.to_bytes(), document_id="raster")


def test_blank_page_renders_white():
    doc = _doc(lambda w: w.add_page())
    pixels = doc.page_render(0).buffer
    assert pixels.dtype == np.uint8
    assert (pixels == 255).all()


def test_visible_text_inks_pixels():
    doc = _doc(lambda w: w.add_page().text(
        72, 700, "INK", font="Helvetica-Bold", size=24
    ))
    element = extract_elements(doc)[0]
    region = doc.render_region(0, element.bbox)
    assert (region < 250).any()


def test_window_render_matches_page_crop():
    def build(writer):
        page = writer.add_page()
        page.fill_rect(40, 600, 300, 80, color=(47, 84, 150))
        page.text(72, 700, "crop equality", font="Helvetica", size=14)
        page.text(72, 620, "another line", font="Times-Roman", size=12,
                  color=(255, 255, 255))

    doc = _doc(build)
    model_box = doc.media_box(0)
    window = (60.0, 590.0, 360.0, 720.0)
    col0, row0, col1, row1 = window_bounds(model_box, window, 150)
    crop = doc.page_render(0).buffer[row0:row1, col0:col1]
    standalone = render_window(
        doc.display_list(0), model_box, window, 150
    ).buffer
    assert crop.shape == standalone.shape
    assert (crop == standalone).all()


def test_rendering_is_deterministic():
    def build(writer):
        page = writer.add_page()
        page.text(72, 700, "stable pixels", font="Helvetica", size=12)

    a = _doc(build).page_render(0).buffer
    b = _doc(build).page_render(0).buffer
    assert (a == b).all()


def test_sub_floor_text_inks_nothing():
    # at 150 dpi a glyph below MIN_GLYPH_PX never reaches the buffer
    doc = _doc(lambda w: w.add_page().text(
        72, 400, "whisper quiet", font="Helvetica", size=2.0
    ))
    assert (doc.page_render(0).buffer == 255).all()
    floor_pt = MIN_GLYPH_PX * 72.0 / 150.0
    assert 2.0 < floor_pt


def test_render_mode_3_inks_nothing():
    doc = _doc(lambda w: w.add_page().text(
        72, 400, "phantom", font="Helvetica", size=14, render_mode=3
    ))
    assert (doc.page_render(0).buffer == 255).all()


def test_hidden_layer_inks_nothing():
    def build(writer):
        page = writer.add_page()
        off = writer.define_layer("Background", visible=False)
        page.text(72, 400, "switched off", font="Helvetica", size=14, layer=off)

    assert (_doc(build).page_render(0).buffer == 255).all()


def test_near_white_text_changes_pixels_slightly():
    doc = _doc(lambda w: w.add_page().text(
        72, 400, "almost white", font="Helvetica", size=10,
        color=(254, 254, 254),
    ))
    element = extract_elements(doc)[0]
    region = doc.render_region(0, element.bbox)
    assert (region == 254).any()
    assert not (region < 240).any()


def test_skip_ordinals_suppresses_one_element():
    def build(writer):
        page = writer.add_page()
        page.text(72, 700, "keep me", font="Helvetica", size=12)
        page.text(72, 660, "drop me", font="Helvetica", size=12)

    doc = _doc(build)
    drop = next(
        e for e in extract_elements(doc) if e.text == "drop me"
    )
    ordinal = int(drop.element_id.split(".")[1])
    pad = 4.0
    window = (
        drop.bbox[0] - pad, drop.bbox[1] - pad,
        drop.bbox[2] + pad, drop.bbox[3] + pad,
    )
    with_element = doc.render_region(0, window)
    without = doc.render_region(0, window, skip_ordinals=frozenset({ordinal}))
    assert (with_element < 250).any()
    assert (without == 255).all()


def test_window_outside_page_rejected():
    doc = _doc(lambda w: w.add_page())
    with pytest.raises(EmptyRegionError):
        render_window(
            doc.display_list(0), doc.media_box(0), (-200, 10, -100, 60), 150
        )
