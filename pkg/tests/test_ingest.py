from __future__ import annotations

from pathlib import Path

import pytest
from reportlab.lib.pagesizes import letter
from reportlab.pdfgen import canvas

from refweave.errors import EncryptedPdf, NoTextLayer, UnreadablePdf
from refweave.pagegraph import ingest_pdf, validate_pagegraph

PAGE_W, PAGE_H = letter

FIXTURES = Path(__file__).parent / "fixtures"


def build_pdf(path, draw, pages=1, **canvas_kw):
    c = canvas.Canvas(str(path), pagesize=letter, invariant=1, **canvas_kw)
    for index in range(pages):
        draw(c, index)
        c.showPage()
    c.save()
    return path


def test_minimal_document(tmp_path):
    def draw(c, index):
        c.setFont("Helvetica", 10)
        c.drawString(72, PAGE_H - 72, "Hello")

    graph = ingest_pdf(build_pdf(tmp_path / "hello.pdf", draw))
    assert len(graph.pages) == 1
    page = graph.pages[0]
    assert len(page.runs) == 1
    assert page.links == []
    run = page.runs[0]
    assert run.text == "Hello"
    # top-left origin: near the top of the page, at the left margin
    assert run.bbox.x0 == pytest.approx(72.0, abs=0.01)
    assert run.baseline_y == pytest.approx(72.0, abs=0.01)
    assert run.bbox.y0 < run.baseline_y < run.bbox.y1
    validate_pagegraph(graph)


def test_goto_link_over_citation(tmp_path):
    # "[52]" on page 0 linking to page 8
    def draw(c, index):
        c.setFont("Helvetica", 10)
        if index == 0:
            c.drawString(72, 700, "[52]")
            c.linkAbsolute("", "target", (71, 695, 95, 710))
        if index == 8:
            c.drawString(72, 700, "[52] presents a breakthrough result")
            c.bookmarkPage("target", fit="XYZ", left=72, top=705, zoom=0)

    graph = ingest_pdf(build_pdf(tmp_path / "linked.pdf", draw, pages=9))
    links = [l for page in graph.pages for l in page.links]
    assert len(links) == 1
    link = links[0]
    assert link.kind == "internal"
    assert link.target_page == 8
    assert link.source_page == 0
    # target point flipped to top-left coordinates
    assert link.target_point[1] == pytest.approx(PAGE_H - 705, abs=0.01)


def test_uri_link_is_external(tmp_path):
    def draw(c, index):
        c.setFont("Helvetica", 10)
        c.drawString(72, 700, "see website")
        c.linkURL("https://example.org", (71, 695, 160, 710))

    graph = ingest_pdf(build_pdf(tmp_path / "uri.pdf", draw))
    links = graph.pages[0].links
    assert len(links) == 1
    assert links[0].kind == "external"


def test_image_only_pdf_has_no_text_layer(tmp_path):
    from reportlab.lib.utils import ImageReader
    import io

    try:
        from PIL import Image
    except ImportError:
        pytest.skip("pillow not available")
    img = Image.new("RGB", (50, 50), color=(200, 10, 10))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    buf.seek(0)

    def draw(c, index):
        c.drawImage(ImageReader(buf), 72, 600, width=100, height=100)

    with pytest.raises(NoTextLayer):
        ingest_pdf(build_pdf(tmp_path / "image.pdf", draw))


def test_encrypted_pdf_rejected(tmp_path):
    import reportlab.lib.pdfencrypt as pdfencrypt

    enc = pdfencrypt.StandardEncryption("owner-pw", canPrint=0)
    c = canvas.Canvas(str(tmp_path / "enc.pdf"), pagesize=letter, encrypt=enc)
    c.drawString(72, 700, "secret")
    c.showPage()
    c.save()
    with pytest.raises(EncryptedPdf):
        ingest_pdf(tmp_path / "enc.pdf")


def test_garbage_rejected(tmp_path):
    bad = tmp_path / "bad.pdf"
    bad.write_bytes(b"this is not a pdf at all")
    with pytest.raises(UnreadablePdf):
        ingest_pdf(bad)


def test_truncated_pdf_rejected(tmp_path):
    bad = tmp_path / "trunc.pdf"
    bad.write_bytes(b"%PDF-1.4\n1 0 obj\n<< /Type /Catalog")
    with pytest.raises(UnreadablePdf):
        ingest_pdf(bad)


def test_missing_file(tmp_path):
    with pytest.raises(UnreadablePdf):
        ingest_pdf(tmp_path / "nope.pdf")


def test_coordinates_within_page_bounds(tmp_path):
    def draw(c, index):
        c.setFont("Times-Roman", 11)
        for i in range(30):
            c.drawString(72, 720 - 13 * i, f"line {i} with some words on it")

    graph = ingest_pdf(build_pdf(tmp_path / "dense.pdf", draw, pages=2))
    for page in graph.pages:
        for run in page.runs:
            assert 0.0 <= run.bbox.x0 < run.bbox.x1 <= page.width + 1.0
            assert 0.0 <= run.bbox.y0 < run.bbox.y1 <= page.height + 1.0
    validate_pagegraph(graph)


def test_multiple_fonts_and_sizes(tmp_path):
    def draw(c, index):
        c.setFont("Helvetica-Bold", 14)
        c.drawString(72, 720, "A Heading")
        c.setFont("Helvetica", 10)
        c.drawString(72, 700, "body text")

    graph = ingest_pdf(build_pdf(tmp_path / "fonts.pdf", draw))
    sizes = sorted({r.font_size for r in graph.pages[0].runs})
    assert sizes == [10.0, 14.0]


def test_reading_order_assigned_on_ingest(tmp_path):
    def draw(c, index):
        c.setFont("Helvetica", 10)
        c.drawString(72, 600, "second")  # drawn first, lower on the page
        c.drawString(72, 700, "first")

    graph = ingest_pdf(build_pdf(tmp_path / "order.pdf", draw))
    ordered = graph.pages[0].runs_in_order()
    assert [r.text for r in ordered] == ["first", "second"]


def test_checked_in_fixtures_ingest():
    for name in ("single_column.pdf", "two_column.pdf", "numbered_bib.pdf"):
        graph = ingest_pdf(FIXTURES / name)
        validate_pagegraph(graph)
        assert sum(len(p.runs) for p in graph.pages) > 30
        assert sum(len(p.links) for p in graph.pages) >= 4


def test_fixtures_regenerate_byte_identical(tmp_path):
    # the checked-in PDFs must match what the builder script produces
    import hashlib
    import subprocess
    import sys

    script = FIXTURES / "build_fixtures.py"
    subprocess.run([sys.executable, str(script), str(tmp_path)], check=True, capture_output=True)
    for name in ("single_column.pdf", "two_column.pdf", "numbered_bib.pdf"):
        rebuilt = hashlib.sha256((tmp_path / name).read_bytes()).hexdigest()
        checked_in = hashlib.sha256((FIXTURES / name).read_bytes()).hexdigest()
        assert rebuilt == checked_in, name
