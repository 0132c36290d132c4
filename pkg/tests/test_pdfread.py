"""Reader tests on hand-assembled PDFs covering operators and structures
the fixture generator never emits."""

from __future__ import annotations

import pytest

from refweave.errors import UnreadablePdf
from refweave.pagegraph import ingest_pdf
from refweave.pagegraph.pdfread import PdfReader


def raw_pdf(objects: dict[int, bytes], root: int = 1) -> bytes:
    parts = [b"%PDF-1.4\n%\xc2\xb5\xc2\xb6\n"]
    for num in sorted(objects):
        parts.append(b"%d 0 obj\n" % num + objects[num] + b"\nendobj\n")
    parts.append(
        b"trailer\n<< /Root %d 0 R /Size %d >>\nstartxref\n0\n%%%%EOF\n"
        % (root, len(objects) + 1)
    )
    return b"".join(parts)


def stream_obj(body: bytes, extra: bytes = b"") -> bytes:
    return b"<< /Length %d %s >>\nstream\n%s\nendstream" % (len(body), extra, body)


def simple_doc(content: bytes, *, font: bytes = b"<< /Type /Font /Subtype /Type1 "
               b"/BaseFont /Helvetica /Encoding /WinAnsiEncoding >>",
               page_extra: bytes = b"", more: dict[int, bytes] | None = None) -> bytes:
    objects = {
        1: b"<< /Type /Catalog /Pages 2 0 R >>",
        2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 /MediaBox [0 0 612 792] >>",
        3: b"<< /Type /Page /Parent 2 0 R /Contents 4 0 R "
           b"/Resources << /Font << /F1 5 0 R >> >> " + page_extra + b" >>",
        4: stream_obj(content),
        5: font,
    }
    if more:
        objects.update(more)
    return raw_pdf(objects)


def ingest_bytes(tmp_path, data: bytes):
    path = tmp_path / "doc.pdf"
    path.write_bytes(data)
    return ingest_pdf(path)


CUSTOM_FONT = (
    b"<< /Type /Font /Subtype /TrueType /BaseFont /FakeSans /FirstChar 65 "
    b"/Widths [500 600 700] /FontDescriptor 6 0 R /Encoding /WinAnsiEncoding >>"
)
DESCRIPTOR = b"<< /Type /FontDescriptor /Ascent 800 /Descent -200 /MissingWidth 450 >>"


def test_tj_array_folds_kerning(tmp_path):
    # widths A=500 B=600 C=700 per mille; the -500 kern widens by 5 pt
    content = b"BT /F1 10 Tf 1 0 0 1 72 700 Tm [(AB) -500 (C)] TJ ET"
    graph = ingest_bytes(tmp_path, simple_doc(content, font=CUSTOM_FONT, more={6: DESCRIPTOR}))
    (run,) = graph.pages[0].runs
    assert run.text == "ABC"
    assert run.bbox.x0 == pytest.approx(72.0)
    assert run.bbox.x1 == pytest.approx(72.0 + 5.0 + 6.0 + 5.0 + 7.0)
    assert run.baseline_y == pytest.approx(792.0 - 700.0)
    # descriptor metrics: ascent 800/descent -200 at 10 pt
    assert run.bbox.y0 == pytest.approx(792.0 - 708.0)
    assert run.bbox.y1 == pytest.approx(792.0 - 698.0)


def test_quote_operator_advances_line(tmp_path):
    content = b"BT /F1 10 Tf 20 TL 1 0 0 1 72 700 Tm (first) Tj (second) ' ET"
    graph = ingest_bytes(tmp_path, simple_doc(content))
    runs = graph.pages[0].runs_in_order()
    assert [r.text for r in runs] == ["first", "second"]
    assert runs[0].baseline_y == pytest.approx(92.0)
    assert runs[1].baseline_y == pytest.approx(112.0)


def test_td_and_tstar_line_movement(tmp_path):
    content = (
        b"BT /F1 10 Tf 1 0 0 1 72 700 Tm (one) Tj 10 -15 TD (two) Tj T* (three) Tj ET"
    )
    graph = ingest_bytes(tmp_path, simple_doc(content))
    runs = graph.pages[0].runs_in_order()
    assert [r.text for r in runs] == ["one", "two", "three"]
    assert runs[1].bbox.x0 == pytest.approx(82.0)
    assert runs[1].baseline_y == pytest.approx(107.0)  # 700-15 flipped
    assert runs[2].baseline_y == pytest.approx(122.0)  # TD set leading to 15


def test_cm_translation_with_state_stack(tmp_path):
    content = b"q 1 0 0 1 100 -50 cm BT /F1 10 Tf 1 0 0 1 0 750 Tm (moved) Tj ET Q " \
              b"BT /F1 10 Tf 1 0 0 1 72 600 Tm (plain) Tj ET"
    graph = ingest_bytes(tmp_path, simple_doc(content))
    by_text = {r.text: r for r in graph.pages[0].runs}
    assert by_text["moved"].bbox.x0 == pytest.approx(100.0)
    assert by_text["moved"].baseline_y == pytest.approx(92.0)
    assert by_text["plain"].bbox.x0 == pytest.approx(72.0)


def test_text_rise_shifts_baseline(tmp_path):
    content = b"BT /F1 10 Tf 1 0 0 1 72 700 Tm (base) Tj 3 Ts (sup) Tj 0 Ts ET"
    graph = ingest_bytes(tmp_path, simple_doc(content))
    by_text = {r.text: r for r in graph.pages[0].runs}
    assert by_text["base"].baseline_y == pytest.approx(92.0)
    assert by_text["sup"].baseline_y == pytest.approx(89.0)


def test_horizontal_scaling(tmp_path):
    content = b"BT /F1 10 Tf 1 0 0 1 72 700 Tm 50 Tz (AA) Tj ET"
    graph = ingest_bytes(tmp_path, simple_doc(content, font=CUSTOM_FONT, more={6: DESCRIPTOR}))
    (run,) = graph.pages[0].runs
    assert run.bbox.width == pytest.approx(5.0)  # two 500/1000 glyphs at half scale


def test_rotated_text_skipped(tmp_path):
    content = b"BT /F1 10 Tf 0 1 -1 0 300 300 Tm (rotated) Tj ET " \
              b"BT /F1 10 Tf 1 0 0 1 72 700 Tm (upright) Tj ET"
    graph = ingest_bytes(tmp_path, simple_doc(content))
    assert [r.text for r in graph.pages[0].runs] == ["upright"]


def test_octal_escapes_in_strings(tmp_path):
    content = b"BT /F1 10 Tf 1 0 0 1 72 700 Tm (\\101\\102 \\(x\\)) Tj ET"
    graph = ingest_bytes(tmp_path, simple_doc(content))
    assert graph.pages[0].runs[0].text == "AB (x)"


def test_fith_destination_and_dests_dictionary(tmp_path):
    # PDF 1.1 style /Dests dictionary in the catalog, FitH target
    objects = {
        1: b"<< /Type /Catalog /Pages 2 0 R /Dests << /mydest [3 0 R /FitH 500] >> >>",
        2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 /MediaBox [0 0 612 792] >>",
        3: b"<< /Type /Page /Parent 2 0 R /Contents 4 0 R "
           b"/Resources << /Font << /F1 5 0 R >> >> "
           b"/Annots [ << /Type /Annot /Subtype /Link /Rect [72 690 120 710] "
           b"/A << /S /GoTo /D (mydest) >> >> ] >>",
        4: stream_obj(b"BT /F1 10 Tf 1 0 0 1 72 700 Tm (target page) Tj ET"),
        5: b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>",
    }
    graph = ingest_bytes(tmp_path, raw_pdf(objects))
    (link,) = graph.pages[0].links
    assert link.kind == "internal"
    assert link.target_page == 0
    assert link.target_point == (0.0, pytest.approx(292.0))  # 792 - 500


def test_contents_array_concatenated(tmp_path):
    objects = {
        1: b"<< /Type /Catalog /Pages 2 0 R >>",
        2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 /MediaBox [0 0 612 792] >>",
        3: b"<< /Type /Page /Parent 2 0 R /Contents [4 0 R 6 0 R] "
           b"/Resources << /Font << /F1 5 0 R >> >> >>",
        4: stream_obj(b"BT /F1 10 Tf 1 0 0 1 72 700 Tm (part one) Tj ET"),
        5: b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>",
        6: stream_obj(b"BT /F1 10 Tf 1 0 0 1 72 680 Tm (part two) Tj ET"),
    }
    graph = ingest_bytes(tmp_path, raw_pdf(objects))
    assert [r.text for r in graph.pages[0].runs_in_order()] == ["part one", "part two"]


def test_asciihex_stream_filter(tmp_path):
    body = b"BT /F1 10 Tf 1 0 0 1 72 700 Tm (hex) Tj ET"
    encoded = body.hex().encode("ascii") + b">"
    objects = {
        1: b"<< /Type /Catalog /Pages 2 0 R >>",
        2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 /MediaBox [0 0 612 792] >>",
        3: b"<< /Type /Page /Parent 2 0 R /Contents 4 0 R "
           b"/Resources << /Font << /F1 5 0 R >> >> >>",
        4: b"<< /Length %d /Filter /ASCIIHexDecode >>\nstream\n%s\nendstream"
           % (len(encoded), encoded),
        5: b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>",
    }
    graph = ingest_bytes(tmp_path, raw_pdf(objects))
    assert graph.pages[0].runs[0].text == "hex"


def test_mediabox_inherited_from_pages_node(tmp_path):
    objects = {
        1: b"<< /Type /Catalog /Pages 2 0 R >>",
        2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 /MediaBox [0 0 400 500] >>",
        3: b"<< /Type /Page /Parent 2 0 R /Contents 4 0 R "
           b"/Resources << /Font << /F1 5 0 R >> >> >>",
        4: stream_obj(b"BT /F1 10 Tf 1 0 0 1 30 400 Tm (small page) Tj ET"),
        5: b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>",
    }
    graph = ingest_bytes(tmp_path, raw_pdf(objects))
    page = graph.pages[0]
    assert (page.width, page.height) == (400.0, 500.0)
    assert page.runs[0].baseline_y == pytest.approx(100.0)


def test_unknown_glyph_uses_missing_width(tmp_path):
    # 'z' (code 122) is outside FirstChar..LastChar; MissingWidth 450 applies
    content = b"BT /F1 10 Tf 1 0 0 1 72 700 Tm (z) Tj ET"
    graph = ingest_bytes(tmp_path, simple_doc(content, font=CUSTOM_FONT, more={6: DESCRIPTOR}))
    (run,) = graph.pages[0].runs
    assert run.bbox.width == pytest.approx(4.5)


def test_comment_and_hexstring_lexing():
    data = raw_pdf(
        {
            1: b"<< /Type /Catalog /Pages 2 0 R % trailing comment\n /ID <4142> >>",
            2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 /MediaBox [0 0 612 792] >>",
            3: b"<< /Type /Page /Parent 2 0 R >>",
        }
    )
    reader = PdfReader(data)
    from refweave.pagegraph.pdfread import Name

    assert reader.catalog[Name("ID")] == b"AB"


def test_reference_loop_rejected():
    data = raw_pdf(
        {
            1: b"<< /Type /Catalog /Pages 2 0 R >>",
            2: b"2 0 R",
        }
    )
    reader = PdfReader(data)
    with pytest.raises(UnreadablePdf):
        reader.pages()