from __future__ import annotations

import pytest

from refweave.pagegraph import Box, LinkAnnotation, Page, PageGraph, TextRun, reading_order

DEFAULT_FONT = 10.0
ASCENT = 0.72
DESCENT = 0.21
CHAR_W = 0.5


def run_at(x: float, baseline: float, text: str = "word", font: float = DEFAULT_FONT) -> TextRun:
    """A text run with synthetic glyph metrics (0.5 em per character)."""
    width = len(text) * CHAR_W * font
    return TextRun(
        text=text,
        bbox=Box(
            round(x, 3),
            round(baseline - ASCENT * font, 3),
            round(x + width, 3),
            round(baseline + DESCENT * font, 3),
        ),
        font_size=font,
        baseline_y=round(baseline, 3),
    )


def line_runs(x: float, baseline: float, words: list[str], font: float = DEFAULT_FONT,
              gap: float = 5.0) -> list[TextRun]:
    runs = []
    cursor = x
    for word in words:
        run = run_at(cursor, baseline, word, font)
        runs.append(run)
        cursor = run.bbox.x1 + gap
    return runs


def make_page(runs: list[TextRun], index: int = 0, width: float = 612.0,
              height: float = 792.0, links: list[LinkAnnotation] | None = None,
              ordered: bool = True) -> Page:
    page = Page(index=index, width=width, height=height, runs=runs, links=links or [])
    if ordered:
        reading_order(page)
    return page


def make_graph(pages: list[Page], source_id: str = "test-doc") -> PageGraph:
    return PageGraph(source_id=source_id, pages=pages)


@pytest.fixture
def single_page_graph():
    page = make_page([run_at(72.0, 100.0, "Hello")])
    return make_graph([page])
