"""Explicit internal-reference keys: bibliography items, captions, equation
tags and footnote markers."""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass

from .errors import DuplicateKey, NoItemsFound, SectionNotFound
from .layout import (
    Region,
    RegionCategory,
    START_MARKER_RE,
    line_text,
    region_runs,
    region_sort_key,
    region_text,
    split_lines,
)
from .pagegraph import Box, PageGraph, TextRun, dominant_font_size, union_all

SECTION_KEYWORDS = (
    "references",
    "bibliography",
    "works cited",
    "literature cited",
    "reference",
)

# leading "7." / "VII." style numbering on section titles
_NUMBERING_RE = re.compile(r"^\s*(?:\d{1,3}|[ivxlcdm]{1,8})\s*[.):]?\s+", re.IGNORECASE)

CAPTION_RE = re.compile(r"^(table|tab\.|figure|fig\.|equation|eq\.)\s*(\d{1,3}[a-z]?)", re.IGNORECASE)
_CAPTION_KINDS = {
    "table": "Table",
    "tab.": "Table",
    "figure": "Figure",
    "fig.": "Figure",
    "equation": "Equation",
    "eq.": "Equation",
}

EQUATION_TAG_RE = re.compile(r"\((\d{1,4})\)\s*$")
EQUATION_TAG_MARGIN = 10.0

FOOTNOTE_SYMBOLS = ("†", "‡", "*", "§")  # dagger, double dagger, *, section
FOOTNOTE_BAND = 0.75  # region top must sit below this fraction of page height


@dataclass(slots=True)
class ReferenceSection:
    """Where the bibliography starts and the List regions inside it."""

    start: tuple[int, int]  # (page, reading_index of the title's first run)
    title_text: str
    list_regions: list[Region]
    start_y: float = 0.0  # top of the title's box
    title_font: float = 0.0
    end: tuple[int, float] | None = None  # (page, y) of the terminating title


@dataclass(slots=True)
class ReferenceItem:
    """One bibliography entry; boxes are per-page tight unions."""

    item_id: int
    explicit_key: str
    boxes: list[tuple[int, Box]]
    text: str
    start_run: tuple[int, int]

    def box_on(self, page: int) -> Box | None:
        for p, box in self.boxes:
            if p == page:
                return box
        return None


@dataclass(slots=True)
class CaptionKey:
    kind: str  # Table | Figure | Equation
    number_token: str
    key: str
    region: Region
    anchor_region: Region | None = None


@dataclass(slots=True)
class FootnoteMarker:
    marker_text: str
    in_text: tuple[int, int]  # (page, reading_index)
    footnote_region: Region | None = None


def _normalize_title(text: str) -> str:
    return _NUMBERING_RE.sub("", text).strip().lower()


def detect_reference_section(
    doc: PageGraph,
    regions: list[Region],
    *,
    keywords: tuple[str, ...] = SECTION_KEYWORDS,
) -> ReferenceSection:
    """Find the references section via keyword search over Title regions.

    The first Title whose text, minus leading numbering, equals one of the
    keywords opens the section; it runs to the next Title of equal or larger
    font, or the end of the document.
    """
    ordered = sorted(regions, key=region_sort_key)
    titles = [r for r in ordered if r.category is RegionCategory.TITLE and r.member_runs]
    match: Region | None = None
    match_pos = -1
    for pos, title in enumerate(titles):
        if _normalize_title(region_text(title, doc)) in keywords:
            match = title
            match_pos = pos
            break
    if match is None:
        raise SectionNotFound(
            "no title region matches the references-section keywords"
        )
    title_font = dominant_font_size(region_runs(match, doc.pages[match.page]))
    end: tuple[int, float] | None = None
    end_key = None
    for title in titles[match_pos + 1 :]:
        font = dominant_font_size(region_runs(title, doc.pages[title.page]))
        if font >= title_font:
            end = (title.page, title.bbox.y0)
            end_key = region_sort_key(title)
            break
    start_key = region_sort_key(match)
    list_regions = [
        r
        for r in ordered
        if r.category is RegionCategory.LIST
        and region_sort_key(r) > start_key
        and (end_key is None or region_sort_key(r) < end_key)
    ]
    return ReferenceSection(
        start=(match.page, match.member_runs[0]),
        title_text=region_text(match, doc),
        list_regions=list_regions,
        start_y=match.bbox.y0,
        title_font=title_font,
        end=end,
    )


def match_start_marker(text: str, marker_re: re.Pattern = START_MARKER_RE) -> tuple[str, int] | None:
    """Return (marker string, number) when the text opens with a start marker."""
    m = marker_re.match(text)
    if not m:
        return None
    number = next(g for g in m.groups() if g is not None)
    return m.group(0).strip(), int(number)


def segment_reference_items(
    section: ReferenceSection,
    doc: PageGraph,
    *,
    marker_re: re.Pattern = START_MARKER_RE,
) -> list[ReferenceItem]:
    """Split the section's List regions into reference items.

    A line starting with a marker opens an item only when its number
    continues the accepted sequence by exactly one (the first marker seeds
    it); anything else is item-body text. A region whose first line carries
    no marker continues the previous item, which handles column and page
    breaks.
    """
    # each collected line carries the page it came from
    items_lines: list[tuple[str, list[tuple[int, list[TextRun]]]]] = []
    expected: int | None = None
    current: list[tuple[int, list[TextRun]]] | None = None
    for region in section.list_regions:
        page = doc.pages[region.page]
        for line in split_lines(region_runs(region, page)):
            marker = match_start_marker(line_text(line), marker_re)
            accept = marker is not None and (expected is None or marker[1] == expected)
            if accept:
                key, number = marker
                current = [(region.page, line)]
                items_lines.append((key, current))
                expected = number + 1
            elif current is not None:
                current.append((region.page, line))
    if not items_lines:
        raise NoItemsFound("no line in the section's list regions matches the start-marker grammar")

    items = []
    for item_id, (key, lines) in enumerate(items_lines):
        per_page: dict[int, list[Box]] = {}
        for page_no, line in lines:
            for run in line:
                per_page.setdefault(page_no, []).append(run.bbox)
        boxes = [(p, union_all(bs)) for p, bs in sorted(per_page.items())]
        start_page, first_line = lines[0]
        items.append(
            ReferenceItem(
                item_id=item_id,
                explicit_key=key,
                boxes=boxes,
                text=" ".join(line_text(line) for _, line in lines),
                start_run=(start_page, first_line[0].reading_index),
            )
        )
    return items


def extract_caption_keys(doc: PageGraph, regions: list[Region]) -> list[CaptionKey]:
    """Caption keys from Text regions opening with Table/Figure/Equation keywords."""
    keys: list[CaptionKey] = []
    ordered = sorted(regions, key=region_sort_key)
    for region in ordered:
        if region.category is not RegionCategory.TEXT or not region.member_runs:
            continue
        page = doc.pages[region.page]
        runs = region_runs(region, page)
        first = min(runs, key=lambda r: r.reading_index)
        m = CAPTION_RE.match(first.text)
        if not m:
            # the keyword and its number may sit in separate runs
            first_line = split_lines(runs)[0]
            m = CAPTION_RE.match(line_text(first_line))
        if not m:
            continue
        kind = _CAPTION_KINDS[m.group(1).lower()]
        token = m.group(2)
        anchor = _nearest_anchor(region, kind, ordered)
        keys.append(
            CaptionKey(
                kind=kind,
                number_token=token,
                key=f"{kind} {token}",
                region=region,
                anchor_region=anchor,
            )
        )
    seen: set[tuple[str, str]] = set()
    for key in keys:
        pair = (key.kind, key.number_token)
        if pair in seen:
            warnings.warn(f"duplicate caption key {key.key}", DuplicateKey, stacklevel=2)
        seen.add(pair)
    return keys


def _vertical_gap(a: Box, b: Box) -> float:
    if b.y0 > a.y1:
        return b.y0 - a.y1
    if a.y0 > b.y1:
        return a.y0 - b.y1
    return 0.0


def _nearest_anchor(caption: Region, kind: str, regions: list[Region]) -> Region | None:
    candidates = [
        r
        for r in regions
        if r.page == caption.page and r.category.value == kind and r is not caption
    ]
    if not candidates:
        return None
    return min(candidates, key=lambda r: (_vertical_gap(caption.bbox, r.bbox), r.bbox.y0, r.bbox.x0))


def detect_footnote_markers(
    doc: PageGraph, regions: list[Region], *, band: float = FOOTNOTE_BAND
) -> list[FootnoteMarker]:
    """Superscript digit/symbol runs, joined to a bottom-of-page region that
    repeats the marker."""
    markers: list[FootnoteMarker] = []
    for page in doc.pages:
        bottoms = [
            r
            for r in regions
            if r.page == page.index
            and r.member_runs
            and r.bbox.y0 > band * page.height
        ]
        bottoms.sort(key=lambda r: (r.bbox.y0, r.bbox.x0))
        for run in page.runs_in_order():
            if not run.superscript:
                continue
            text = run.text.strip()
            if not (re.fullmatch(r"\d{1,2}", text) or text in FOOTNOTE_SYMBOLS):
                continue
            footnote = None
            for region in bottoms:
                lead = min(region_runs(region, page), key=lambda r: r.reading_index)
                if _leads_with_marker(lead.text.strip(), text):
                    footnote = region
                    break
            markers.append(
                FootnoteMarker(
                    marker_text=text,
                    in_text=(page.index, run.reading_index),
                    footnote_region=footnote,
                )
            )
    return markers


def _leads_with_marker(lead: str, marker: str) -> bool:
    if lead == marker:
        return True
    if not lead.startswith(marker):
        return False
    rest = lead[len(marker) :]
    # digits need a boundary so marker "1" cannot claim a "12 ..." block;
    # symbol markers are unambiguous
    if marker[0].isdigit():
        return not rest[0].isalnum()
    return True


def detect_equation_tags(doc: PageGraph, regions: list[Region]) -> list[CaptionKey]:
    """Equation keys from right-aligned trailing "(n)" tags on Equation regions."""
    keys = []
    for region in sorted(regions, key=region_sort_key):
        if region.category is not RegionCategory.EQUATION or not region.member_runs:
            continue
        page = doc.pages[region.page]
        last = max(region_runs(region, page), key=lambda r: r.reading_index)
        m = EQUATION_TAG_RE.search(last.text)
        if not m or last.bbox.x1 < region.bbox.x1 - EQUATION_TAG_MARGIN:
            continue
        keys.append(
            CaptionKey(
                kind="Equation",
                number_token=m.group(1),
                key=f"Equation {m.group(1)}",
                region=region,
            )
        )
    return keys
