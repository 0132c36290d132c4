"""Page segmentation into the six region categories.

Heuristic text-block clustering and classification stand in for an ML
segmenter; outputs of such a model can be brought in through
import_regions and are interchangeable with the heuristic regions
everywhere downstream.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .errors import PageOutOfRange, SchemaViolation, UnknownCategory
from .jsonio import load_json
from .pagegraph import Box, Page, PageGraph, TextRun, dominant_font_size, union_all
from .pagegraph.order import LINE_GAP_RATIO


class RegionCategory(str, Enum):
    TEXT = "Text"
    TITLE = "Title"
    LIST = "List"
    TABLE = "Table"
    FIGURE = "Figure"
    EQUATION = "Equation"


@dataclass(slots=True)
class Region:
    """A categorized layout block; member_runs are reading indices."""

    page: int
    bbox: Box
    category: RegionCategory
    confidence: float = 1.0
    member_runs: list[int] = field(default_factory=list)


@dataclass(frozen=True, slots=True)
class DocStats:
    """Document-level font statistics; body_size is the modal run font size."""

    body_size: float

    @classmethod
    def from_document(cls, doc: PageGraph) -> "DocStats":
        counts = Counter(run.font_size for _, run in doc.iter_runs())
        if not counts:
            return cls(body_size=10.0)
        top = max(counts.values())
        return cls(body_size=max(size for size, n in counts.items() if n == top))


# block merging
LINE_MERGE_GAP_FACTOR = 1.6
LINE_MERGE_MIN_OVERLAP = 0.3
# classification; the list fraction admits fully-wrapped bibliographies where
# exactly every second line opens an item
TITLE_FONT_RATIO = 1.15
LIST_LINE_FRACTION = 0.5
EQUATION_TAG_MARGIN = 10.0
MATH_GLYPH_FRACTION = 0.5

# anchored at line start: [n] | (n) | n. | n) with n of 1-3 digits
START_MARKER_RE = re.compile(r"^\s*(?:\[(\d{1,3})\]|\((\d{1,3})\)|(\d{1,3})\.|(\d{1,3})\))(?:\s|$)")
_EQ_TAG_RE = re.compile(r"\((\d{1,4})\)\s*$")


def split_lines(runs: list[TextRun]) -> list[list[TextRun]]:
    """Group reading-order-consecutive runs into visual lines."""
    lines: list[list[TextRun]] = []
    for run in sorted(runs, key=lambda r: r.reading_index):
        if lines:
            prev = lines[-1][-1]
            gap = abs(run.baseline_y - prev.baseline_y)
            if gap <= LINE_GAP_RATIO * max(run.font_size, prev.font_size):
                lines[-1].append(run)
                continue
        lines.append([run])
    return lines


def line_text(line: list[TextRun]) -> str:
    return " ".join(run.text for run in line)


def _line_extent(line: list[TextRun]) -> tuple[float, float]:
    return min(r.bbox.x0 for r in line), max(r.bbox.x1 for r in line)


def cluster_blocks(
    page: Page,
    *,
    gap_factor: float = LINE_MERGE_GAP_FACTOR,
    min_overlap: float = LINE_MERGE_MIN_OVERLAP,
) -> list[Region]:
    """Partition the page's runs into Text regions.

    Consecutive lines merge while their baseline gap stays within gap_factor
    x the previous line's dominant font size and their x-extents overlap by
    at least min_overlap of the narrower line.
    """
    lines = split_lines(page.runs)
    blocks: list[list[list[TextRun]]] = []
    for line in lines:
        if blocks:
            prev = blocks[-1][-1]
            gap = abs(_dominant_baseline_of_line(line) - _dominant_baseline_of_line(prev))
            limit = gap_factor * dominant_font_size(prev)
            a0, a1 = _line_extent(prev)
            b0, b1 = _line_extent(line)
            overlap = min(a1, b1) - max(a0, b0)
            narrower = min(a1 - a0, b1 - b0)
            if gap <= limit and narrower > 0 and overlap / narrower >= min_overlap:
                blocks[-1].append(line)
                continue
        blocks.append([line])
    regions = []
    for block in blocks:
        runs = [run for line in block for run in line]
        regions.append(
            Region(
                page=page.index,
                bbox=union_all([r.bbox for r in runs]),
                category=RegionCategory.TEXT,
                member_runs=sorted(r.reading_index for r in runs),
            )
        )
    return regions


def _dominant_baseline_of_line(line: list[TextRun]) -> float:
    font = dominant_font_size(line)
    candidates = [r for r in line if r.font_size == font]
    return min(r.baseline_y for r in candidates)


def _is_math_char(ch: str) -> bool:
    if "Ͱ" <= ch <= "Ͽ":  # Greek
        return True
    return unicodedata.category(ch) == "Sm"


def region_runs(region: Region, page: Page) -> list[TextRun]:
    by_index = {r.reading_index: r for r in page.runs}
    return [by_index[i] for i in region.member_runs if i in by_index]


def classify_region(
    region: Region,
    page: Page,
    stats: DocStats,
    *,
    title_ratio: float = TITLE_FONT_RATIO,
    list_fraction: float = LIST_LINE_FRACTION,
    tag_margin: float = EQUATION_TAG_MARGIN,
    math_fraction: float = MATH_GLYPH_FRACTION,
) -> RegionCategory:
    """Categorize a clustered block; Table/Figure only ever arrive via import."""
    runs = region_runs(region, page)
    if not runs:
        return RegionCategory.TEXT
    lines = split_lines(runs)
    dom = dominant_font_size(runs)
    if len(lines) <= 2 and dom >= title_ratio * stats.body_size:
        return RegionCategory.TITLE
    marker_lines = sum(1 for line in lines if START_MARKER_RE.match(line_text(line)))
    if marker_lines / len(lines) >= list_fraction:
        return RegionCategory.LIST
    last_run = max(runs, key=lambda r: r.reading_index)
    if _EQ_TAG_RE.search(last_run.text) and last_run.bbox.x1 >= region.bbox.x1 - tag_margin:
        return RegionCategory.EQUATION
    glyphs = [ch for run in runs for ch in run.text if not ch.isspace()]
    if glyphs and sum(1 for ch in glyphs if _is_math_char(ch)) / len(glyphs) >= math_fraction:
        return RegionCategory.EQUATION
    return RegionCategory.TEXT


def analyze_page(page: Page, stats: DocStats) -> list[Region]:
    regions = cluster_blocks(page)
    for region in regions:
        region.category = classify_region(region, page, stats)
    return regions


def analyze_document(doc: PageGraph, stats: DocStats | None = None) -> list[Region]:
    """Heuristic segmentation for every page, in page order."""
    stats = stats or DocStats.from_document(doc)
    regions: list[Region] = []
    for page in doc.pages:
        regions.extend(analyze_page(page, stats))
    return regions


def import_regions(doc: PageGraph, data: bytes | str) -> list[Region]:
    """Load an external segmentation (e.g. an ML model's output).

    Boxes, categories and confidences are taken as given; member_runs are
    back-filled with every run whose box center lies inside the region.
    """
    try:
        raw = load_json(data)
    except ValueError as exc:
        raise SchemaViolation("$", f"not valid JSON: {exc}", module="layout") from exc
    if not isinstance(raw, dict) or not isinstance(raw.get("regions"), list):
        raise SchemaViolation("$", "expected {source_id, regions: [...]}", module="layout")
    source_id = raw.get("source_id")
    if source_id is not None and source_id != doc.source_id:
        raise SchemaViolation(
            "source_id", f"segmentation is for {source_id!r}, document is {doc.source_id!r}",
            module="layout",
        )
    valid = {c.value for c in RegionCategory}
    regions = []
    for i, rraw in enumerate(raw["regions"]):
        path = f"regions[{i}]"
        if not isinstance(rraw, dict):
            raise SchemaViolation(path, "expected an object", module="layout")
        category = rraw.get("category")
        if category not in valid:
            raise UnknownCategory(str(category))
        page_no = rraw.get("page")
        if not isinstance(page_no, int) or isinstance(page_no, bool):
            raise SchemaViolation(f"{path}.page", "expected an integer", module="layout")
        if not 0 <= page_no < len(doc.pages):
            raise PageOutOfRange(f"{path}.page: {page_no} not in 0..{len(doc.pages) - 1}")
        bbox_raw = rraw.get("bbox")
        if (
            not isinstance(bbox_raw, list)
            or len(bbox_raw) != 4
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in bbox_raw)
        ):
            raise SchemaViolation(f"{path}.bbox", "expected [x0, y0, x1, y1]", module="layout")
        bbox = Box(*map(float, bbox_raw))
        if bbox.x0 >= bbox.x1 or bbox.y0 >= bbox.y1:
            raise SchemaViolation(f"{path}.bbox", f"degenerate box {bbox_raw}", module="layout")
        confidence = rraw.get("confidence", 1.0)
        if isinstance(confidence, bool) or not isinstance(confidence, (int, float)):
            raise SchemaViolation(f"{path}.confidence", "expected a number", module="layout")
        if not 0.0 <= confidence <= 1.0:
            raise SchemaViolation(f"{path}.confidence", f"{confidence} not in [0, 1]", module="layout")
        page = doc.pages[page_no]
        members = sorted(
            run.reading_index
            for run in page.runs
            if bbox.contains_point(*run.bbox.center)
        )
        regions.append(
            Region(
                page=page_no,
                bbox=bbox,
                category=RegionCategory(category),
                confidence=float(confidence),
                member_runs=members,
            )
        )
    return regions


def region_sort_key(region: Region) -> tuple:
    """Reading-order position of a region; run-less regions order by geometry."""
    if region.member_runs:
        return (region.page, 0, region.member_runs[0], region.bbox.y0)
    return (region.page, 1, 0, region.bbox.y0)


def region_text(region: Region, doc: PageGraph) -> str:
    page = doc.pages[region.page]
    return " ".join(run.text for run in sorted(region_runs(region, page), key=lambda r: r.reading_index))
