"""Reading order and superscript annotation passes.

Both passes mutate the page in place and are idempotent; everything after
them treats the PageGraph as immutable.
"""

from __future__ import annotations

from collections import Counter

from .model import Page, TextRun

#: a column gutter must be whitespace over at least this share of the text band
GUTTER_COVERAGE = 0.8
#: and at least this wide, so accidental hairline alignments don't split a page
GUTTER_MIN_WIDTH = 6.0

SUPERSCRIPT_SIZE_RATIO = 0.75
SUPERSCRIPT_RISE_RATIO = 0.30
LINE_GAP_RATIO = 0.4


def _quantize2(y: float) -> float:
    return round(y / 2.0) * 2.0


def _interval_union_measure(intervals: list[tuple[float, float]]) -> float:
    if not intervals:
        return 0.0
    intervals.sort()
    total = 0.0
    cur_lo, cur_hi = intervals[0]
    for lo, hi in intervals[1:]:
        if lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    total += cur_hi - cur_lo
    return total


def _find_gutter(runs: list[TextRun]) -> float | None:
    """Locate the widest whitespace gutter splitting the page in two columns.

    A candidate vertical strip qualifies when no run crosses it for at least
    GUTTER_COVERAGE of the text band height. Returns the split x, or None
    for a single-column page.
    """
    band_y0 = min(r.bbox.y0 for r in runs)
    band_y1 = max(r.bbox.y1 for r in runs)
    band_h = band_y1 - band_y0
    if band_h <= 0:
        return None
    edges = sorted({r.bbox.x0 for r in runs} | {r.bbox.x1 for r in runs})
    best: tuple[float, float, float] | None = None  # (width, a, b)
    for a, b in zip(edges, edges[1:]):
        width = b - a
        if width < GUTTER_MIN_WIDTH:
            continue
        covered = _interval_union_measure(
            [
                (max(r.bbox.y0, band_y0), min(r.bbox.y1, band_y1))
                for r in runs
                if r.bbox.x0 < b and r.bbox.x1 > a
            ]
        )
        if band_h - covered < GUTTER_COVERAGE * band_h:
            continue
        # a gutter must separate text: some y range needs runs on both sides
        left = [(r.bbox.y0, r.bbox.y1) for r in runs if r.bbox.x1 <= a]
        right = [(r.bbox.y0, r.bbox.y1) for r in runs if r.bbox.x0 >= b]
        overlap = (
            _interval_union_measure(list(left))
            + _interval_union_measure(list(right))
            - _interval_union_measure(left + right)
        )
        if overlap <= 0.0:
            continue
        if best is None or width > best[0]:
            best = (width, a, b)
    if best is None:
        return None
    split = (best[1] + best[2]) / 2.0
    # membership by x0: full-width runs spanning the gutter read with the left
    # column, at their own y position
    left = [r for r in runs if r.bbox.x0 < split]
    if not left or len(left) == len(runs):
        return None
    return split


def reading_order(page: Page) -> list[TextRun]:
    """Assign reading_index to every run, column-major, and return them in order.

    Column detection: the widest whitespace gutter crossing >= 80% of the
    text band splits the page into two columns; otherwise one column.
    Within a column runs sort by (baseline quantized to 2 pt, then x0).
    """
    runs = page.runs
    if not runs:
        return []
    split = _find_gutter(runs) if len(runs) > 1 else None

    def column(run: TextRun) -> int:
        if split is None:
            return 0
        return 0 if run.bbox.x0 < split else 1

    ordered = sorted(runs, key=lambda r: (column(r), _quantize2(r.baseline_y), r.bbox.x0))
    for i, run in enumerate(ordered):
        run.reading_index = i
    page.runs[:] = ordered  # keep the stored order canonical
    return ordered


def baseline_clusters(runs: list[TextRun], gap_ratio: float = LINE_GAP_RATIO) -> list[list[TextRun]]:
    """Group runs into visual lines by baseline proximity.

    Two baseline-adjacent runs share a line when their gap is at most
    gap_ratio x the larger of the two font sizes; this lets a small raised
    superscript join the full-size line it annotates.
    """
    if not runs:
        return []
    ordered = sorted(runs, key=lambda r: (r.baseline_y, r.bbox.x0))
    clusters: list[list[TextRun]] = [[ordered[0]]]
    for prev, run in zip(ordered, ordered[1:]):
        gap = run.baseline_y - prev.baseline_y
        if gap <= gap_ratio * max(run.font_size, prev.font_size):
            clusters[-1].append(run)
        else:
            clusters.append([run])
    return clusters


def dominant_font_size(runs: list[TextRun]) -> float:
    counts = Counter(r.font_size for r in runs)
    top = max(counts.values())
    return max(size for size, n in counts.items() if n == top)


def _dominant_baseline(runs: list[TextRun], font: float) -> float:
    candidates = [r for r in runs if r.font_size == font] or runs
    counts = Counter(r.baseline_y for r in candidates)
    top = max(counts.values())
    return min(y for y, n in counts.items() if n == top)


def mark_superscripts(
    page: Page,
    *,
    size_ratio: float = SUPERSCRIPT_SIZE_RATIO,
    rise_ratio: float = SUPERSCRIPT_RISE_RATIO,
) -> int:
    """Flag raised small runs; returns how many were flagged.

    A run is a superscript when it is smaller than size_ratio x its line's
    dominant font size and its baseline sits at least rise_ratio x that size
    above the line's dominant baseline. All other runs get the flag cleared,
    so re-running the pass is idempotent.
    """
    count = 0
    for cluster in baseline_clusters(page.runs):
        font = dominant_font_size(cluster)
        baseline = _dominant_baseline(cluster, font)
        for run in cluster:
            rise = baseline - run.baseline_y
            flagged = run.font_size < size_ratio * font and rise >= rise_ratio * font
            run.superscript = flagged
            if flagged:
                count += 1
    return count
