"""Deterministic synthetic documents with known reference structure.

The generator lays out body paragraphs, section titles, a references title
and a marker-styled bibliography on a fixed grid, then returns the document
together with the ground truth it was built from. Geometry is chosen so the
heuristic pipeline has no excuse: line leading sits inside the block-merge
threshold, titles sit outside it, column breaks never split an item, and
every line is padded flush to its column so no accidental gutter appears.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import Overflow
from .jsonio import canonical_bytes
from .links import ResolvedReference
from .pagegraph import (
    Box,
    LinkAnnotation,
    Page,
    PageGraph,
    TextRun,
    mark_superscripts,
    reading_order,
    serialize_pagegraph,
    union_all,
)
from .refitems import ReferenceItem
from .rng import SplitMix, splitmix64

PAGE_W, PAGE_H = 612.0, 792.0
MARGIN = 72.0
BODY_FONT = 10.0
TITLE_FONT = 14.0
LEADING = 12.0
PARA_EXTRA = 8.0  # paragraph gap 20 pt > merge limit 16
TITLE_EXTRA_BEFORE = 12.0  # gap into a title 24 pt > 16
TITLE_ADVANCE = 28.0  # gap out of a title 28 pt > 1.6 x 14
CHAR_W = 0.5  # em fraction per character
ASCENT = 0.72
DESCENT = 0.21
COLUMN_GAP = 20.0
WRAP_INDENT = 10.0
SPACE = 5.0  # gap between runs at body size; below the 6 pt gutter minimum

MARKER_STYLES = ("bracket", "dot", "paren")
WRAP_LEVELS = (0.0, 0.5, 1.0)

_WORDS = (
    "alpha", "bravo", "cadence", "delta", "ember", "fjord", "glacier", "harbor",
    "isotope", "juniper", "kelvin", "lattice", "meridian", "nimbus", "orchid",
    "prairie", "quartz", "rubric", "sonata", "tundra", "umbra", "vertex",
    "willow", "xenon", "yonder", "zephyr", "basalt", "cirrus", "dynamo",
    "estuary", "fresco", "gamut", "hollow", "ingot", "jetsam", "krill",
)

_BODY_TITLES = ("Overview", "Method Details", "Related Work", "Closing Notes")
_SECTION_TITLES = ("References", "Bibliography")


@dataclass(frozen=True, slots=True)
class SynthSpec:
    seed: int
    n_pages: int = 1
    n_items: int = 5
    n_citations: int = 4
    columns: int = 1
    marker_style: str = "bracket"
    wrap_probability: float = 0.0


@dataclass(slots=True)
class ExpectedAnnotations:
    """The ground truth a generated document was built from."""

    items: list[ReferenceItem]
    links: list[ResolvedReference]


def _marker_text(style: str, number: int) -> str:
    if style == "bracket":
        return f"[{number}]"
    if style == "dot":
        return f"{number}."
    if style == "paren":
        return f"({number})"
    raise ValueError(f"unknown marker style {style!r}")


def _columns(n: int) -> list[tuple[float, float]]:
    if n == 1:
        return [(MARGIN, PAGE_W - MARGIN)]
    width = (PAGE_W - 2 * MARGIN - COLUMN_GAP) / 2
    return [(MARGIN, MARGIN + width), (MARGIN + width + COLUMN_GAP, PAGE_W - MARGIN)]


_FIRST_BASELINE = MARGIN + ASCENT * BODY_FONT
_LAST_BASELINE = PAGE_H - MARGIN - DESCENT * BODY_FONT


@dataclass(slots=True)
class _Slot:
    page: int
    x0: float
    x1: float
    baseline: float


@dataclass(slots=True)
class _Plan:
    pages_used: int
    body_slots: list[_Slot] = field(default_factory=list)
    title_slots: list[tuple[_Slot, bool]] = field(default_factory=list)  # (slot, is_references)
    item_slots: list[list[_Slot]] = field(default_factory=list)  # per item, per line


class _Flow:
    """Column-major cursor over the page grid; titles break to full width."""

    def __init__(self, columns: list[tuple[float, float]]):
        self.columns = columns
        self.page = 0
        self.col = 0
        self.baseline = _FIRST_BASELINE
        self.band_start = _FIRST_BASELINE  # columns restart here after a title
        self.page_max = 0.0  # lowest baseline placed anywhere on the page

    def _next_column(self) -> None:
        self.col += 1
        if self.col >= len(self.columns):
            self._next_page()
        else:
            self.baseline = self.band_start

    def _next_page(self) -> None:
        self.page += 1
        self.col = 0
        self.baseline = _FIRST_BASELINE
        self.band_start = _FIRST_BASELINE
        self.page_max = 0.0

    def ensure_room(self, n_lines: int) -> None:
        """Advance until n_lines of body leading fit in the current column."""
        while self.baseline + (n_lines - 1) * LEADING > _LAST_BASELINE:
            self._next_column()

    def line(self) -> _Slot:
        self.ensure_room(1)
        x0, x1 = self.columns[self.col]
        slot = _Slot(self.page, x0, x1, self.baseline)
        self.page_max = max(self.page_max, self.baseline)
        self.baseline += LEADING
        return slot

    def paragraph_gap(self) -> None:
        self.baseline += PARA_EXTRA

    def title(self) -> _Slot:
        baseline = max(self.baseline, self.page_max + LEADING) + TITLE_EXTRA_BEFORE
        if self.page_max == 0.0:  # empty page: start at the top
            baseline = MARGIN + ASCENT * TITLE_FONT
        if baseline + TITLE_ADVANCE > _LAST_BASELINE:  # keep at least one line under it
            self._next_page()
            baseline = MARGIN + ASCENT * TITLE_FONT
        slot = _Slot(self.page, MARGIN, PAGE_W - MARGIN, baseline)
        self.page_max = baseline
        self.band_start = baseline + TITLE_ADVANCE
        self.col = 0
        self.baseline = self.band_start
        return slot


def _para_sizes(seed: int, count_limit: int) -> list[int]:
    rng = SplitMix(splitmix64(seed, 0x50415241))
    return [rng.randint(3, 6) for _ in range(count_limit)]


def _item_line_counts(spec: SynthSpec) -> list[int]:
    rng = SplitMix(splitmix64(spec.seed, 0x57524150))
    return [2 if rng.random() < spec.wrap_probability else 1 for _ in range(spec.n_items)]


def _layout(spec: SynthSpec, body_lines: int, line_counts: list[int]) -> _Plan:
    """Place everything on the grid; does not fill in any text."""
    if spec.columns == 2:
        return _layout_two_col(spec, body_lines, line_counts)
    return _layout_one_col(spec, body_lines, line_counts)


def _layout_one_col(spec: SynthSpec, body_lines: int, line_counts: list[int]) -> _Plan:
    flow = _Flow(_columns(1))
    plan = _Plan(pages_used=0)
    sizes = _para_sizes(spec.seed, body_lines + 1)
    # a body section title after the first and third paragraphs, when present
    title_after = {1, 3}
    remaining = body_lines
    para_no = 0
    while remaining > 0:
        size = min(sizes[para_no % len(sizes)], remaining)
        for _ in range(size):
            plan.body_slots.append(flow.line())
        remaining -= size
        para_no += 1
        if remaining > 0:
            flow.paragraph_gap()
            if para_no in title_after:
                plan.title_slots.append((flow.title(), False))
    plan.title_slots.append((flow.title(), True))
    for lines in line_counts:
        flow.ensure_room(lines)  # no widows: an item never splits across columns
        plan.item_slots.append([flow.line() for _ in range(lines)])
    plan.pages_used = flow.page + 1
    return plan


def _layout_two_col(spec: SynthSpec, body_lines: int, line_counts: list[int]) -> _Plan:
    """Two-column layout tuned so no page has a sparse column.

    Full body pages first, then a column-balanced body band on the title
    page, the full-width references title below it, and items column-major
    in the remaining band. The caller maximizes body_lines, which squeezes
    the item band so both its columns end up filled.
    """
    cols = _columns(2)
    rows = int((_LAST_BASELINE - _FIRST_BASELINE) / LEADING) + 1
    per_page = 2 * rows
    plan = _Plan(pages_used=0)

    full_pages, band = divmod(body_lines, per_page)
    for page in range(full_pages):
        for x0, x1 in cols:
            for row in range(rows):
                plan.body_slots.append(_Slot(page, x0, x1, _FIRST_BASELINE + row * LEADING))
    title_page = full_pages
    band_split = (band + 1) // 2
    for (x0, x1), n in zip(cols, (band_split, band - band_split)):
        for row in range(n):
            plan.body_slots.append(_Slot(title_page, x0, x1, _FIRST_BASELINE + row * LEADING))
    if band == 0:
        title_baseline = MARGIN + ASCENT * TITLE_FONT
    else:
        band_bottom = _FIRST_BASELINE + (band_split - 1) * LEADING
        title_baseline = band_bottom + LEADING + TITLE_EXTRA_BEFORE
    if title_baseline + TITLE_ADVANCE > _LAST_BASELINE:
        title_page += 1
        title_baseline = MARGIN + ASCENT * TITLE_FONT
    plan.title_slots.append(
        (_Slot(title_page, MARGIN, PAGE_W - MARGIN, title_baseline), True)
    )

    page, col = title_page, 0
    band_top = title_baseline + TITLE_ADVANCE
    baseline = band_top

    def advance_column() -> None:
        nonlocal page, col, baseline
        col += 1
        if col >= 2:
            page += 1
            col = 0
        baseline = band_top if page == title_page else _FIRST_BASELINE

    for lines in line_counts:
        while baseline + (lines - 1) * LEADING > _LAST_BASELINE:
            advance_column()  # no widows: an item never splits across columns
        x0, x1 = cols[col]
        slots = []
        for _ in range(lines):
            slots.append(_Slot(page, x0, x1, baseline))
            baseline += LEADING
        plan.item_slots.append(slots)
    plan.pages_used = page + 1
    return plan


def _feasible_body_lines(spec: SynthSpec, line_counts: list[int]) -> tuple[int, int]:
    minimum = max(1, (spec.n_citations + 1) // 2)
    cap = 2 * len(_columns(spec.columns)) * spec.n_pages * int(
        (PAGE_H - 2 * MARGIN) / LEADING
    )
    lo = None
    hi = None
    for b in range(minimum, cap + 1):
        pages = _layout(spec, b, line_counts).pages_used
        if pages == spec.n_pages:
            if lo is None:
                lo = b
            hi = b
        elif pages > spec.n_pages:
            break
    if lo is None or hi is None:
        raise Overflow(
            f"{spec.n_items} items / {spec.n_citations} citations do not fit "
            f"{spec.n_pages} page(s) at {spec.columns} column(s)"
        )
    return lo, hi


def _run(text: str, x: float, baseline: float, font: float) -> TextRun:
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


_SHORT_WORDS = tuple(w for w in _WORDS if len(w) <= 5)


def _fill_line(
    slot: _Slot,
    rng: SplitMix,
    lead_tokens: list[str],
    indent: float = 0.0,
    cite_texts: list[str] | None = None,
) -> tuple[list[TextRun], list[TextRun]]:
    """Fill a slot with runs: lead tokens, citations interleaved with short
    words, then filler words padded flush to x1. Returns (runs, citation runs).
    """
    tokens: list[tuple[str, bool]] = [(t, False) for t in lead_tokens]
    for text in cite_texts or []:
        tokens.append((text, True))
        tokens.append((rng.choice(_SHORT_WORDS), False))
    runs: list[TextRun] = []
    cite_runs: list[TextRun] = []
    x = slot.x0 + indent
    queue = list(tokens)
    while True:
        if queue:
            token, is_cite = queue.pop(0)
        else:
            token, is_cite = rng.choice(_WORDS), False
        width = len(token) * CHAR_W * BODY_FONT
        if x + width > slot.x1:
            if is_cite:
                raise Overflow("citation does not fit its line")
            break
        run = _run(token, x, slot.baseline, BODY_FONT)
        runs.append(run)
        if is_cite:
            cite_runs.append(run)
        x += width + SPACE
    # pad the tail flush to the column edge so right margins stay aligned
    remaining = int((slot.x1 - x) / (CHAR_W * BODY_FONT))
    if remaining >= 2:
        runs.append(_run("x" * remaining, x, slot.baseline, BODY_FONT))
    return runs, cite_runs


def generate_document(spec: SynthSpec) -> tuple[PageGraph, ExpectedAnnotations]:
    """Build one document and the ground truth it encodes.

    Same spec, same bytes: every choice flows from splitmix streams keyed by
    the seed. Raises Overflow when the bibliography and citations cannot fit
    the page budget.
    """
    if spec.n_items < 1:
        raise ValueError("n_items must be >= 1")
    if spec.n_citations < 0:
        raise ValueError("n_citations must be >= 0")
    if spec.columns not in (1, 2):
        raise ValueError("columns must be 1 or 2")
    if spec.marker_style not in MARKER_STYLES:
        raise ValueError(f"unknown marker style {spec.marker_style!r}")
    if not 0.0 <= spec.wrap_probability <= 1.0:
        raise ValueError("wrap_probability must be in [0, 1]")
    if spec.n_pages < 1:
        raise ValueError("n_pages must be >= 1")

    line_counts = _item_line_counts(spec)
    lo, hi = _feasible_body_lines(spec, line_counts)
    if spec.columns == 2:
        # maximal body squeezes the item band so both its columns fill up;
        # anything sparser risks a fake whitespace gutter through a column
        body_lines = hi
    else:
        pick = SplitMix(splitmix64(spec.seed, 0x424F4459))
        body_lines = lo + pick.below(hi - lo + 1)
    plan = _layout(spec, body_lines, line_counts)

    pages = [Page(index=i, width=PAGE_W, height=PAGE_H) for i in range(spec.n_pages)]

    words_rng = SplitMix(splitmix64(spec.seed, 0x574F5244))
    title_rng = SplitMix(splitmix64(spec.seed, 0x5449544C))
    cite_rng = SplitMix(splitmix64(spec.seed, 0x43495445))

    # citations: which body line hosts each one, and which item it targets
    cite_targets = [cite_rng.below(spec.n_items) for _ in range(spec.n_citations)]
    per_slot: dict[int, list[int]] = {}
    for c in range(spec.n_citations):
        slot_no = cite_rng.below(len(plan.body_slots))
        while len(per_slot.get(slot_no, [])) >= 2:
            slot_no = (slot_no + 1) % len(plan.body_slots)
        per_slot.setdefault(slot_no, []).append(c)

    cite_run_by_ordinal: dict[int, tuple[int, TextRun]] = {}
    for slot_no, slot in enumerate(plan.body_slots):
        ordinals = per_slot.get(slot_no, [])
        lead = [words_rng.choice(_SHORT_WORDS)]  # a citation never opens a line
        runs, cite_runs = _fill_line(
            slot,
            words_rng,
            lead,
            cite_texts=[f"[{cite_targets[o] + 1}]" for o in ordinals],
        )
        for local, run in zip(ordinals, cite_runs):
            cite_run_by_ordinal[local] = (slot.page, run)
        pages[slot.page].runs.extend(runs)

    for slot, is_references in plan.title_slots:
        text = title_rng.choice(_SECTION_TITLES) if is_references else title_rng.choice(_BODY_TITLES)
        width = len(text) * CHAR_W * TITLE_FONT
        x0 = (PAGE_W - width) / 2.0
        pages[slot.page].runs.append(_run(text, x0, slot.baseline, TITLE_FONT))

    item_runs: list[list[tuple[int, TextRun]]] = []
    marker_runs: list[TextRun] = []
    marker_pages: list[int] = []
    for i, slots in enumerate(plan.item_slots):
        collected: list[tuple[int, TextRun]] = []
        for line_no, slot in enumerate(slots):
            if line_no == 0:
                lead = [_marker_text(spec.marker_style, i + 1), words_rng.choice(_WORDS)]
                runs, _ = _fill_line(slot, words_rng, lead)
                marker_runs.append(runs[0])
                marker_pages.append(slot.page)
            else:
                runs, _ = _fill_line(slot, words_rng, [words_rng.choice(_WORDS)], indent=WRAP_INDENT)
            collected.extend((slot.page, r) for r in runs)
            pages[slot.page].runs.extend(runs)
        item_runs.append(collected)

    links: list[LinkAnnotation] = []
    for ordinal in range(spec.n_citations):
        source_page, run = cite_run_by_ordinal[ordinal]
        target = cite_targets[ordinal]
        marker = marker_runs[target]
        links.append(
            LinkAnnotation(
                source_page=source_page,
                source_rect=run.bbox,
                target_page=marker_pages[target],
                target_point=(round(marker.bbox.x0 + 1.0, 3), round(marker.baseline_y - 1.0, 3)),
                kind="internal",
            )
        )
    for link in links:
        pages[link.source_page].links.append(link)

    graph = PageGraph(source_id=f"synth-{spec.seed}", pages=pages)
    for page in graph.pages:
        reading_order(page)
        mark_superscripts(page)

    expected_items = []
    for i, collected in enumerate(item_runs):
        per_page: dict[int, list[Box]] = {}
        for page_no, run in collected:
            per_page.setdefault(page_no, []).append(run.bbox)
        lines_text: list[str] = []
        for slot_runs in _group_runs_by_line(collected):
            lines_text.append(" ".join(r.text for r in slot_runs))
        expected_items.append(
            ReferenceItem(
                item_id=i,
                explicit_key=_marker_text(spec.marker_style, i + 1),
                boxes=[(p, union_all(bs)) for p, bs in sorted(per_page.items())],
                text=" ".join(lines_text),
                start_run=(marker_pages[i], marker_runs[i].reading_index),
            )
        )
    expected_links = [
        ResolvedReference(
            link=link,
            implicit_key=f"[{cite_targets[ordinal] + 1}]",
            target_item=cite_targets[ordinal],
            distance=0.0,
        )
        for ordinal, link in enumerate(links)
    ]
    return graph, ExpectedAnnotations(items=expected_items, links=expected_links)


def _group_runs_by_line(collected: list[tuple[int, TextRun]]) -> list[list[TextRun]]:
    lines: dict[tuple[int, float], list[TextRun]] = {}
    for page_no, run in collected:
        lines.setdefault((page_no, run.baseline_y), []).append(run)
    out = []
    for key in sorted(lines):
        out.append(sorted(lines[key], key=lambda r: r.bbox.x0))
    return out


def corpus_spec(seed: int) -> SynthSpec:
    """Spec for one corpus document; cycles styles/columns/wrap across seeds."""
    rng = SplitMix(splitmix64(seed, 0x434F5250))
    return SynthSpec(
        seed=seed,
        n_pages=rng.randint(1, 2),
        n_items=rng.randint(4, 12),
        n_citations=rng.randint(3, 10),
        columns=1 + (seed // 3) % 2,
        marker_style=MARKER_STYLES[seed % 3],
        wrap_probability=WRAP_LEVELS[(seed // 6) % 3],
    )


def generate_corpus(base_seed: int, count: int) -> list[tuple[PageGraph, ExpectedAnnotations]]:
    """count documents with seeds base_seed..base_seed+count-1."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return [generate_document(corpus_spec(base_seed + k)) for k in range(count)]


def expected_to_json(expected: ExpectedAnnotations, source_id: str) -> bytes:
    doc = {
        "source_id": source_id,
        "items": [
            {
                "item_id": item.item_id,
                "explicit_key": item.explicit_key,
                "text": item.text,
                "boxes": [{"page": p, "bbox": b.as_list()} for p, b in item.boxes],
            }
            for item in expected.items
        ],
        "links": [
            {
                "implicit_key": ref.implicit_key,
                "source": {
                    "page": ref.link.source_page,
                    "rect": ref.link.source_rect.as_list(),
                },
                "target_item": ref.target_item,
                "distance": ref.distance,
            }
            for ref in expected.links
        ],
    }
    return canonical_bytes(doc)


def write_document(out_dir, graph: PageGraph, expected: ExpectedAnnotations) -> list:
    """Write <source_id>.pagegraph.json and <source_id>.expected.json."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    graph_path = out_dir / f"{graph.source_id}.pagegraph.json"
    expected_path = out_dir / f"{graph.source_id}.expected.json"
    graph_path.write_bytes(serialize_pagegraph(graph))
    expected_path.write_bytes(expected_to_json(expected, graph.source_id))
    return [graph_path, expected_path]
