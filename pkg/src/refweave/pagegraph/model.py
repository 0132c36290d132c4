"""Geometric document model: pages, positioned text runs, link annotations.

Coordinates are PDF points with a top-left origin (y grows downward), the
convention shared with the COCO records emitted downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Literal

from ..errors import SchemaViolation

#: slack allowed when checking run boxes against page bounds, in points
BOUNDS_SLACK = 1.0

LinkKind = Literal["internal", "external"]


@dataclass(frozen=True, slots=True)
class Box:
    """Axis-aligned rectangle, x0 < x1 and y0 < y1."""

    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0

    def contains_point(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def intersection(self, other: Box) -> Box | None:
        x0 = max(self.x0, other.x0)
        y0 = max(self.y0, other.y0)
        x1 = min(self.x1, other.x1)
        y1 = min(self.y1, other.y1)
        if x0 >= x1 or y0 >= y1:
            return None
        return Box(x0, y0, x1, y1)

    def union(self, other: Box) -> Box:
        return Box(
            min(self.x0, other.x0),
            min(self.y0, other.y0),
            max(self.x1, other.x1),
            max(self.y1, other.y1),
        )

    def distance_to_point(self, x: float, y: float) -> float:
        """Euclidean distance from (x, y) to the rectangle; 0 when inside."""
        dx = max(self.x0 - x, 0.0, x - self.x1)
        dy = max(self.y0 - y, 0.0, y - self.y1)
        return math.hypot(dx, dy)

    def as_list(self) -> list[float]:
        return [self.x0, self.y0, self.x1, self.y1]


def union_all(boxes: list[Box]) -> Box:
    out = boxes[0]
    for b in boxes[1:]:
        out = out.union(b)
    return out


@dataclass(slots=True)
class TextRun:
    """One positioned glyph cluster; single line, never empty."""

    text: str
    bbox: Box
    font_size: float
    baseline_y: float
    reading_index: int = -1
    superscript: bool = False


@dataclass(slots=True)
class LinkAnnotation:
    source_page: int
    source_rect: Box
    target_page: int
    target_point: tuple[float, float]
    kind: LinkKind

    # external links carry target_page = -1 and target_point = (0, 0)


@dataclass(slots=True)
class Page:
    index: int
    width: float
    height: float
    runs: list[TextRun] = field(default_factory=list)
    links: list[LinkAnnotation] = field(default_factory=list)

    def runs_in_order(self) -> list[TextRun]:
        return sorted(self.runs, key=lambda r: r.reading_index)


@dataclass(slots=True)
class PageGraph:
    source_id: str
    pages: list[Page] = field(default_factory=list)
    units: str = "pt"

    def iter_runs(self) -> Iterator[tuple[Page, TextRun]]:
        for page in self.pages:
            for run in page.runs:
                yield page, run


def _check(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaViolation(path, message)


def validate_box(box: Box, path: str) -> None:
    _check(box.x0 < box.x1, path, f"x0 must be < x1, got [{box.x0}, {box.x1}]")
    _check(box.y0 < box.y1, path, f"y0 must be < y1, got [{box.y0}, {box.y1}]")


def validate_pagegraph(graph: PageGraph) -> None:
    """Enforce the model invariants; raises SchemaViolation at the first break."""
    _check(isinstance(graph.source_id, str) and graph.source_id != "", "source_id", "must be a non-empty string")
    _check(graph.units == "pt", "units", f"must be 'pt', got {graph.units!r}")
    n_pages = len(graph.pages)
    for i, page in enumerate(graph.pages):
        p = f"pages[{i}]"
        _check(page.index == i, f"{p}.index", f"pages must be contiguous from 0, got {page.index}")
        _check(page.width > 0, f"{p}.width", "must be > 0")
        _check(page.height > 0, f"{p}.height", "must be > 0")
        seen = set()
        for j, run in enumerate(page.runs):
            rp = f"{p}.runs[{j}]"
            _check(bool(run.text), f"{rp}.text", "must be non-empty")
            _check("\n" not in run.text and "\r" not in run.text, f"{rp}.text", "must not contain line breaks")
            validate_box(run.bbox, f"{rp}.bbox")
            _check(run.font_size > 0, f"{rp}.font_size", "must be > 0")
            _check(
                run.bbox.x0 >= -BOUNDS_SLACK and run.bbox.x1 <= page.width + BOUNDS_SLACK,
                f"{rp}.bbox",
                f"outside page width {page.width}",
            )
            _check(
                run.bbox.y0 >= -BOUNDS_SLACK and run.bbox.y1 <= page.height + BOUNDS_SLACK,
                f"{rp}.bbox",
                f"outside page height {page.height}",
            )
            seen.add(run.reading_index)
        _check(
            seen == set(range(len(page.runs))),
            f"{p}.runs",
            "reading_index values must be a permutation of 0..n-1",
        )
        for j, link in enumerate(page.links):
            lp = f"{p}.links[{j}]"
            _check(link.kind in ("internal", "external"), f"{lp}.kind", f"unknown kind {link.kind!r}")
            _check(link.source_page == i, f"{lp}.source_page", "must equal the enclosing page index")
            validate_box(link.source_rect, f"{lp}.source_rect")
            if link.kind == "internal":
                _check(
                    0 <= link.target_page < n_pages,
                    f"{lp}.target_page",
                    f"must reference an existing page, got {link.target_page}",
                )
