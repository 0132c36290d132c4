"""Canonical PageGraph JSON: loader with invariant checks, deterministic writer."""

from __future__ import annotations

import json

from ..errors import SchemaViolation
from ..jsonio import canonical_bytes
from .model import Box, LinkAnnotation, Page, PageGraph, TextRun, validate_pagegraph


def serialize_pagegraph(graph: PageGraph) -> bytes:
    """Emit the canonical byte-deterministic JSON form.

    Runs are sorted by reading_index, links keep declaration order, numbers
    carry at most 3 decimals.
    """
    doc = {
        "source_id": graph.source_id,
        "units": graph.units,
        "pages": [
            {
                "index": page.index,
                "width": page.width,
                "height": page.height,
                "runs": [
                    {
                        "text": run.text,
                        "bbox": run.bbox.as_list(),
                        "font_size": run.font_size,
                        "baseline_y": run.baseline_y,
                        "reading_index": run.reading_index,
                        "superscript": run.superscript,
                    }
                    for run in page.runs_in_order()
                ],
                "links": [
                    {
                        "source_page": link.source_page,
                        "source_rect": link.source_rect.as_list(),
                        "target_page": link.target_page,
                        "target_point": list(link.target_point),
                        "kind": link.kind,
                    }
                    for link in page.links
                ],
            }
            for page in graph.pages
        ],
    }
    return canonical_bytes(doc)


def _require(obj: dict, key: str, kind, path: str):
    if key not in obj:
        raise SchemaViolation(f"{path}.{key}", "missing field")
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaViolation(f"{path}.{key}", f"expected a number, got {type(value).__name__}")
        return float(value)
    if kind is int and isinstance(value, bool):
        raise SchemaViolation(f"{path}.{key}", "expected an integer, got a bool")
    if not isinstance(value, kind):
        raise SchemaViolation(f"{path}.{key}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def parse_box(value, path: str) -> Box:
    if (
        not isinstance(value, list)
        or len(value) != 4
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
    ):
        raise SchemaViolation(path, "expected [x0, y0, x1, y1]")
    box = Box(*(float(v) for v in value))
    if box.x0 >= box.x1 or box.y0 >= box.y1:
        raise SchemaViolation(path, f"degenerate box {value}")
    return box


def load_pagegraph_json(data: bytes | str) -> PageGraph:
    """Parse and validate PageGraph JSON; SchemaViolation names the bad field."""
    try:
        raw = json.loads(data.decode("utf-8") if isinstance(data, bytes) else data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaViolation("$", f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaViolation("$", "top level must be an object")
    source_id = _require(raw, "source_id", str, "$")
    units = _require(raw, "units", str, "$")
    pages_raw = _require(raw, "pages", list, "$")
    pages = []
    for i, praw in enumerate(pages_raw):
        path = f"pages[{i}]"
        if not isinstance(praw, dict):
            raise SchemaViolation(path, "expected an object")
        page = Page(
            index=_require(praw, "index", int, path),
            width=_require(praw, "width", float, path),
            height=_require(praw, "height", float, path),
        )
        for j, rraw in enumerate(praw.get("runs", [])):
            rpath = f"{path}.runs[{j}]"
            if not isinstance(rraw, dict):
                raise SchemaViolation(rpath, "expected an object")
            superscript = rraw.get("superscript", False)
            if not isinstance(superscript, bool):
                raise SchemaViolation(f"{rpath}.superscript", "expected a bool")
            page.runs.append(
                TextRun(
                    text=_require(rraw, "text", str, rpath),
                    bbox=parse_box(_require(rraw, "bbox", list, rpath), f"{rpath}.bbox"),
                    font_size=_require(rraw, "font_size", float, rpath),
                    baseline_y=_require(rraw, "baseline_y", float, rpath),
                    reading_index=_require(rraw, "reading_index", int, rpath),
                    superscript=superscript,
                )
            )
        for j, lraw in enumerate(praw.get("links", [])):
            lpath = f"{path}.links[{j}]"
            if not isinstance(lraw, dict):
                raise SchemaViolation(lpath, "expected an object")
            kind = _require(lraw, "kind", str, lpath)
            if kind not in ("internal", "external"):
                raise SchemaViolation(f"{lpath}.kind", f"unknown kind {kind!r}")
            point = _require(lraw, "target_point", list, lpath)
            if len(point) != 2 or any(
                isinstance(v, bool) or not isinstance(v, (int, float)) for v in point
            ):
                raise SchemaViolation(f"{lpath}.target_point", "expected [x, y]")
            page.links.append(
                LinkAnnotation(
                    source_page=_require(lraw, "source_page", int, lpath),
                    source_rect=parse_box(
                        _require(lraw, "source_rect", list, lpath), f"{lpath}.source_rect"
                    ),
                    target_page=_require(lraw, "target_page", int, lpath),
                    target_point=(float(point[0]), float(point[1])),
                    kind=kind,
                )
            )
        pages.append(page)
    graph = PageGraph(source_id=source_id, pages=pages, units=units)
    validate_pagegraph(graph)
    return graph
