"""Implicit keys: embedded hyperlinks resolved to reference items."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import Unresolvable
from .pagegraph import LinkAnnotation, PageGraph
from .refitems import ReferenceItem, ReferenceSection

#: a run belongs to a link when at least this share of its area is covered
KEY_OVERLAP_FRACTION = 0.5


@dataclass(slots=True)
class ResolvedReference:
    """An internal link joined to the reference item nearest its target."""

    link: LinkAnnotation
    implicit_key: str
    target_item: int
    distance: float


def extract_links(doc: PageGraph) -> list[LinkAnnotation]:
    """All link annotations in stable (page, y0, x0) order."""
    links = [link for page in doc.pages for link in page.links]
    links.sort(key=lambda l: (l.source_page, l.source_rect.y0, l.source_rect.x0))
    return links


def _at_or_after_start(page: int, y: float, section: ReferenceSection) -> bool:
    start_page = section.start[0]
    return page > start_page or (page == start_page and y >= section.start_y)


def _before_end(page: int, y: float, section: ReferenceSection) -> bool:
    if section.end is None:
        return True
    end_page, end_y = section.end
    return page < end_page or (page == end_page and y < end_y)


def filter_bibliographic_links(
    links: list[LinkAnnotation], section: ReferenceSection
) -> list[LinkAnnotation]:
    """Keep internal links targeting the references section, dropping those
    whose source already sits inside it. Preserves input order; idempotent."""
    kept = []
    for link in links:
        if link.kind != "internal":
            continue
        tx, ty = link.target_point
        if not _at_or_after_start(link.target_page, ty, section):
            continue
        source_inside = _at_or_after_start(
            link.source_page, link.source_rect.y0, section
        ) and _before_end(link.source_page, link.source_rect.y0, section)
        if source_inside:
            continue
        kept.append(link)
    return kept


def resolve_link_target(
    link: LinkAnnotation, items: list[ReferenceItem], implicit_key: str = ""
) -> ResolvedReference:
    """Nearest reference item to the link's target point, on the target page.

    Distance is 0 inside an item's box, else the Euclidean point-to-rectangle
    distance; only boxes on the target page compete, and ties go to the
    smaller item_id.
    """
    if not items:
        raise Unresolvable("no reference items to resolve against")
    x, y = link.target_point
    best_distance = math.inf
    best_item: int | None = None
    for item in items:
        for page, box in item.boxes:
            if page != link.target_page:
                continue
            d = box.distance_to_point(x, y)
            if d < best_distance:
                best_distance = d
                best_item = item.item_id
    if best_item is None:
        raise Unresolvable(f"no item has a box on page {link.target_page}")
    return ResolvedReference(
        link=link, implicit_key=implicit_key, target_item=best_item, distance=best_distance
    )


def extract_implicit_key(link: LinkAnnotation, doc: PageGraph) -> str:
    """Text under the link's source rectangle, in reading order.

    A run counts when the rectangle covers at least half the run's area, so
    enlarging the rectangle never drops a previously included run.
    """
    page = doc.pages[link.source_page]
    rect = link.source_rect
    parts = []
    for run in page.runs_in_order():
        overlap = rect.intersection(run.bbox)
        if overlap is not None and overlap.area / run.bbox.area >= KEY_OVERLAP_FRACTION:
            parts.append(run.text)
    return " ".join(parts).strip()
