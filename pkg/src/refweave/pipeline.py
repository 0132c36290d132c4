"""End-to-end annotation: layout -> explicit keys -> links -> resolution."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import layout, links, refitems
from .errors import Unresolvable
from .jsonio import canonical_bytes, load_json
from .pagegraph import Box, LinkAnnotation, PageGraph


@dataclass(slots=True)
class DocumentAnnotations:
    doc: PageGraph
    regions: list[layout.Region]
    section: refitems.ReferenceSection
    items: list[refitems.ReferenceItem]
    resolved: list[links.ResolvedReference]
    captions: list[refitems.CaptionKey] = field(default_factory=list)
    footnotes: list[refitems.FootnoteMarker] = field(default_factory=list)
    equation_tags: list[refitems.CaptionKey] = field(default_factory=list)
    unresolved_links: int = 0


def annotate_document(
    doc: PageGraph, regions: list[layout.Region] | None = None
) -> DocumentAnnotations:
    """Run the full extraction pipeline over an ingested document.

    Pass ``regions`` to use an imported segmentation instead of the
    heuristics. Links that cannot be resolved to an item are counted and
    dropped rather than failing the document.
    """
    if regions is None:
        regions = layout.analyze_document(doc)
    section = refitems.detect_reference_section(doc, regions)
    items = refitems.segment_reference_items(section, doc)
    all_links = links.extract_links(doc)
    bibliographic = links.filter_bibliographic_links(all_links, section)
    resolved = []
    unresolved = 0
    for link in bibliographic:
        key = links.extract_implicit_key(link, doc)
        try:
            resolved.append(links.resolve_link_target(link, items, implicit_key=key))
        except Unresolvable:
            unresolved += 1
    return DocumentAnnotations(
        doc=doc,
        regions=regions,
        section=section,
        items=items,
        resolved=resolved,
        captions=refitems.extract_caption_keys(doc, regions),
        footnotes=refitems.detect_footnote_markers(doc, regions),
        equation_tags=refitems.detect_equation_tags(doc, regions),
        unresolved_links=unresolved,
    )


def item_record(item: refitems.ReferenceItem) -> dict:
    return {
        "item_id": item.item_id,
        "explicit_key": item.explicit_key,
        "text": item.text,
        "boxes": [{"page": p, "bbox": b.as_list()} for p, b in item.boxes],
    }


def resolved_record(ref: links.ResolvedReference) -> dict:
    return {
        "implicit_key": ref.implicit_key,
        "source": {
            "page": ref.link.source_page,
            "rect": ref.link.source_rect.as_list(),
        },
        "target_item": ref.target_item,
        "distance": ref.distance,
    }


def annotations_to_json(ann: DocumentAnnotations) -> bytes:
    """The `annotate` output: everything dataset/overlay need downstream."""
    doc = {
        "source_id": ann.doc.source_id,
        "section": {
            "page": ann.section.start[0],
            "reading_index": ann.section.start[1],
            "title_text": ann.section.title_text,
            "title_top": ann.section.start_y,
        },
        "list_regions": [
            {"page": r.page, "bbox": r.bbox.as_list()} for r in ann.section.list_regions
        ],
        "regions": [
            {
                "page": r.page,
                "bbox": r.bbox.as_list(),
                "category": r.category.value,
                "confidence": r.confidence,
            }
            for r in ann.regions
        ],
        "items": [item_record(item) for item in ann.items],
        "links": [resolved_record(ref) for ref in ann.resolved],
        "captions": [
            {
                "kind": c.kind,
                "number_token": c.number_token,
                "key": c.key,
                "page": c.region.page,
                "bbox": c.region.bbox.as_list(),
                "anchor": (
                    {"page": c.anchor_region.page, "bbox": c.anchor_region.bbox.as_list()}
                    if c.anchor_region is not None
                    else None
                ),
            }
            for c in ann.captions + ann.equation_tags
        ],
        "footnotes": [
            {
                "marker_text": f.marker_text,
                "page": f.in_text[0],
                "reading_index": f.in_text[1],
                "footnote": (
                    {"page": f.footnote_region.page, "bbox": f.footnote_region.bbox.as_list()}
                    if f.footnote_region is not None
                    else None
                ),
            }
            for f in ann.footnotes
        ],
    }
    return canonical_bytes(doc)


@dataclass(slots=True)
class AnnotationFile:
    """The parts of an annotate output the dataset command consumes."""

    source_id: str
    list_regions: list[tuple[int, Box]]
    items: list[refitems.ReferenceItem]
    resolved: list[links.ResolvedReference]


def load_annotations_json(data: bytes | str) -> AnnotationFile:
    raw = load_json(data)
    items = [
        refitems.ReferenceItem(
            item_id=i["item_id"],
            explicit_key=i["explicit_key"],
            boxes=[(b["page"], Box(*b["bbox"])) for b in i["boxes"]],
            text=i["text"],
            start_run=(0, 0),
        )
        for i in raw["items"]
    ]
    resolved = [
        links.ResolvedReference(
            # the original target page/point are not persisted; the record
            # only needs the source geometry, key and resolved item
            link=LinkAnnotation(
                source_page=r["source"]["page"],
                source_rect=Box(*r["source"]["rect"]),
                target_page=-1,
                target_point=(0.0, 0.0),
                kind="internal",
            ),
            implicit_key=r["implicit_key"],
            target_item=r["target_item"],
            distance=r["distance"],
        )
        for r in raw["links"]
    ]
    return AnnotationFile(
        source_id=raw["source_id"],
        list_regions=[(r["page"], Box(*r["bbox"])) for r in raw["list_regions"]],
        items=items,
        resolved=resolved,
    )
