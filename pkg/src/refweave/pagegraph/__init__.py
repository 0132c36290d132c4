"""Document model, PDF ingestion, reading order and serialization."""

from .ingest import ingest_pdf
from .model import (
    Box,
    LinkAnnotation,
    Page,
    PageGraph,
    TextRun,
    union_all,
    validate_pagegraph,
)
from .order import (
    baseline_clusters,
    dominant_font_size,
    mark_superscripts,
    reading_order,
)
from .serialize import load_pagegraph_json, serialize_pagegraph

__all__ = [
    "Box",
    "LinkAnnotation",
    "Page",
    "PageGraph",
    "TextRun",
    "baseline_clusters",
    "dominant_font_size",
    "ingest_pdf",
    "load_pagegraph_json",
    "mark_superscripts",
    "reading_order",
    "serialize_pagegraph",
    "union_all",
    "validate_pagegraph",
]
