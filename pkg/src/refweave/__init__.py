"""refweave: internal-reference extraction and COCO ground truth for PDFs."""

from .pagegraph import (
    Box,
    LinkAnnotation,
    Page,
    PageGraph,
    TextRun,
    ingest_pdf,
    load_pagegraph_json,
    serialize_pagegraph,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "LinkAnnotation",
    "Page",
    "PageGraph",
    "TextRun",
    "__version__",
    "ingest_pdf",
    "load_pagegraph_json",
    "serialize_pagegraph",
]
