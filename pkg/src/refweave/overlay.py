"""SVG overlays: regions in yellow, explicit keys green, implicit keys red."""

from __future__ import annotations

from .jsonio import clean_number

REGION_COLOR = "#f5c400"
EXPLICIT_COLOR = "#1faa00"
IMPLICIT_COLOR = "#d32f2f"


def _rect(box: list[float], color: str, label: str) -> str:
    x0, y0, x1, y1 = (clean_number(v) for v in box)
    return (
        f'<rect x="{x0}" y="{y0}" width="{clean_number(x1 - x0)}" '
        f'height="{clean_number(y1 - y0)}" fill="none" stroke="{color}" '
        f'stroke-width="1.5"><title>{label}</title></rect>'
    )


def build_overlay_svg(graph_json: dict, annotations_json: dict, page: int) -> str:
    """Render one page's boxes as standalone SVG markup."""
    pages = graph_json["pages"]
    if not 0 <= page < len(pages):
        raise ValueError(f"page {page} not in 0..{len(pages) - 1}")
    pg = pages[page]
    width, height = pg["width"], pg["height"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{clean_number(width)}" '
        f'height="{clean_number(height)}" '
        f'viewBox="0 0 {clean_number(width)} {clean_number(height)}">',
        f'<rect x="0" y="0" width="{clean_number(width)}" height="{clean_number(height)}" '
        'fill="white" stroke="#888" stroke-width="0.5"/>',
    ]
    for region in annotations_json.get("regions", []):
        if region["page"] == page:
            parts.append(_rect(region["bbox"], REGION_COLOR, f"region:{region['category']}"))
    for item in annotations_json.get("items", []):
        for box in item["boxes"]:
            if box["page"] == page:
                parts.append(_rect(box["bbox"], EXPLICIT_COLOR, f"item:{item['explicit_key']}"))
    for caption in annotations_json.get("captions", []):
        if caption["page"] == page:
            parts.append(_rect(caption["bbox"], EXPLICIT_COLOR, f"caption:{caption['key']}"))
    for link in annotations_json.get("links", []):
        if link["source"]["page"] == page:
            parts.append(
                _rect(link["source"]["rect"], IMPLICIT_COLOR, f"link:{link['implicit_key']}")
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
