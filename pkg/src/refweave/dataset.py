"""Ground-truth record assembly, train/val split and COCO emission."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptySection, InvalidRatio
from .jsonio import canonical_bytes, clean_number
from .links import ResolvedReference
from .pagegraph import Box, PageGraph
from .refitems import ReferenceItem, ReferenceSection
from .rng import splitmix64

CATEGORY_ID = 1
CATEGORY_NAME = "reference_item"


@dataclass(slots=True)
class RecordAnnotation:
    item_id: int
    bbox: Box  # relative to the crop origin
    explicit_key: str
    implicit_keys: list[str]
    text: str


@dataclass(slots=True)
class GroundTruthRecord:
    """One List-region crop with the reference items it contains."""

    source_id: str
    page: int
    crop: Box
    annotations: list[RecordAnnotation] = field(default_factory=list)


@dataclass(frozen=True, slots=True)
class SplitConfig:
    ratio: float = 0.85
    seed: int = 0


def _round_box(box: Box) -> Box:
    return Box(*(round(v, 3) for v in box.as_list()))


def assemble_from_crops(
    source_id: str,
    crops: list[tuple[int, Box]],
    items: list[ReferenceItem],
    resolved: list[ResolvedReference],
) -> list[GroundTruthRecord]:
    """One record per crop; items contribute crop-relative boxes and collect
    the implicit keys of every link resolved to them."""
    if not crops:
        raise EmptySection("reference section contains no list regions")
    keys_by_item: dict[int, list[str]] = {}
    for ref in resolved:
        keys_by_item.setdefault(ref.target_item, []).append(ref.implicit_key)
    records = []
    for page, crop in crops:
        record = GroundTruthRecord(source_id=source_id, page=page, crop=crop)
        for item in items:
            box = item.box_on(page)
            if box is None:
                continue
            clipped = box.intersection(crop)
            if clipped is None:
                continue
            record.annotations.append(
                RecordAnnotation(
                    item_id=item.item_id,
                    bbox=_round_box(
                        Box(
                            clipped.x0 - crop.x0,
                            clipped.y0 - crop.y0,
                            clipped.x1 - crop.x0,
                            clipped.y1 - crop.y0,
                        )
                    ),
                    explicit_key=item.explicit_key,
                    implicit_keys=list(keys_by_item.get(item.item_id, [])),
                    text=item.text,
                )
            )
        records.append(record)
    return records


def assemble_records(
    doc: PageGraph,
    section: ReferenceSection,
    items: list[ReferenceItem],
    resolved: list[ResolvedReference],
) -> list[GroundTruthRecord]:
    """assemble_from_crops over the section's List regions."""
    return assemble_from_crops(
        doc.source_id,
        [(r.page, r.bbox) for r in section.list_regions],
        items,
        resolved,
    )


def split_dataset(n_records: int, cfg: SplitConfig) -> tuple[list[int], list[int]]:
    """Deterministic shuffled split; |train| = floor(ratio * n).

    Record ids are shuffled by sorting on a splitmix64 hash of (seed, id);
    both sides come back sorted ascending.
    """
    if not 0.0 < cfg.ratio < 1.0:
        raise InvalidRatio(f"split ratio must be in (0, 1), got {cfg.ratio}")
    if n_records < 2:
        raise InvalidRatio(f"need at least 2 records to split, got {n_records}")
    n_train = int(cfg.ratio * n_records)
    shuffled = sorted(range(n_records), key=lambda i: (splitmix64(cfg.seed, i), i))
    train = sorted(shuffled[:n_train])
    val = sorted(shuffled[n_train:])
    return train, val


def _selected(split: tuple[list[int], list[int]], which: str) -> list[int]:
    if which == "train":
        return split[0]
    if which == "val":
        return split[1]
    raise ValueError(f"which must be 'train' or 'val', got {which!r}")


def emit_coco(
    records: list[GroundTruthRecord], split: tuple[list[int], list[int]], which: str
) -> bytes:
    """Canonical COCO detection JSON for one side of the split.

    bbox values carry <= 3 decimals; area stays the exact product of the
    rounded width and height so downstream checks of area == w*h hold.
    """
    images = []
    annotations = []
    ann_id = 1
    for rid in _selected(split, which):
        record = records[rid]
        images.append(
            {
                "id": rid + 1,
                "file_name": f"{record.source_id}_{rid}.png",
                "width": int(round(record.crop.width)),
                "height": int(round(record.crop.height)),
            }
        )
        for ann in record.annotations:
            w = clean_number(ann.bbox.width)
            h = clean_number(ann.bbox.height)
            annotations.append(
                {
                    "id": ann_id,
                    "image_id": rid + 1,
                    "category_id": CATEGORY_ID,
                    "bbox": [clean_number(ann.bbox.x0), clean_number(ann.bbox.y0), w, h],
                    "area": w * h,
                    "iscrowd": 0,
                }
            )
            ann_id += 1
    doc = {
        "images": images,
        "annotations": annotations,
        "categories": [{"id": CATEGORY_ID, "name": CATEGORY_NAME}],
    }
    return canonical_bytes(doc, round_floats=False)


def emit_sidecar(
    records: list[GroundTruthRecord], split: tuple[list[int], list[int]], which: str
) -> bytes:
    """Keys/text sidecar aligned with emit_coco's annotation ids."""
    annotations = []
    ann_id = 1
    for rid in _selected(split, which):
        for ann in records[rid].annotations:
            annotations.append(
                {
                    "id": ann_id,
                    "explicit_key": ann.explicit_key,
                    "implicit_keys": list(ann.implicit_keys),
                    "text": ann.text,
                }
            )
            ann_id += 1
    return canonical_bytes({"annotations": annotations})
