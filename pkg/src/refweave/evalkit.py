"""COCO-style average-precision evaluation for reference-item detectors.

Implements the standard COCO constants: IoU thresholds 0.50:0.05:0.95,
101-point interpolated precision, medium/large area ranges of 32^2..96^2
and beyond (page units, 1 unit = 1 px). Strata with no ground truth report
the COCO sentinel -1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import EmptyGroundTruth
from .pagegraph import Box

IOU_THRESHOLDS = [round(0.5 + 0.05 * i, 2) for i in range(10)]
RECALL_GRID = np.linspace(0.0, 1.0, 101)

AREA_ALL = (0.0, float("inf"))
AREA_SMALL = (0.0, 1024.0)
AREA_MEDIUM = (1024.0, 9216.0)
AREA_LARGE = (9216.0, float("inf"))

SENTINEL = -1.0


@dataclass(frozen=True, slots=True)
class Detection:
    image_id: int
    bbox: Box
    score: float


@dataclass(frozen=True, slots=True)
class GroundTruth:
    image_id: int
    bbox: Box
    area: float | None = None  # override for COCO's annotation area field

    @property
    def effective_area(self) -> float:
        return self.bbox.area if self.area is None else self.area


@dataclass(frozen=True, slots=True)
class ApReport:
    ap: float
    ap50: float
    ap75: float
    ap_m: float
    ap_l: float
    ap_s: float = SENTINEL  # computed but not part of the reported five fields

    def as_dict(self, scale: float = 100.0) -> dict[str, float]:
        """The five reported fields, x100 to match the usual presentation."""

        def fmt(v: float) -> float:
            return round(v * scale, 2) if v >= 0 else SENTINEL

        return {
            "ap": fmt(self.ap),
            "ap50": fmt(self.ap50),
            "ap75": fmt(self.ap75),
            "ap_m": fmt(self.ap_m),
            "ap_l": fmt(self.ap_l),
        }


def compute_iou(a: Box, b: Box) -> float:
    """Intersection over union; 0 for disjoint boxes."""
    ix = min(a.x1, b.x1) - max(a.x0, b.x0)
    iy = min(a.y1, b.y1) - max(a.y0, b.y0)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def _sorted_dets(dets: list[Detection]) -> list[Detection]:
    # stable: equal scores keep input order
    return sorted(dets, key=lambda d: -d.score)


def match_detections(
    dets: list[Detection], gts: list[GroundTruth], iou_threshold: float
) -> list[tuple[Detection, int | None]]:
    """Greedy COCO matching, per image, highest score first.

    Each detection takes the still-unmatched ground truth with the highest
    IoU >= threshold; the returned gt is an index into ``gts`` or None.
    """
    matched_gt: set[int] = set()
    out = []
    for det in _sorted_dets(dets):
        best_iou = iou_threshold
        best: int | None = None
        for gi, gt in enumerate(gts):
            if gt.image_id != det.image_id or gi in matched_gt:
                continue
            iou = compute_iou(det.bbox, gt.bbox)
            if iou < best_iou or (best is not None and iou == best_iou):
                continue  # ties keep the earlier ground truth
            best_iou = iou
            best = gi
        if best is not None:
            matched_gt.add(best)
        out.append((det, best))
    return out


def _in_range(area: float, rng: tuple[float, float]) -> bool:
    # the strata partition exactly: small < 1024, medium [1024, 9216],
    # large > 9216; the all-range admits everything
    low, high = rng
    if high == float("inf"):
        return True if low == 0.0 else area > low
    if low == 0.0:
        return area < high
    return low <= area <= high


def _match_flags(
    dets: list[Detection],
    gts: list[GroundTruth],
    iou_threshold: float,
    area_range: tuple[float, float],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Per-image greedy matching with COCO ignore semantics.

    Returns (scores, tp, ignored) over all detections plus the number of
    considered ground truths. Ground truths outside the area range are
    ignored: matching one neither scores nor hurts, and unmatched
    detections whose own area lies outside the range are ignored too.
    """
    gt_ignored = [not _in_range(gt.effective_area, area_range) for gt in gts]
    n_gt = sum(1 for ig in gt_ignored if not ig)

    scores: list[float] = []
    tp: list[bool] = []
    ignored: list[bool] = []
    by_image: dict[int, list[int]] = {}
    for gi, gt in enumerate(gts):
        by_image.setdefault(gt.image_id, []).append(gi)
    # evaluate unignored ground truths first, mirroring pycocotools
    for image_id in by_image:
        by_image[image_id].sort(key=lambda gi: gt_ignored[gi])

    det_by_image: dict[int, list[Detection]] = {}
    for det in dets:
        det_by_image.setdefault(det.image_id, []).append(det)

    for image_id in sorted(det_by_image):
        gt_indices = by_image.get(image_id, [])
        taken: set[int] = set()
        for det in _sorted_dets(det_by_image[image_id]):
            best_iou = iou_threshold
            best = -1
            for gi in gt_indices:
                if gi in taken:
                    continue
                if best > -1 and not gt_ignored[best] and gt_ignored[gi]:
                    break  # an unignored match can't be beaten by ignored gts
                iou = compute_iou(det.bbox, gts[gi].bbox)
                if iou < best_iou:
                    continue
                if best > -1 and iou == best_iou:
                    continue
                best_iou = iou
                best = gi
            scores.append(det.score)
            if best > -1:
                taken.add(best)
                tp.append(not gt_ignored[best])
                ignored.append(gt_ignored[best])
            else:
                tp.append(False)
                ignored.append(not _in_range(det.bbox.area, area_range))
    order = np.argsort(-np.array(scores), kind="stable") if scores else np.array([], dtype=int)
    return (
        np.array(scores)[order] if scores else np.array([]),
        np.array(tp, dtype=bool)[order] if scores else np.array([], dtype=bool),
        np.array(ignored, dtype=bool)[order] if scores else np.array([], dtype=bool),
        n_gt,
    )


def _ap_101(tp: np.ndarray, ignored: np.ndarray, n_gt: int) -> float | None:
    """101-point interpolated AP; None when there is no ground truth."""
    if n_gt == 0:
        return None
    keep = ~ignored
    tp = tp[keep]
    if tp.size == 0:
        return 0.0
    cum_tp = np.cumsum(tp)
    cum_fp = np.cumsum(~tp)
    recall = cum_tp / n_gt
    precision = cum_tp / (cum_tp + cum_fp)
    # precision envelope from the right
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    indices = np.searchsorted(recall, RECALL_GRID, side="left")
    chosen = np.where(indices < envelope.size, envelope[np.minimum(indices, envelope.size - 1)], 0.0)
    return float(np.mean(chosen))


def _ap_at(
    dets: list[Detection],
    gts: list[GroundTruth],
    iou_threshold: float,
    area_range: tuple[float, float],
) -> float | None:
    _, tp, ignored, n_gt = _match_flags(dets, gts, iou_threshold, area_range)
    return _ap_101(tp, ignored, n_gt)


def compute_ap(dets: list[Detection], gts: list[GroundTruth], iou_threshold: float) -> float:
    """AP at a single IoU threshold over all areas; 0 (with a warning) when
    the ground truth is empty."""
    ap = _ap_at(dets, gts, iou_threshold, AREA_ALL)
    if ap is None:
        warnings.warn("AP over empty ground truth defined as 0", EmptyGroundTruth, stacklevel=2)
        return 0.0
    return ap


def _mean_ap(dets, gts, area_range) -> float:
    values = []
    for thr in IOU_THRESHOLDS:
        ap = _ap_at(dets, gts, thr, area_range)
        if ap is None:
            return SENTINEL
        values.append(ap)
    return float(np.mean(values))


def compute_ap_report(dets: list[Detection], gts: list[GroundTruth]) -> ApReport:
    """The headline report: mean AP, AP@.50, AP@.75 and the area strata."""
    ap50 = _ap_at(dets, gts, 0.50, AREA_ALL)
    ap75 = _ap_at(dets, gts, 0.75, AREA_ALL)
    return ApReport(
        ap=_mean_ap(dets, gts, AREA_ALL),
        ap50=SENTINEL if ap50 is None else ap50,
        ap75=SENTINEL if ap75 is None else ap75,
        ap_m=_mean_ap(dets, gts, AREA_MEDIUM),
        ap_l=_mean_ap(dets, gts, AREA_LARGE),
        ap_s=_mean_ap(dets, gts, AREA_SMALL),
    )


def detections_from_json(raw) -> list[Detection]:
    """COCO results format: [{"image_id", "bbox": [x,y,w,h], "score"}]."""
    if not isinstance(raw, list):
        raise ValueError("detections file must be a JSON array of results")
    dets = []
    for i, d in enumerate(raw):
        try:
            x, y, w, h = (float(v) for v in d["bbox"])
            image_id = int(d["image_id"])
            score = float(d["score"])
        except (TypeError, KeyError, ValueError) as exc:
            raise ValueError(f"detections[{i}]: {exc}") from exc
        if w <= 0 or h <= 0:
            raise ValueError(f"detections[{i}]: bbox width/height must be positive")
        dets.append(Detection(image_id=image_id, bbox=Box(x, y, x + w, y + h), score=score))
    return dets


def ground_truth_from_coco(raw) -> list[GroundTruth]:
    """Ground truths from a COCO dataset dict (uses the annotation area field)."""
    if not isinstance(raw, dict) or not isinstance(raw.get("annotations", []), list):
        raise ValueError("ground truth must be a COCO dataset object")
    gts = []
    for i, ann in enumerate(raw.get("annotations", [])):
        try:
            x, y, w, h = (float(v) for v in ann["bbox"])
            image_id = int(ann["image_id"])
            area = ann.get("area")
        except (TypeError, KeyError, ValueError) as exc:
            raise ValueError(f"annotations[{i}]: {exc}") from exc
        gts.append(
            GroundTruth(
                image_id=image_id,
                bbox=Box(x, y, x + w, y + h),
                area=float(area) if area is not None else None,
            )
        )
    return gts
