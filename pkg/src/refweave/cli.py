"""Command-line front end.

Exit codes: 0 success, 1 recoverable extraction failure (JSON error on
stderr), 2 invalid input. REFWEAVE_THREADS caps worker threads for the
multi-document commands (0 or unset = auto).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import dataset, layout, overlay, pipeline, synthcorpus
from .errors import RefweaveError
from .evalkit import compute_ap_report, detections_from_json, ground_truth_from_coco
from .jsonio import canonical_bytes, load_json
from .pagegraph import ingest_pdf, load_pagegraph_json, serialize_pagegraph


def _thread_count(n_tasks: int) -> int:
    raw = os.environ.get("REFWEAVE_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def _map_tasks(fn, items: list):
    workers = _thread_count(len(items))
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _cmd_ingest(args) -> int:
    graph = ingest_pdf(args.pdf)
    Path(args.output).write_bytes(serialize_pagegraph(graph))
    return 0


def _cmd_annotate(args) -> int:
    graph = load_pagegraph_json(Path(args.graph).read_bytes())
    regions = None
    if args.regions:
        regions = layout.import_regions(graph, Path(args.regions).read_bytes())
    ann = pipeline.annotate_document(graph, regions=regions)
    Path(args.output).write_bytes(pipeline.annotations_to_json(ann))
    return 0


def _cmd_dataset(args) -> int:
    files = [Path(p) for p in args.refs]
    loaded = _map_tasks(lambda p: pipeline.load_annotations_json(p.read_bytes()), files)
    records = []
    for ann_file in loaded:
        records.extend(
            dataset.assemble_from_crops(
                ann_file.source_id, ann_file.list_regions, ann_file.items, ann_file.resolved
            )
        )
    cfg = dataset.SplitConfig(ratio=args.ratio, seed=args.seed)
    split = dataset.split_dataset(len(records), cfg)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for which in ("train", "val"):
        (out / f"{which}.json").write_bytes(dataset.emit_coco(records, split, which))
        (out / f"{which}_keys.json").write_bytes(dataset.emit_sidecar(records, split, which))
    print(
        json.dumps(
            {"records": len(records), "train": len(split[0]), "val": len(split[1])}
        )
    )
    return 0


def _cmd_eval(args) -> int:
    gt_raw = load_json(Path(args.gt).read_bytes())
    det_raw = load_json(Path(args.dets).read_bytes())
    report = compute_ap_report(detections_from_json(det_raw), ground_truth_from_coco(gt_raw))
    Path(args.output).write_bytes(canonical_bytes(report.as_dict()))
    print(json.dumps(report.as_dict()))
    return 0


def _cmd_overlay(args) -> int:
    graph_json = load_json(Path(args.graph).read_bytes())
    ann_json = load_json(Path(args.refs).read_bytes())
    svg = overlay.build_overlay_svg(graph_json, ann_json, args.page)
    Path(args.output).write_text(svg, encoding="utf-8")
    return 0


def _cmd_synth(args) -> int:
    seeds = [args.seed + k for k in range(args.count)]
    docs = _map_tasks(
        lambda s: synthcorpus.generate_document(synthcorpus.corpus_spec(s)), seeds
    )
    for graph, expected in docs:  # writes stay serialized for determinism
        synthcorpus.write_document(args.output, graph, expected)
    print(json.dumps({"documents": len(docs), "directory": str(args.output)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refweave",
        description="Extract and resolve internal references in born-digital PDFs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="PDF -> page-graph JSON")
    p.add_argument("pdf")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("annotate", help="page-graph JSON -> reference annotations")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--regions", help="imported segmentation JSON instead of heuristics")
    p.set_defaults(fn=_cmd_annotate)

    p = sub.add_parser("dataset", help="annotations -> COCO train/val + sidecars")
    p.add_argument("refs", nargs="+")
    p.add_argument("--ratio", type=float, default=0.85)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_dataset)

    p = sub.add_parser("eval", help="score detections against COCO ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--dets", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("overlay", help="render one page's boxes as SVG")
    p.add_argument("graph")
    p.add_argument("refs")
    p.add_argument("--page", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_overlay)

    p = sub.add_parser("synth", help="generate a synthetic corpus with oracles")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except RefweaveError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return exc.exit_status
    except FileNotFoundError as exc:
        print(
            json.dumps({"error": "cli.FileNotFound", "message": str(exc)}),
            file=sys.stderr,
        )
        return 2
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(
            json.dumps({"error": "cli.InvalidInput", "message": str(exc)}),
            file=sys.stderr,
        )
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
