"""``metricfuse`` command-line interface."""

from __future__ import annotations

import argparse
import csv
import io
import os
import shutil
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from . import pipeline, report, synthetic
from .errors import ConfigError, MetricFuseError
from .ingest import MissingPolicy, assemble, load_metrics, load_subjective
from .vmaf import emit_metric_rows, parse_vmaf_log

REPORT_FILES = {
    "markdown": "report.md",
    "csv": "report.csv",
    "json": "report.json",
    "svg": "report.svg",
}


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def write_reports(doc: report.ReportDocument, out_dir: str | Path) -> dict[str, Path]:
    """Render every format first, then move the files into ``out_dir`` together."""
    rendered = {name: report.render_table(doc, fmt) for fmt, name in REPORT_FILES.items()}
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".metricfuse-", dir=out))
    try:
        for name, text in rendered.items():
            (tmp / name).write_text(text, encoding="utf-8")
        for name in rendered:
            os.replace(tmp / name, out / name)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    return {name: out / name for name in rendered}


def cmd_run(args: argparse.Namespace) -> int:
    runfile = pipeline.with_overrides(pipeline.load_run_config(args.config), seed=args.seed, clamp=args.clamp)
    datasets = runfile.load_datasets()
    for ds in datasets.values():
        if ds.dropped_scenes:
            print(f"dataset {ds.id}: dropped scene(s) {', '.join(ds.dropped_scenes)}", file=sys.stderr)
    threads = args.threads if args.threads else (os.cpu_count() or 1)
    result = pipeline.run(runfile.config, datasets, threads=threads, progress=pipeline.stderr_progress)
    paths = write_reports(report.ReportDocument.from_results([result]), args.out)
    for p in paths.values():
        print(p)
    return 0


def cmd_generate_synthetic(args: argparse.Namespace) -> int:
    spec = synthetic.SyntheticSpec(
        n_scenes=args.scenes,
        videos_per_scene=args.videos,
        noise_sigma=args.noise,
        mos_model=args.model,
        seed=args.seed,
        dataset_id=args.dataset,
    )
    for p in synthetic.write(spec, args.out).values():
        print(p)
    return 0


def _read_scene_map(path: str) -> dict[str, str]:
    """``video,scene`` CSV (header required, ``#`` comments allowed)."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    if not reader.fieldnames or not {"video", "scene"} <= {f.strip() for f in reader.fieldnames}:
        raise ConfigError(f"{path}: scene map needs a 'video,scene' header")
    return {row["video"].strip(): row["scene"].strip() for row in reader}


def cmd_import_vmaf(args: argparse.Namespace) -> int:
    scene_of = _read_scene_map(args.scene_map)
    logs = {Path(p).stem: parse_vmaf_log(p) for p in args.logs}
    rows = emit_metric_rows(logs, args.dataset, scene_of)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dataset", "scene", "video", "metric", "value"])
    for r in rows:
        w.writerow([r.dataset, r.scene, r.video, r.metric, repr(r.value)])
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    metrics = load_metrics(args.metrics)
    subjective = load_subjective(args.subjective)
    policy = MissingPolicy.STRICT if args.strict else MissingPolicy.DROP_SCENE
    ids = sorted({m.dataset for m in metrics} | {s.dataset for s in subjective})
    for ds_id in ids:
        ds = assemble(metrics, subjective, policy, dataset_id=ds_id)
        print(
            f"dataset {ds.id}: {len(ds.scenes)} scenes, {len(ds.records)} videos, "
            f"metrics {', '.join(ds.metric_names)}"
        )
        for scene in ds.dropped_scenes:
            print(f"  dropped scene {scene}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metricfuse",
        description="Fuse VMAF and DISTS scores and benchmark them against subjective scores.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a calibration/test evaluation and write reports")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory for report.{md,csv,json,svg}")
    p.add_argument("--seed", type=_u64, default=None, help="override the split seed")
    p.add_argument("--threads", type=int, default=None, help="bootstrap worker threads (default: all cores)")
    p.add_argument("--clamp", action="store_true", help="clamp test-time min-max values into [0, 1]")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("generate-synthetic", help="write a seeded synthetic dataset")
    p.add_argument("--scenes", type=int, required=True)
    p.add_argument("--videos", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--model", choices=synthetic.MOS_MODELS, default="avg-driven")
    p.add_argument("--seed", type=_u64, required=True)
    p.add_argument("--dataset", default="SYN")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate_synthetic)

    p = sub.add_parser("import-vmaf", help="pool VMAF JSON logs into metric rows")
    p.add_argument("--dataset", required=True)
    p.add_argument("--scene-map", required=True, help="CSV with columns video,scene")
    p.add_argument("--out", default=None)
    p.add_argument("logs", nargs="+")
    p.set_defaults(func=cmd_import_vmaf)

    p = sub.add_parser("validate", help="assemble inputs and report dropped scenes")
    p.add_argument("--metrics", required=True)
    p.add_argument("--subjective", required=True)
    p.add_argument("--strict", action="store_true", help="fail instead of dropping incomplete scenes")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MetricFuseError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
