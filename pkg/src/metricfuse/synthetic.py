"""Seeded synthetic datasets in the ingest file formats.

Each video gets a latent quality ``q = scene_offset + N(0, 1)``. VMAF and DISTS
see it through independent metric-specific deviations::

    vmaf  = 100 * logistic(q + e_vmaf)
    dists = 1 - logistic(q + e_dists)

The subjective score is an affine map of the model's driver onto the 1-5 MOS
scale plus Gaussian noise, clamped to the scale. Drivers:

    avg-driven    (vmaf / 100 + (1 - dists)) / 2
    vmaf-driven   vmaf / 100
    dists-driven  1 - dists

Every scene holds one best (vmaf 100, dists 0) and one worst (vmaf 0, dists 1)
anchor video. Any calibration split therefore sees the nominal metric
extremes, which makes noise-free avg-driven MOS an exactly increasing function
of the ``avg_mm`` fused score.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidSpec

MOS_MODELS = ("avg-driven", "vmaf-driven", "dists-driven")
MOS_SCALE = (1.0, 5.0)
METRIC_DEVIATION = 1.0
SCENE_SPREAD = 0.5


@dataclass(frozen=True)
class SyntheticSpec:
    n_scenes: int
    videos_per_scene: int
    noise_sigma: float = 0.0
    mos_model: str = "avg-driven"
    seed: int = 0
    dataset_id: str = "SYN"

    def __post_init__(self) -> None:
        if self.n_scenes < 2:
            raise InvalidSpec("n_scenes must be >= 2")
        if self.videos_per_scene < 2:
            raise InvalidSpec("videos_per_scene must be >= 2")
        if not self.noise_sigma >= 0:
            raise InvalidSpec("noise_sigma must be >= 0")
        if self.mos_model not in MOS_MODELS:
            raise InvalidSpec(f"mos_model must be one of {', '.join(MOS_MODELS)}")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec("seed must be an unsigned 64-bit integer")


def _logistic(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def _driver(model: str, vmaf: float, dists: float) -> float:
    if model == "avg-driven":
        return (vmaf / 100.0 + (1.0 - dists)) / 2.0
    if model == "vmaf-driven":
        return vmaf / 100.0
    return 1.0 - dists


@dataclass(frozen=True)
class SyntheticVideo:
    scene: str
    video: str
    vmaf: float
    dists: float
    mos: float


def generate(spec: SyntheticSpec) -> list[SyntheticVideo]:
    rng = np.random.default_rng(spec.seed)
    lo, hi = MOS_SCALE
    out: list[SyntheticVideo] = []
    for s in range(spec.n_scenes):
        scene = f"scene{s:03d}"
        offset = rng.normal(0.0, SCENE_SPREAD)
        q = offset + rng.normal(0.0, 1.0, spec.videos_per_scene)
        vmaf = 100.0 * _logistic(q + rng.normal(0.0, METRIC_DEVIATION, spec.videos_per_scene))
        dists = 1.0 - _logistic(q + rng.normal(0.0, METRIC_DEVIATION, spec.videos_per_scene))
        vmaf[0], dists[0] = 100.0, 0.0
        vmaf[1], dists[1] = 0.0, 1.0
        noise = rng.normal(0.0, 1.0, spec.videos_per_scene) * spec.noise_sigma
        for v in range(spec.videos_per_scene):
            vm, di = float(vmaf[v]), float(dists[v])
            mos = lo + (hi - lo) * _driver(spec.mos_model, vm, di) + float(noise[v])
            out.append(SyntheticVideo(scene, f"{scene}_v{v:03d}", vm, di, min(max(mos, lo), hi)))
    return out


def metrics_csv(spec: SyntheticSpec, videos: list[SyntheticVideo]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dataset", "scene", "video", "metric", "value"])
    for v in videos:
        w.writerow([spec.dataset_id, v.scene, v.video, "vmaf", repr(v.vmaf)])
        w.writerow([spec.dataset_id, v.scene, v.video, "dists", repr(v.dists)])
    return buf.getvalue()


def subjective_csv(spec: SyntheticSpec, videos: list[SyntheticVideo]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dataset", "scene", "video", "kind", "value", "scale_min", "scale_max"])
    lo, hi = MOS_SCALE
    for v in videos:
        w.writerow([spec.dataset_id, v.scene, v.video, "MOS", repr(v.mos), repr(lo), repr(hi)])
    return buf.getvalue()


def run_config(spec: SyntheticSpec) -> dict:
    """A within-dataset 80/20 run over the generated files."""
    source = {"file_metrics": "metrics.csv", "file_subjective": "subjective.csv", "dataset": spec.dataset_id}
    return {
        "calibration": source,
        "test": dict(source),
        "mode": "within",
        "fraction": 0.8,
        "seed": spec.seed,
        "labels": ["avg_mm", "min_mm", "avg_z", "min_z", "vmaf", "dists"],
        "bootstrap": {"n_resamples": 1000, "confidence": 0.95, "seed": spec.seed},
        "clamp": False,
    }


def write(spec: SyntheticSpec, out_dir: str | Path) -> dict[str, Path]:
    """Write ``metrics.csv``, ``subjective.csv`` and ``config.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    videos = generate(spec)
    paths = {
        "metrics": out / "metrics.csv",
        "subjective": out / "subjective.csv",
        "config": out / "config.json",
    }
    paths["metrics"].write_text(metrics_csv(spec, videos), encoding="utf-8")
    paths["subjective"].write_text(subjective_csv(spec, videos), encoding="utf-8")
    paths["config"].write_text(json.dumps(run_config(spec), indent=2) + "\n", encoding="utf-8")
    return paths
