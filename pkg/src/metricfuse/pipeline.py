"""Calibration/test orchestration: split, fit scalers, fuse, bootstrap."""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .bootstrap import BootstrapConfig, CorrelationSummary, bootstrap_label, draw_all
from .errors import ConfigError, MetricFuseError, TooFewScenes, add_context
from .fusion import FusionSpec, fuse_dataset, parse_label
from .ingest import Dataset, MissingPolicy, load_dataset
from .normalize import ScalerSet, fit_all

WITHIN = "within"
CROSS = "cross"
DEFAULT_LOWER_BETTER = ("dists", "lpips")


@dataclass(frozen=True)
class SplitSpec:
    calibration_fraction: float
    seed: int
    calibration_scenes: tuple[str, ...]
    test_scenes: tuple[str, ...]


def split_by_scene(dataset: Dataset, fraction: float = 0.8, seed: int = 0) -> SplitSpec:
    """Seeded scene-level split; the first floor(fraction * n) shuffled scenes calibrate."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    scenes = sorted(dataset.scenes)
    n = len(scenes)
    # guard against 0.29 * 100 == 28.999999999999996
    n_cal = math.floor(fraction * n + 1e-9)
    if n < 2 or n_cal < 1 or n_cal >= n:
        raise TooFewScenes(f"cannot split {n} scene(s) at fraction {fraction} into two non-empty parts")
    perm = np.random.default_rng(seed).permutation(n)
    shuffled = [scenes[i] for i in perm]
    return SplitSpec(fraction, seed, tuple(shuffled[:n_cal]), tuple(shuffled[n_cal:]))


@dataclass(frozen=True)
class RunConfig:
    calibration_source: str
    test_source: str
    mode: str
    labels: tuple[str, ...]
    bootstrap: BootstrapConfig = field(default_factory=BootstrapConfig)
    clamp: bool = False
    fraction: float = 0.8
    seed: int = 0
    invert_lower_better: tuple[str, ...] = DEFAULT_LOWER_BETTER
    fusion_inputs: tuple[str, str] = ("vmaf", "dists")
    name: str | None = None

    def __post_init__(self) -> None:
        if self.mode not in (WITHIN, CROSS):
            raise ConfigError(f"mode must be {WITHIN!r} or {CROSS!r}, got {self.mode!r}")
        if self.mode == WITHIN and self.calibration_source != self.test_source:
            raise ConfigError("within mode requires the same calibration and test dataset")
        if not self.labels:
            raise ConfigError("labels must not be empty")
        if len(set(self.labels)) != len(self.labels):
            raise ConfigError(f"duplicate labels in {list(self.labels)}")

    @property
    def config_label(self) -> str:
        if self.name:
            return self.name
        return f"Calib - {self.calibration_source} / Test - {self.test_source}"


@dataclass(frozen=True)
class Counts:
    calibration_videos: int
    calibration_scenes: int
    test_videos: int
    test_scenes: int


@dataclass
class RunResult:
    config_label: str
    counts: Counts
    summaries: list[CorrelationSummary]
    scalers: dict[str, ScalerSet]
    split: SplitSpec | None = None
    test_scores: dict[str, dict[tuple[str, str], float]] = field(default_factory=dict)


def _negate_lower_better(dataset: Dataset, names: Sequence[str]) -> Dataset:
    # dists is already inverted at ingest
    extra = [n for n in names if n != "dists" and n in dataset.metric_names]
    if not extra:
        return dataset
    return dataset.map_metrics(lambda m: {k: (-v if k in extra else v) for k, v in m.items()})


def partition(config: RunConfig, datasets: Mapping[str, Dataset]) -> tuple[Dataset, Dataset, SplitSpec | None]:
    for src in (config.calibration_source, config.test_source):
        if src not in datasets:
            raise ConfigError(f"dataset {src!r} was not loaded")
    if config.mode == WITHIN:
        ds = datasets[config.calibration_source]
        split = split_by_scene(ds, config.fraction, config.seed)
        return ds.subset(split.calibration_scenes), ds.subset(split.test_scenes), split
    return datasets[config.calibration_source], datasets[config.test_source], None


def run(
    config: RunConfig,
    datasets: Mapping[str, Dataset],
    threads: int = 1,
    progress: Callable[[int, int, str], None] | None = None,
) -> RunResult:
    datasets = {k: _negate_lower_better(v, config.invert_lower_better) for k, v in datasets.items()}
    calibration, test, split = partition(config, datasets)

    available = set(test.metric_names)
    specs: list[FusionSpec] = [parse_label(lab, available, config.fusion_inputs) for lab in config.labels]

    scalers: dict[str, ScalerSet] = {}
    for kind in sorted({s.normalization for s in specs if s.is_fused}):
        try:
            scalers[kind] = fit_all(calibration, kind, metrics=config.fusion_inputs)
        except MetricFuseError as exc:
            raise add_context(exc, f"fitting {kind} scalers on {calibration.id!r}")

    draws = draw_all(test.scenes, config.bootstrap)
    summaries: list[CorrelationSummary] = []
    test_scores: dict[str, dict[tuple[str, str], float]] = {}
    for i, spec in enumerate(specs):
        if progress is not None:
            progress(i + 1, len(specs), spec.label)
        try:
            scores = fuse_dataset(spec, test, scalers.get(spec.normalization), config.clamp)
            test_scores[spec.label] = scores
            summaries.append(bootstrap_label(spec.label, test, scores, config.bootstrap, threads, draws))
        except MetricFuseError as exc:
            raise add_context(exc, f"label {spec.label!r}")

    counts = Counts(len(calibration.records), len(calibration.scenes), len(test.records), len(test.scenes))
    return RunResult(config.config_label, counts, summaries, scalers, split, test_scores)


# ---- run configuration files -------------------------------------------------

_REQUIRED = ("calibration", "test", "mode", "seed", "labels", "bootstrap")
_SOURCE_KEYS = ("file_metrics", "file_subjective", "dataset")
_BOOTSTRAP_KEYS = ("n_resamples", "confidence", "seed")


@dataclass(frozen=True)
class DataSource:
    file_metrics: Path
    file_subjective: Path
    dataset: str


@dataclass(frozen=True)
class RunFile:
    config: RunConfig
    calibration: DataSource
    test: DataSource
    missing_policy: MissingPolicy = MissingPolicy.DROP_SCENE
    dmos_reference: float | None = None

    def load_datasets(self) -> dict[str, Dataset]:
        out: dict[str, Dataset] = {}
        for src in (self.calibration, self.test):
            if src.dataset in out:
                continue
            out[src.dataset] = load_dataset(
                src.file_metrics, src.file_subjective, src.dataset, self.missing_policy, self.dmos_reference
            )
        return out


def _source(doc, where: str, base: Path) -> DataSource:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be an object")
    for key in _SOURCE_KEYS:
        if key not in doc:
            raise ConfigError(f"missing key {where}.{key}")
    return DataSource(base / doc["file_metrics"], base / doc["file_subjective"], str(doc["dataset"]))


def parse_run_config(doc: Mapping, base_dir: str | Path = ".") -> RunFile:
    base = Path(base_dir)
    for key in _REQUIRED:
        if key not in doc:
            raise ConfigError(f"missing key {key!r}")
    boot = doc["bootstrap"]
    for key in _BOOTSTRAP_KEYS:
        if key not in boot:
            raise ConfigError(f"missing key bootstrap.{key}")
    cal = _source(doc["calibration"], "calibration", base)
    test = _source(doc["test"], "test", base)
    try:
        bconf = BootstrapConfig(
            int(boot["n_resamples"]),
            float(boot["confidence"]),
            int(boot["seed"]),
            boot.get("degenerate_policy", "skip"),
        )
        config = RunConfig(
            calibration_source=cal.dataset,
            test_source=test.dataset,
            mode=doc["mode"],
            labels=tuple(str(x) for x in doc["labels"]),
            bootstrap=bconf,
            clamp=bool(doc.get("clamp", False)),
            fraction=float(doc.get("fraction", 0.8)),
            seed=int(doc["seed"]),
            invert_lower_better=tuple(doc.get("invert_lower_better", DEFAULT_LOWER_BETTER)),
            name=doc.get("name"),
        )
        policy = MissingPolicy(doc.get("missing_policy", MissingPolicy.DROP_SCENE.value))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    ref = doc.get("dmos_reference")
    return RunFile(config, cal, test, policy, None if ref is None else float(ref))


def load_run_config(path: str | Path) -> RunFile:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top-level value must be an object")
    return parse_run_config(doc, path.parent)


def with_overrides(runfile: RunFile, seed: int | None = None, clamp: bool | None = None) -> RunFile:
    config = runfile.config
    if seed is not None:
        config = replace(config, seed=seed)
    if clamp:
        config = replace(config, clamp=True)
    return replace(runfile, config=config)


def stderr_progress(i: int, n: int, label: str) -> None:
    print(f"[{i}/{n}] {label}", file=sys.stderr)
