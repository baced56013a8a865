"""Pool per-video VMAF JSON logs into metric-file rows.

Two log layouts are understood::

    {"frames": [{"frameNum": 0, "metrics": {"vmaf": 80.0}}, ...]}
    {"pooled_metrics": {"vmaf": {"mean": 82.0, ...}}}

Both may appear in the same document, in which case the pooled mean wins.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import MalformedJson, MissingSceneMapping, NoVmafScoresFound, ScoreOutOfRange
from .ingest import MetricRow

VMAF_RANGE = (0.0, 100.0)


@dataclass(frozen=True)
class VmafLog:
    frames: tuple[float, ...] = ()
    pooled_mean: float | None = None

    def __post_init__(self) -> None:
        if not self.frames and self.pooled_mean is None:
            raise NoVmafScoresFound("log has neither frame scores nor a pooled mean")
        for v in self.frames:
            _check_score(v)
        if self.pooled_mean is not None:
            _check_score(self.pooled_mean)


def _check_score(v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScoreOutOfRange(f"VMAF score {v!r} is not a number")
    lo, hi = VMAF_RANGE
    if not (math.isfinite(v) and lo <= v <= hi):
        raise ScoreOutOfRange(f"VMAF score {v!r} outside [{lo:g}, {hi:g}]")
    return float(v)


def parse_vmaf_document(doc) -> VmafLog:
    if not isinstance(doc, dict):
        raise NoVmafScoresFound("top-level JSON value is not an object")

    frames: list[float] = []
    raw_frames = doc.get("frames")
    if isinstance(raw_frames, list):
        for i, frame in enumerate(raw_frames):
            try:
                score = frame["metrics"]["vmaf"]
            except (KeyError, TypeError):
                raise NoVmafScoresFound(f"frame {i} has no metrics.vmaf entry") from None
            frames.append(_check_score(score))

    pooled = None
    try:
        pooled = doc["pooled_metrics"]["vmaf"]["mean"]
    except (KeyError, TypeError):
        pass
    if pooled is not None:
        pooled = _check_score(pooled)

    if not frames and pooled is None:
        raise NoVmafScoresFound("no VMAF frame scores or pooled mean found")
    return VmafLog(tuple(frames), pooled)


def parse_vmaf_log(path: str | Path) -> VmafLog:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"{path}: {exc}") from None
    try:
        return parse_vmaf_document(doc)
    except (NoVmafScoresFound, ScoreOutOfRange) as exc:
        raise type(exc)(f"{path}: {exc}") from None


def pool(log: VmafLog) -> float:
    """Pooled mean if the log has one, else the arithmetic mean of frames."""
    if log.pooled_mean is not None:
        return log.pooled_mean
    return math.fsum(log.frames) / len(log.frames)


def emit_metric_rows(
    logs: Mapping[str, VmafLog], dataset_id: str, scene_of: Mapping[str, str]
) -> list[MetricRow]:
    rows = []
    for video_id, log in logs.items():
        if video_id not in scene_of:
            raise MissingSceneMapping(video_id)
        rows.append(MetricRow(dataset_id, scene_of[video_id], video_id, "vmaf", pool(log)))
    return rows
