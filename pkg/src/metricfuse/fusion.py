"""Minimum-selection and averaging fusion of two normalized metrics."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import MissingInput, UnknownLabel
from .ingest import Dataset
from .normalize import ScalerSet, apply

STRATEGIES = ("min", "avg")
DEFAULT_INPUTS = ("vmaf", "dists")
_FUSED_LABEL = re.compile(r"^(min|avg)_(mm|z)$")


@dataclass(frozen=True)
class FusionSpec:
    """A fused score (``strategy`` in min/avg) or a single-metric passthrough.

    Passthrough specs carry ``normalization=None`` and a one-element
    ``inputs`` tuple.
    """

    strategy: str
    normalization: str | None = None
    inputs: tuple[str, ...] = DEFAULT_INPUTS

    def __post_init__(self) -> None:
        if self.strategy == "passthrough":
            if len(self.inputs) != 1:
                raise ValueError("passthrough takes exactly one metric")
        elif self.strategy in STRATEGIES:
            if self.normalization not in ("mm", "z"):
                raise ValueError(f"fused spec needs normalization mm or z, got {self.normalization!r}")
            if len(self.inputs) != 2 or self.inputs[0] == self.inputs[1]:
                raise ValueError(f"fusion needs two distinct metrics, got {self.inputs}")
        else:
            raise ValueError(f"unknown fusion strategy {self.strategy!r}")

    @property
    def label(self) -> str:
        if self.strategy == "passthrough":
            return self.inputs[0]
        return f"{self.strategy}_{self.normalization}"

    @property
    def is_fused(self) -> bool:
        return self.strategy != "passthrough"

    @classmethod
    def passthrough(cls, metric: str) -> "FusionSpec":
        return cls("passthrough", None, (metric,))


def parse_label(label: str, available: Iterable[str], inputs: tuple[str, str] = DEFAULT_INPUTS) -> FusionSpec:
    """``avg_mm``-style labels become fused specs; known metric names become passthroughs."""
    m = _FUSED_LABEL.match(label)
    if m:
        return FusionSpec(m.group(1), m.group(2), tuple(inputs))
    if label.lower() in set(available):
        return FusionSpec.passthrough(label.lower())
    raise UnknownLabel(label)


def fuse(spec: FusionSpec, normalized: Mapping[str, float]) -> float:
    for name in spec.inputs:
        if name not in normalized:
            raise MissingInput(name)
    if spec.strategy == "passthrough":
        return normalized[spec.inputs[0]]
    a, b = (normalized[n] for n in spec.inputs)
    if spec.strategy == "min":
        return min(a, b)
    return (a + b) / 2.0


def fuse_dataset(
    spec: FusionSpec, dataset: Dataset, scalers: ScalerSet | None, clamp: bool = False
) -> dict[tuple[str, str], float]:
    """Per-video scores keyed by (scene_id, video_id).

    Passthrough specs return the raw (post-inversion) metric and ignore
    ``scalers``.
    """
    out: dict[tuple[str, str], float] = {}
    for rec in dataset.records:
        if spec.is_fused:
            normalized = {}
            for name in spec.inputs:
                if name not in rec.metrics:
                    raise MissingInput(name)
                normalized[name] = apply(scalers[name], rec.metrics[name], clamp)
        else:
            normalized = rec.metrics
        out[rec.key] = float(fuse(spec, normalized))
    return out


def fused_rows_csv(dataset_id: str, label: str, scores: Mapping[tuple[str, str], float]) -> str:
    """Render fused scores as ``dataset,scene,video,label,value`` rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["dataset", "scene", "video", "label", "value"])
    for (scene, video), value in scores.items():
        writer.writerow([dataset_id, scene, video, label, repr(float(value))])
    return buf.getvalue()
