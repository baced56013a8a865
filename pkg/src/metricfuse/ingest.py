"""Loading and canonicalization of metric-score and subjective-score files.

Metric files are long-format CSV (``dataset,scene,video,metric,value``), one row
per (video, metric). Subjective files carry one row per video
(``dataset,scene,video,kind,value,scale_min,scale_max``) with ``kind`` either
``MOS`` or ``DMOS``. Both formats accept ``#`` comment lines.

:func:`assemble` joins the two, converts DMOS to MOS, inverts DISTS so that
higher is better, and drops (or rejects) scenes with missing data.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import (
    DatasetMismatch,
    DuplicateRow,
    EmptyFile,
    InconsistentMetricSet,
    JoinMismatch,
    MissingColumn,
    NonNumericValue,
    OutOfRange,
    ScaleBoundsInvalid,
    UnknownKind,
)

METRIC_COLUMNS = ("dataset", "scene", "video", "metric", "value")
SUBJECTIVE_COLUMNS = ("dataset", "scene", "video", "kind", "value", "scale_min", "scale_max")

# fused-score exports name the metric column "label"
_COLUMN_ALIASES = {"label": "metric"}

DISTS_TOLERANCE = 1e-9


class Kind(str, enum.Enum):
    MOS = "MOS"
    DMOS = "DMOS"


class MissingPolicy(str, enum.Enum):
    DROP_SCENE = "drop-scene"
    STRICT = "strict"


@dataclass(frozen=True)
class SubjectiveScore:
    kind: Kind
    value: float
    scale_min: float
    scale_max: float

    def __post_init__(self) -> None:
        if not self.scale_min < self.scale_max:
            raise ScaleBoundsInvalid(
                f"scale_min ({self.scale_min}) must be below scale_max ({self.scale_max})"
            )


class MetricRow(NamedTuple):
    dataset: str
    scene: str
    video: str
    metric: str
    value: float


class SubjectiveRow(NamedTuple):
    dataset: str
    scene: str
    video: str
    score: SubjectiveScore


@dataclass(frozen=True)
class VideoRecord:
    dataset_id: str
    scene_id: str
    video_id: str
    metrics: Mapping[str, float]
    subjective: SubjectiveScore

    @property
    def key(self) -> tuple[str, str]:
        return (self.scene_id, self.video_id)


@dataclass(frozen=True)
class Dataset:
    """An assembled, canonically ordered dataset.

    ``dropped_scenes`` is the drop report: scenes removed because some video
    lacked a subjective score or a metric value.
    """

    id: str
    records: tuple[VideoRecord, ...]
    scenes: tuple[str, ...] = field(init=False)
    dropped_scenes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        seen: dict[str, None] = {}
        for rec in self.records:
            seen.setdefault(rec.scene_id, None)
        object.__setattr__(self, "scenes", tuple(seen))

    @property
    def metric_names(self) -> tuple[str, ...]:
        if not self.records:
            return ()
        return tuple(sorted(self.records[0].metrics))

    def by_scene(self) -> dict[str, list[VideoRecord]]:
        groups: dict[str, list[VideoRecord]] = {s: [] for s in self.scenes}
        for rec in self.records:
            groups[rec.scene_id].append(rec)
        return groups

    def subset(self, scenes: Iterable[str]) -> "Dataset":
        keep = set(scenes)
        return Dataset(self.id, tuple(r for r in self.records if r.scene_id in keep))

    def map_metrics(self, fn) -> "Dataset":
        """Return a copy with ``fn(metrics_dict) -> metrics_dict`` applied per record."""
        records = tuple(
            VideoRecord(r.dataset_id, r.scene_id, r.video_id, dict(fn(dict(r.metrics))), r.subjective)
            for r in self.records
        )
        return Dataset(self.id, records, self.dropped_scenes)


def _parse_float(text: str, row: int, path: str | None) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise NonNumericValue(row, text, path) from None
    if not math.isfinite(value):
        raise NonNumericValue(row, text, path)
    return value


def _read_rows(
    source: str | Path | io.TextIOBase, required: Sequence[str]
) -> Iterator[tuple[int, dict[str, str]]]:
    """Yield ``(line_number, row)`` pairs, skipping comments and blank lines."""
    if isinstance(source, (str, Path)):
        path = str(source)
        with open(source, newline="", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        path = getattr(source, "name", None)
        lines = source.read().splitlines()

    numbered = [
        (i, line)
        for i, line in enumerate(lines, start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not numbered:
        raise MissingColumn(f"{path or '<input>'}: missing header; expected {','.join(required)}")

    header_line, header_text = numbered[0]
    header = [_COLUMN_ALIASES.get(h.strip().lower(), h.strip().lower()) for h in next(csv.reader([header_text]))]
    missing = [c for c in required if c not in header]
    if missing:
        raise MissingColumn(f"{path or '<input>'}:{header_line}: missing column(s) {', '.join(missing)}")
    if len(numbered) == 1:
        raise EmptyFile(f"{path or '<input>'}: no data rows")

    for lineno, text in numbered[1:]:
        cells = next(csv.reader([text]))
        if len(cells) < len(header):
            raise MissingColumn(f"{path or '<input>'}:{lineno}: expected {len(header)} fields, got {len(cells)}")
        yield lineno, {h: c.strip() for h, c in zip(header, cells)}


def load_metrics(source, columns: Sequence[str] = METRIC_COLUMNS) -> list[MetricRow]:
    """Parse a long-format metric file; row order is preserved.

    Metric names are lower-cased. A repeated (dataset, scene, video, metric)
    key raises :class:`DuplicateRow`.
    """
    path = str(source) if isinstance(source, (str, Path)) else None
    out: list[MetricRow] = []
    seen: set[tuple[str, str, str, str]] = set()
    for lineno, row in _read_rows(source, columns):
        key = (row["dataset"], row["scene"], row["video"], row["metric"].lower())
        if key in seen:
            raise DuplicateRow(key, lineno, path)
        seen.add(key)
        out.append(MetricRow(*key, _parse_float(row["value"], lineno, path)))
    return out


def load_subjective(source) -> list[SubjectiveRow]:
    path = str(source) if isinstance(source, (str, Path)) else None
    out: list[SubjectiveRow] = []
    seen: set[tuple[str, str, str]] = set()
    for lineno, row in _read_rows(source, SUBJECTIVE_COLUMNS):
        kind_text = row["kind"].upper()
        try:
            kind = Kind(kind_text)
        except ValueError:
            raise UnknownKind(f"{path or 'row'}:{lineno}: unknown subjective kind {row['kind']!r}") from None
        value = _parse_float(row["value"], lineno, path)
        lo = _parse_float(row["scale_min"], lineno, path)
        hi = _parse_float(row["scale_max"], lineno, path)
        if not lo < hi:
            raise ScaleBoundsInvalid(f"{path or 'row'}:{lineno}: scale_min {lo} >= scale_max {hi}")
        if kind is Kind.MOS and not lo <= value <= hi:
            raise OutOfRange(f"{path or 'row'}:{lineno}: MOS {value} outside [{lo}, {hi}]")
        key = (row["dataset"], row["scene"], row["video"])
        if key in seen:
            raise DuplicateRow(key, lineno, path)
        seen.add(key)
        out.append(SubjectiveRow(*key, SubjectiveScore(kind, value, lo, hi)))
    return out


def to_mos(s: SubjectiveScore, reference: float | None = None) -> SubjectiveScore:
    """Approximate a MOS from a DMOS.

    The hidden reference is assumed to score ``reference`` (default: the top
    of the scale), so ``MOS = reference - DMOS``, clamped into the scale.
    MOS inputs are returned unchanged.
    """
    if s.kind is Kind.MOS:
        return s
    top = s.scale_max if reference is None else reference
    value = min(max(top - s.value, s.scale_min), s.scale_max)
    return SubjectiveScore(Kind.MOS, value, s.scale_min, s.scale_max)


def invert_dists(value: float) -> float:
    if not -DISTS_TOLERANCE <= value <= 1.0 + DISTS_TOLERANCE:
        raise OutOfRange(f"DISTS value {value} outside [0, 1]")
    return min(max(1.0 - value, 0.0), 1.0)


def assemble(
    metrics: Sequence[MetricRow],
    subjective: Sequence[SubjectiveRow],
    policy: MissingPolicy | str = MissingPolicy.DROP_SCENE,
    dataset_id: str | None = None,
    dmos_reference: float | None = None,
) -> Dataset:
    """Join metric and subjective rows into a :class:`Dataset`.

    If ``dataset_id`` is given, rows of other datasets are ignored; otherwise
    all rows must share a single dataset id. Records are ordered by
    (scene_id, video_id).
    """
    policy = MissingPolicy(policy)
    if dataset_id is not None:
        metrics = [m for m in metrics if m.dataset == dataset_id]
        subjective = [s for s in subjective if s.dataset == dataset_id]
    ids = {m.dataset for m in metrics} | {s.dataset for s in subjective}
    if len(ids) > 1:
        raise DatasetMismatch(f"inputs span several datasets: {sorted(ids)}")
    if not ids:
        raise EmptyFile(f"no rows for dataset {dataset_id!r}" if dataset_id else "no rows to assemble")
    ds_id = ids.pop()

    per_video: dict[tuple[str, str], dict[str, float]] = {}
    for m in metrics:
        value = invert_dists(m.value) if m.metric == "dists" else m.value
        per_video.setdefault((m.scene, m.video), {})[m.metric] = value
    scores = {(s.scene, s.video): to_mos(s.score, dmos_reference) for s in subjective}

    metric_set = set().union(*per_video.values()) if per_video else set()
    bad_scenes: dict[str, str] = {}
    for key in sorted(set(per_video) | set(scores)):
        scene, video = key
        if key not in scores:
            reason = f"video {scene}/{video} has metrics but no subjective score"
            exc: type[Exception] = JoinMismatch
        elif key not in per_video:
            reason = f"video {scene}/{video} has a subjective score but no metrics"
            exc = JoinMismatch
        elif set(per_video[key]) != metric_set:
            lacking = sorted(metric_set - set(per_video[key]))
            reason = f"video {scene}/{video} lacks metric(s) {', '.join(lacking)}"
            exc = InconsistentMetricSet
        else:
            continue
        if policy is MissingPolicy.STRICT:
            raise exc(reason)
        bad_scenes.setdefault(scene, reason)

    records = tuple(
        VideoRecord(ds_id, scene, video, per_video[(scene, video)], scores[(scene, video)])
        for scene, video in sorted(set(per_video) & set(scores))
        if scene not in bad_scenes
    )
    if not records:
        raise EmptyFile(f"dataset {ds_id!r} has no complete scenes")
    return Dataset(ds_id, records, tuple(sorted(bad_scenes)))


def load_dataset(
    metrics_path,
    subjective_path,
    dataset_id: str | None = None,
    policy: MissingPolicy | str = MissingPolicy.DROP_SCENE,
    dmos_reference: float | None = None,
) -> Dataset:
    return assemble(
        load_metrics(metrics_path),
        load_subjective(subjective_path),
        policy=policy,
        dataset_id=dataset_id,
        dmos_reference=dmos_reference,
    )
