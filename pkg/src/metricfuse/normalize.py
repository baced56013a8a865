"""Min-max and z-score scalers fitted on calibration data."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import DegenerateRange, MetricFuseError, MissingScaler
from .ingest import Dataset

DEGENERACY_TOL = 1e-12
KINDS = ("mm", "z")


@dataclass(frozen=True)
class MinMax:
    kind = "mm"

    min: float
    max: float
    metric_name: str = ""

    def __post_init__(self) -> None:
        if not self.min < self.max:
            raise DegenerateRange(f"min-max range for {self.metric_name!r} is empty", self.metric_name)

    def params(self) -> dict[str, float]:
        return {"min": self.min, "max": self.max}


@dataclass(frozen=True)
class ZScore:
    kind = "z"

    mu: float
    sigma: float
    metric_name: str = ""

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise DegenerateRange(f"sigma for {self.metric_name!r} must be positive", self.metric_name)

    def params(self) -> dict[str, float]:
        return {"mu": self.mu, "sigma": self.sigma}


ScalerParams = Union[MinMax, ZScore]


def _as_values(values: Iterable[float]) -> np.ndarray:
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot fit a scaler on an empty value list")
    if not np.all(np.isfinite(arr)):
        raise ValueError("scaler values must be finite")
    return arr.ravel()


def fit_minmax(values: Sequence[float], metric_name: str = "") -> MinMax:
    arr = _as_values(values)
    lo, hi = float(arr.min()), float(arr.max())
    if hi - lo < DEGENERACY_TOL:
        raise DegenerateRange(f"metric {metric_name!r} has range {hi - lo:g} < {DEGENERACY_TOL:g}", metric_name)
    return MinMax(lo, hi, metric_name)


def fit_zscore(values: Sequence[float], metric_name: str = "") -> ZScore:
    """Mean and population standard deviation (divisor N)."""
    arr = _as_values(values)
    mu = float(arr.mean())
    sigma = float(np.sqrt(np.mean((arr - mu) ** 2)))
    if sigma < DEGENERACY_TOL:
        raise DegenerateRange(f"metric {metric_name!r} has sigma {sigma:g} < {DEGENERACY_TOL:g}", metric_name)
    return ZScore(mu, sigma, metric_name)


def apply(scaler: ScalerParams, value, clamp: bool = False):
    """Normalize a scalar or array. ``clamp`` only affects min-max scalers."""
    if isinstance(scaler, MinMax):
        out = (np.asarray(value, dtype=np.float64) - scaler.min) / (scaler.max - scaler.min)
        if clamp:
            out = np.clip(out, 0.0, 1.0)
    else:
        out = (np.asarray(value, dtype=np.float64) - scaler.mu) / scaler.sigma
    return float(out) if out.ndim == 0 else out


_FITTERS = {"mm": fit_minmax, "z": fit_zscore}


@dataclass(frozen=True)
class ScalerSet:
    kind: str
    calibration_dataset_id: str
    scalers: Mapping[str, ScalerParams]

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown normalization kind {self.kind!r}")
        for name, sc in self.scalers.items():
            if sc.kind != self.kind:
                raise ValueError(f"scaler for {name!r} is {sc.kind}, set is {self.kind}")

    def __getitem__(self, metric: str) -> ScalerParams:
        try:
            return self.scalers[metric]
        except KeyError:
            raise MissingScaler(f"no {self.kind} scaler fitted for metric {metric!r}") from None

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "calibration_dataset_id": self.calibration_dataset_id,
            "scalers": {name: self.scalers[name].params() for name in sorted(self.scalers)},
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScalerSet":
        doc = json.loads(text)
        kind = doc["kind"]
        make = MinMax if kind == "mm" else ZScore
        scalers = {name: make(**params, metric_name=name) for name, params in doc["scalers"].items()}
        return cls(kind, doc["calibration_dataset_id"], scalers)


def fit_all(calibration: Dataset, kind: str, metrics: Sequence[str] | None = None) -> ScalerSet:
    """Fit one scaler per metric over all calibration videos pooled together.

    ``metrics`` restricts fitting to the named metrics (default: every metric
    in the dataset).
    """
    if kind not in _FITTERS:
        raise ValueError(f"unknown normalization kind {kind!r}")
    if not calibration.records:
        raise MetricFuseError("calibration dataset is empty")
    names = calibration.metric_names if metrics is None else tuple(metrics)
    scalers = {}
    for name in names:
        try:
            values = [rec.metrics[name] for rec in calibration.records]
        except KeyError:
            raise MissingScaler(f"calibration dataset {calibration.id!r} lacks metric {name!r}") from None
        scalers[name] = _FITTERS[kind](values, name)
    return ScalerSet(kind, calibration.id, scalers)
