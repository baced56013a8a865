"""Scene-level bootstrap of Pearson/Spearman correlations.

Each replicate draws ``len(scenes)`` scenes with replacement; a scene drawn k
times contributes all of its videos k times. The generator for replicate
``i`` is seeded from ``(seed, i)`` through :class:`numpy.random.SeedSequence`,
so draws do not depend on evaluation order or thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import AllReplicatesDegenerate, DegenerateVariance
from .ingest import Dataset
from .stats import pearson, spearman

SKIP = "skip"
ERROR = "error"


@dataclass(frozen=True)
class BootstrapConfig:
    n_resamples: int = 1000
    confidence: float = 0.95
    seed: int = 0
    degenerate_policy: str = SKIP

    def __post_init__(self) -> None:
        if self.n_resamples < 1:
            raise ValueError("n_resamples must be >= 1")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.degenerate_policy not in (SKIP, ERROR):
            raise ValueError(f"unknown degenerate policy {self.degenerate_policy!r}")


@dataclass(frozen=True)
class CorrelationSummary:
    label: str
    r_p_mean: float
    r_s_mean: float
    r_p_ci: tuple[float, float]
    r_s_ci: tuple[float, float]
    n_effective: int
    n_skipped: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["r_p_ci"] = list(self.r_p_ci)
        d["r_s_ci"] = list(self.r_s_ci)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "CorrelationSummary":
        return cls(
            d["label"],
            d["r_p_mean"],
            d["r_s_mean"],
            tuple(d["r_p_ci"]),
            tuple(d["r_s_ci"]),
            d["n_effective"],
            d["n_skipped"],
        )


def replicate_rng(seed: int, replicate_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, replicate_index]))


def resample_scenes(scenes: Sequence[str], replicate_index: int, seed: int) -> list[str]:
    if not scenes:
        raise ValueError("cannot resample an empty scene list")
    idx = replicate_rng(seed, replicate_index).integers(0, len(scenes), size=len(scenes))
    return [scenes[i] for i in idx]


class SceneView:
    """Per-scene (objective, MOS) arrays for one score assignment."""

    def __init__(self, dataset: Dataset, scores: Mapping[tuple[str, str], float]) -> None:
        self.scenes = dataset.scenes
        self._obj: dict[str, np.ndarray] = {}
        self._mos: dict[str, np.ndarray] = {}
        for scene, recs in dataset.by_scene().items():
            self._obj[scene] = np.array([scores[r.key] for r in recs], dtype=np.float64)
            self._mos[scene] = np.array([r.subjective.value for r in recs], dtype=np.float64)

    def pairs(self, sampled: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
        missing = [s for s in sampled if s not in self._obj]
        if missing:
            raise KeyError(f"sampled scene(s) not in view: {missing}")
        return (
            np.concatenate([self._obj[s] for s in sampled]),
            np.concatenate([self._mos[s] for s in sampled]),
        )


def replicate_correlation(
    view: SceneView, sampled: Sequence[str], policy: str = SKIP
) -> tuple[float, float] | None:
    """(r_p, r_s) over the concatenated pairs of ``sampled``; None means skipped."""
    obj, mos = view.pairs(sampled)
    try:
        return pearson(obj, mos), spearman(obj, mos)
    except DegenerateVariance:
        if policy == SKIP:
            return None
        raise


def _quantile(values: np.ndarray, q: float) -> float:
    return float(np.quantile(values, q, method="linear"))


def _mean(values: np.ndarray) -> float:
    # shifted so that identical replicates give back exactly that value
    ref = float(values[0])
    return ref + math.fsum(values - ref) / values.size


def summarize(
    label: str, replicate_values: Sequence[tuple[float, float] | None], config: BootstrapConfig
) -> CorrelationSummary:
    kept = [v for v in replicate_values if v is not None]
    n_skipped = len(replicate_values) - len(kept)
    if not kept:
        raise AllReplicatesDegenerate(f"{label}: all {len(replicate_values)} replicates were degenerate")
    rp = np.array([v[0] for v in kept], dtype=np.float64)
    rs = np.array([v[1] for v in kept], dtype=np.float64)
    tail = (1.0 - config.confidence) / 2.0
    return CorrelationSummary(
        label=label,
        r_p_mean=_mean(rp),
        r_s_mean=_mean(rs),
        r_p_ci=(_quantile(rp, tail), _quantile(rp, 1.0 - tail)),
        r_s_ci=(_quantile(rs, tail), _quantile(rs, 1.0 - tail)),
        n_effective=len(kept),
        n_skipped=n_skipped,
    )


def draw_all(scenes: Sequence[str], config: BootstrapConfig) -> list[list[str]]:
    return [resample_scenes(scenes, i, config.seed) for i in range(config.n_resamples)]


def bootstrap_label(
    label: str,
    dataset: Dataset,
    scores: Mapping[tuple[str, str], float],
    config: BootstrapConfig,
    threads: int = 1,
    draws: Sequence[Sequence[str]] | None = None,
) -> CorrelationSummary:
    """Bootstrap one label's scores over the scenes of ``dataset``.

    ``draws`` may be precomputed with :func:`draw_all` and shared between
    labels so every label sees the same resampled scene sets.
    """
    view = SceneView(dataset, scores)
    if draws is None:
        draws = draw_all(dataset.scenes, config)

    def one(i: int):
        return replicate_correlation(view, draws[i], config.degenerate_policy)

    if threads <= 1:
        values = [one(i) for i in range(config.n_resamples)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, range(config.n_resamples)))
    return summarize(label, values, config)
