"""Metric fusion of VMAF and DISTS with scene-level bootstrap correlation analysis."""

from .bootstrap import BootstrapConfig, CorrelationSummary
from .fusion import FusionSpec, fuse, fuse_dataset
from .ingest import Dataset, SubjectiveScore, VideoRecord, assemble, load_dataset
from .normalize import MinMax, ScalerSet, ZScore, fit_all
from .pipeline import RunConfig, run, split_by_scene
from .stats import pearson, ranks, spearman

__version__ = "0.1.0"

__all__ = [
    "BootstrapConfig",
    "CorrelationSummary",
    "Dataset",
    "FusionSpec",
    "MinMax",
    "RunConfig",
    "ScalerSet",
    "SubjectiveScore",
    "VideoRecord",
    "ZScore",
    "assemble",
    "fit_all",
    "fuse",
    "fuse_dataset",
    "load_dataset",
    "pearson",
    "ranks",
    "run",
    "spearman",
    "split_by_scene",
]
