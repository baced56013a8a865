"""Exception hierarchy shared by all metricfuse modules."""

from __future__ import annotations


class MetricFuseError(Exception):
    """Base class for every error raised by this package."""


# ingest
class MissingColumn(MetricFuseError):
    pass


class NonNumericValue(MetricFuseError):
    def __init__(self, row: int, value: str, path: str | None = None) -> None:
        self.row = row
        self.value = value
        self.path = path
        where = f"{path}:{row}" if path else f"row {row}"
        super().__init__(f"{where}: non-numeric value {value!r}")


class DuplicateRow(MetricFuseError):
    def __init__(self, key: tuple, row: int | None = None, path: str | None = None) -> None:
        self.key = key
        self.row = row
        where = f"{path}:{row}: " if path and row is not None else ""
        super().__init__(f"{where}duplicate row for key {key}")


class EmptyFile(MetricFuseError):
    pass


class UnknownKind(MetricFuseError):
    pass


class ScaleBoundsInvalid(MetricFuseError):
    pass


class OutOfRange(MetricFuseError):
    pass


class JoinMismatch(MetricFuseError):
    pass


class InconsistentMetricSet(MetricFuseError):
    pass


class DatasetMismatch(MetricFuseError):
    pass


# vmaf adapter
class MalformedJson(MetricFuseError):
    pass


class NoVmafScoresFound(MetricFuseError):
    pass


class ScoreOutOfRange(MetricFuseError):
    pass


class MissingSceneMapping(MetricFuseError):
    def __init__(self, video_id: str) -> None:
        self.video_id = video_id
        super().__init__(f"no scene mapping for video {video_id!r}")


# normalize / fusion
class DegenerateRange(MetricFuseError):
    def __init__(self, message: str, metric_name: str | None = None) -> None:
        self.metric_name = metric_name
        super().__init__(message)


class MissingScaler(MetricFuseError):
    pass


class MissingInput(MetricFuseError):
    def __init__(self, metric_name: str) -> None:
        self.metric_name = metric_name
        super().__init__(f"missing input metric {metric_name!r}")


# stats / bootstrap
class DegenerateVariance(MetricFuseError):
    pass


class TooFewPoints(MetricFuseError):
    pass


class AllReplicatesDegenerate(MetricFuseError):
    pass


# pipeline / report / cli
class TooFewScenes(MetricFuseError):
    pass


class UnknownLabel(MetricFuseError):
    def __init__(self, label: str) -> None:
        self.label = label
        super().__init__(f"unknown label {label!r}")


class ConfigError(MetricFuseError):
    pass


class UnsupportedFormat(MetricFuseError):
    pass


class EmptyReport(MetricFuseError):
    pass


class InvalidSpec(MetricFuseError):
    pass


def add_context(exc: BaseException, prefix: str) -> BaseException:
    """Prefix ``exc``'s message in place and return it for re-raising."""
    exc.args = (f"{prefix}: {exc}",)
    return exc
