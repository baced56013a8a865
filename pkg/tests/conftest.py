import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from metricfuse import ingest  # noqa: E402

DATA = Path(ingest.__file__).parent / "data"


@pytest.fixture
def toy_dir():
    return DATA


@pytest.fixture
def toy_dataset():
    return ingest.load_dataset(DATA / "toy_metrics.csv", DATA / "toy_subjective.csv")


def make_dataset(rows, dataset_id="T"):
    """Build a Dataset from ``(scene, video, {metric: value}, mos)`` tuples."""
    metrics = []
    subjective = []
    for scene, video, mvals, mos in rows:
        for name, value in mvals.items():
            metrics.append(ingest.MetricRow(dataset_id, scene, video, name, value))
        subjective.append(
            ingest.SubjectiveRow(dataset_id, scene, video, ingest.SubjectiveScore(ingest.Kind.MOS, mos, 1.0, 5.0))
        )
    return ingest.assemble(metrics, subjective)


_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the terminal summary."""
    name = request.node.name

    class Recorder:
        def check(self, ok: bool, detail: str = "") -> None:
            _ACCEPTANCE.append((name, bool(ok), detail))
            assert ok, detail

    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
