"""Exit criteria for the package, one test per criterion.

Each test reports a PASS/FAIL line in the "acceptance criteria" section of
the pytest terminal summary.
"""

import json
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

import oracles
from metricfuse import cli, synthetic
from metricfuse.bootstrap import BootstrapConfig, CorrelationSummary, summarize
from metricfuse.fusion import FusionSpec, fuse
from metricfuse.ingest import Kind, MetricRow, assemble, load_dataset, load_subjective
from metricfuse.normalize import apply, fit_minmax, fit_zscore
from metricfuse.pipeline import Counts, RunConfig, run, split_by_scene
from metricfuse.report import ReportDocument, ReportRow, parse_json, render_table
from metricfuse.stats import pearson, spearman

DATA = Path(__file__).parent / "data"
FUSION_LABELS = ("avg_mm", "min_mm", "avg_z", "min_z")
ALL_LABELS = FUSION_LABELS + ("vmaf", "dists")


def _synthetic_dataset(tmp_path, scenes, videos, noise, model, seed):
    spec = synthetic.SyntheticSpec(scenes, videos, noise, model, seed)
    paths = synthetic.write(spec, tmp_path)
    return paths, load_dataset(paths["metrics"], paths["subjective"])


def test_ac01_correlation_oracle_equivalence(criterion):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    checked = 0
    for i in range(200):
        n = int(rng.integers(3, 51))
        x = rng.uniform(0, 1, n)
        y = rng.uniform(0, 1, n)
        if i % 5 == 0:
            # inject ties into both vectors
            k = max(2, n // 3)
            x[rng.choice(n, k, replace=False)] = x[0]
            y[rng.choice(n, k, replace=False)] = y[1]
        x, y = x.tolist(), y.tolist()
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        worst = max(worst, abs(pearson(x, y) - oracles.pearson(x, y)))
        worst = max(worst, abs(spearman(x, y) - oracles.spearman(x, y)))
        checked += 1
    elapsed = time.perf_counter() - start
    criterion.check(
        checked >= 190 and worst < 1e-10 and elapsed < 5.0,
        f"samples={checked} max|d|={worst:.2e} (<1e-10) time={elapsed:.2f}s (<5s)",
    )


def test_ac02_tie_free_spearman_closed_form(criterion):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(3, 60))
        x = rng.permutation(n).astype(float) + rng.uniform(0, 0.5)
        y = rng.normal(size=n)
        assert len(set(y.tolist())) == n
        worst = max(worst, abs(spearman(x, y) - oracles.spearman_closed_form(x.tolist(), y.tolist())))
    criterion.check(worst < 1e-10, f"max|d|={worst:.2e} (<1e-10)")


def test_ac03_normalization_self_consistency(criterion):
    rng = np.random.default_rng(3)
    worst_mm = worst_mu = worst_sigma = 0.0
    ranks_ok = True
    for _ in range(100):
        n = int(rng.integers(2, 200))
        v = rng.uniform(-50, 150, n) * rng.uniform(0.01, 10)
        mm = apply(fit_minmax(v), v)
        worst_mm = max(worst_mm, abs(mm.min() - 0.0), abs(mm.max() - 1.0))
        ranks_ok &= bool(np.all((mm >= 0) & (mm <= 1)))
        z = apply(fit_zscore(v), v)
        worst_mu = max(worst_mu, abs(z.mean()))
        worst_sigma = max(worst_sigma, abs(z.std() - 1.0))
        order = np.argsort(v, kind="stable")
        for out in (mm, z):
            sv, so = v[order], out[order]
            strict = sv[1:] > sv[:-1]
            ranks_ok &= bool(np.all(so[1:][strict] > so[:-1][strict]))
            ranks_ok &= bool(np.all(so[1:][~strict] == so[:-1][~strict]))
    criterion.check(
        worst_mm <= 1e-12 and worst_mu <= 1e-9 and worst_sigma <= 1e-9 and ranks_ok,
        f"mm endpoint err={worst_mm:.1e} z mean err={worst_mu:.1e} z sigma err={worst_sigma:.1e} "
        f"rank-preserving={ranks_ok}",
    )


def test_ac04_fusion_bounds(criterion):
    rng = np.random.default_rng(4)
    lo_spec, avg_spec = FusionSpec("min", "mm"), FusionSpec("avg", "mm")
    ok = True
    for a, b in rng.normal(0, 2, (1000, 2)).tolist():
        m = fuse(lo_spec, {"vmaf": a, "dists": b})
        g = fuse(avg_spec, {"vmaf": a, "dists": b})
        ok &= m <= g <= max(a, b)
        ok &= m == fuse(lo_spec, {"vmaf": b, "dists": a})
        ok &= g == fuse(avg_spec, {"vmaf": b, "dists": a})
    criterion.check(ok, "1000 pairs: min <= avg <= max, exact symmetry")


def test_ac05_bootstrap_determinism_across_threads(tmp_path, criterion):
    paths, _ = _synthetic_dataset(tmp_path / "data", 20, 20, 0.5, "avg-driven", 11)
    cfg = json.loads(paths["config"].read_text())
    cfg["bootstrap"]["n_resamples"] = 1000
    paths["config"].write_text(json.dumps(cfg))
    outputs = {}
    start = time.perf_counter()
    for threads in (1, 8):
        out = tmp_path / f"t{threads}"
        assert cli.main(["run", "--config", str(paths["config"]), "--out", str(out), "--threads", str(threads)]) == 0
        outputs[threads] = (out / "report.json").read_bytes()
    elapsed = time.perf_counter() - start
    same = outputs[1] == outputs[8]
    criterion.check(same and elapsed < 30.0, f"identical={same} time={elapsed:.2f}s for both runs (<30s)")


def test_ac06_single_test_scene_zero_width(tmp_path, criterion):
    _, ds = _synthetic_dataset(tmp_path, 2, 10, 0.5, "avg-driven", 6)
    cfg = RunConfig("SYN", "SYN", "within", ALL_LABELS, BootstrapConfig(200, seed=2), fraction=0.8)
    res = run(cfg, {"SYN": ds})
    assert res.counts.test_scenes == 1
    ok = all(
        s.r_p_ci[0] == s.r_p_ci[1] == s.r_p_mean and s.r_s_ci[0] == s.r_s_ci[1] == s.r_s_mean
        for s in res.summaries
    )
    criterion.check(ok, f"{len(res.summaries)} labels with ci.low == ci.high == mean")


def test_ac07_quantile_oracle(criterion):
    values = [tuple(v) for v in json.loads((DATA / "replicates_1000.json").read_text())["replicates"]]
    s = summarize("fixture", values, BootstrapConfig(1000, 0.95))
    rp = [v[0] for v in values]
    rs = [v[1] for v in values]
    expected = (
        oracles.quantile(rp, 0.025), oracles.quantile(rp, 0.975),
        oracles.quantile(rs, 0.025), oracles.quantile(rs, 0.975),
    )
    got = (*s.r_p_ci, *s.r_s_ci)
    worst = max(abs(a - b) for a, b in zip(got, expected))
    two = summarize("two", [(0.0, 0.0), (1.0, 1.0)], BootstrapConfig(2, 0.95))
    two_ok = abs(two.r_p_ci[0] - 0.025) < 1e-12 and abs(two.r_p_ci[1] - 0.975) < 1e-12
    criterion.check(worst < 1e-12 and two_ok, f"max|d|={worst:.1e} (<1e-12) two-point CI={two.r_p_ci}")


def test_ac08_synthetic_end_to_end(tmp_path, criterion):
    start = time.perf_counter()
    means = {}
    for model in ("avg-driven", "vmaf-driven"):
        _, ds = _synthetic_dataset(tmp_path / model, 20, 20, 0.5, model, 2024)
        cfg = RunConfig("SYN", "SYN", "within", ALL_LABELS, BootstrapConfig(1000, seed=7), seed=7)
        means[model] = {s.label: s.r_s_mean for s in run(cfg, {"SYN": ds}, threads=4).summaries}
    elapsed = time.perf_counter() - start
    a, v = means["avg-driven"], means["vmaf-driven"]
    fusion_wins = all(a[f] > max(a["vmaf"], a["dists"]) for f in ("avg_mm", "avg_z"))
    driver_wins = all(v["vmaf"] >= v[f] for f in ("avg_mm", "avg_z"))
    individual_near = all(abs(a[m] - 0.8) < 0.05 for m in ("vmaf", "dists"))
    criterion.check(
        fusion_wins and driver_wins and individual_near and elapsed < 60.0,
        "avg-driven r_s: "
        + " ".join(f"{k}={a[k]:.3f}" for k in ("avg_mm", "avg_z", "vmaf", "dists"))
        + " | vmaf-driven r_s: "
        + " ".join(f"{k}={v[k]:.3f}" for k in ("vmaf", "avg_mm", "avg_z"))
        + f" | time={elapsed:.1f}s",
    )


def test_ac09_split_count_fidelity(tmp_path, criterion):
    _, s20 = _synthetic_dataset(tmp_path / "a", 20, 20, 0.0, "avg-driven", 1)
    _, s16 = _synthetic_dataset(tmp_path / "b", 16, 3, 0.0, "avg-driven", 1)
    sp20 = split_by_scene(s20, 0.8, seed=123)
    sp16 = split_by_scene(s16, 0.8, seed=123)
    videos = (len(s20.subset(sp20.calibration_scenes).records), len(s20.subset(sp20.test_scenes).records))
    got = (len(sp20.calibration_scenes), len(sp20.test_scenes), *videos, len(sp16.calibration_scenes), len(sp16.test_scenes))
    criterion.check(got == (16, 4, 320, 80, 12, 4), f"20 scenes -> 16/4 (videos {videos[0]}/{videos[1]}); 16 scenes -> {got[4]}/{got[5]}")


def test_ac10_report_format_fidelity(criterion):
    s = CorrelationSummary("avg_z", 0.883, 0.867, (0.80012345678901234, 0.9412), (1 / 3, 0.91), 1000, 0)
    doc = ReportDocument((ReportRow.from_summary("Calib - S / Test - S", Counts(320, 16, 80, 4), s),))
    md = render_table(doc, "markdown")
    csv_row = render_table(doc, "csv").splitlines()[1].split(",")
    cells_ok = "avg_z | 0.883 | 0.867" in md and "0.883" in csv_row and "0.867" in csv_row
    back = parse_json(render_table(doc, "json"))
    row = back.rows[0]
    values = (row.rp_mean, row.rs_mean, row.rp_lo, row.rp_hi, row.rs_lo, row.rs_hi)
    originals = (0.883, 0.867, 0.80012345678901234, 0.9412, 1 / 3, 0.91)
    digits_ok = all(float(f"{a:.17g}") == b for a, b in zip(values, originals))
    criterion.check(cells_ok and back == doc and digits_ok, f"cells={cells_ok} json round-trip={back == doc}")


def test_ac11_no_leakage(tmp_path, criterion):
    _, ds = _synthetic_dataset(tmp_path, 10, 6, 0.3, "avg-driven", 3)
    cfg = RunConfig("SYN", "SYN", "within", ("avg_mm", "avg_z"), BootstrapConfig(20), seed=4)
    base = run(cfg, {"SYN": ds})
    test_scenes = set(base.split.test_scenes)
    mutated = type(ds)(
        ds.id,
        tuple(
            replace(r, metrics={k: v * 10 for k, v in r.metrics.items()}) if r.scene_id in test_scenes else r
            for r in ds.records
        ),
    )
    again = run(cfg, {"SYN": mutated})
    same = all(base.scalers[k].to_json() == again.scalers[k].to_json() for k in ("mm", "z"))
    moved = base.test_scores["avg_mm"] != again.test_scores["avg_mm"]
    criterion.check(same and moved, f"scaler JSON identical={same}; test scores changed={moved}")


def test_ac12_ingest_golden_path(toy_dir, criterion):
    ds = load_dataset(toy_dir / "toy_metrics.csv", toy_dir / "toy_subjective.csv")
    drop_ok = ds.scenes == ("drums", "lego") and ds.dropped_scenes == ("ship",)
    rows = load_subjective(toy_dir / "toy_dmos.csv")
    mrows = [MetricRow("TOYD", r.scene, r.video, "vmaf", 50.0) for r in rows]
    toyd = assemble(mrows, rows)
    got = {r.video_id: r.subjective.value for r in toyd.records}
    conv_ok = (
        got["truck_v1"] == pytest.approx(3.8, abs=1e-12)
        and got["truck_v2"] == 1.0
        and got["truck_v3"] == 5.0
        and got["truck_v4"] == pytest.approx(2.5, abs=1e-12)
        and all(r.subjective.kind is Kind.MOS for r in toyd.records)
    )
    criterion.check(drop_ok and conv_ok, f"scenes={ds.scenes} dropped={ds.dropped_scenes} DMOS->MOS={got}")
