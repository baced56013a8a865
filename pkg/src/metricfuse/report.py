"""Rendering of correlation summaries as markdown, CSV, JSON and SVG."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, fields
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .bootstrap import CorrelationSummary
from .errors import EmptyReport, UnsupportedFormat

FORMATS = ("markdown", "csv", "json", "svg")
CSV_COLUMNS = (
    "config", "calib_videos", "calib_scenes", "test_videos", "test_scenes", "label",
    "rp_mean", "rp_lo", "rp_hi", "rs_mean", "rs_lo", "rs_hi", "n_effective", "n_skipped",
)
_FLOAT_COLUMNS = ("rp_mean", "rp_lo", "rp_hi", "rs_mean", "rs_lo", "rs_hi")


@dataclass(frozen=True)
class ReportRow:
    config: str
    calib_videos: int
    calib_scenes: int
    test_videos: int
    test_scenes: int
    label: str
    rp_mean: float
    rp_lo: float
    rp_hi: float
    rs_mean: float
    rs_lo: float
    rs_hi: float
    n_effective: int
    n_skipped: int

    @classmethod
    def from_summary(cls, config: str, counts, s: CorrelationSummary) -> "ReportRow":
        return cls(
            config,
            counts.calibration_videos,
            counts.calibration_scenes,
            counts.test_videos,
            counts.test_scenes,
            s.label,
            s.r_p_mean, s.r_p_ci[0], s.r_p_ci[1],
            s.r_s_mean, s.r_s_ci[0], s.r_s_ci[1],
            s.n_effective,
            s.n_skipped,
        )


@dataclass(frozen=True)
class ReportDocument:
    rows: tuple[ReportRow, ...]

    @classmethod
    def from_results(cls, results: Iterable) -> "ReportDocument":
        """Build from one or more :class:`~metricfuse.pipeline.RunResult`."""
        rows = []
        for res in results:
            rows.extend(ReportRow.from_summary(res.config_label, res.counts, s) for s in res.summaries)
        return cls(tuple(rows))

    def groups(self) -> list[list[ReportRow]]:
        out: list[list[ReportRow]] = []
        for row in self.rows:
            if out and out[-1][0].config == row.config:
                out[-1].append(row)
            else:
                out.append([row])
        return out


def fmt3(x: float) -> str:
    """Three decimals, ties to even on the shortest decimal repr of ``x``."""
    d = Decimal(repr(float(x))).quantize(Decimal("0.001"), rounding=ROUND_HALF_EVEN)
    if d.is_zero():
        d = abs(d)
    return f"{d:.3f}"


def _markdown(doc: ReportDocument) -> str:
    lines = [
        "| Dataset | #Samples(C/T) | Fusion | r_p mean | r_s mean |",
        "|---|---|---|---|---|",
    ]
    for group in doc.groups():
        # best is judged on the displayed value so visually tied cells bold together
        best_p = max((Decimal(fmt3(r.rp_mean)) for r in group))
        best_s = max((Decimal(fmt3(r.rs_mean)) for r in group))
        mark = len(group) > 1
        for i, r in enumerate(group):
            rp, rs = fmt3(r.rp_mean), fmt3(r.rs_mean)
            if mark and Decimal(rp) == best_p:
                rp = f"**{rp}**"
            if mark and Decimal(rs) == best_s:
                rs = f"**{rs}**"
            if i == 0:
                dataset = r.config
                samples = (
                    f"{r.calib_videos} / {r.test_videos} "
                    f"({r.calib_scenes} / {r.test_scenes} scenes)"
                )
            else:
                dataset = samples = ""
            lines.append(f"| {dataset} | {samples} | {r.label} | {rp} | {rs} |")
    return "\n".join(lines) + "\n"


def _csv(doc: ReportDocument) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in doc.rows:
        d = asdict(r)
        writer.writerow([fmt3(d[c]) if c in _FLOAT_COLUMNS else d[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def _json(doc: ReportDocument) -> str:
    return json.dumps({"rows": [asdict(r) for r in doc.rows]}, indent=2) + "\n"


def parse_json(text: str) -> ReportDocument:
    names = {f.name for f in fields(ReportRow)}
    rows = []
    for d in json.loads(text)["rows"]:
        rows.append(ReportRow(**{k: d[k] for k in names}))
    return ReportDocument(tuple(rows))


def render_table(doc: ReportDocument, fmt: str) -> str:
    if not doc.rows:
        raise EmptyReport("no summaries to render")
    if fmt == "markdown":
        return _markdown(doc)
    if fmt == "csv":
        return _csv(doc)
    if fmt == "json":
        return _json(doc)
    if fmt == "svg":
        return render_errorbar_svg(
            [_summary_of(r) for r in doc.rows],
            title=" | ".join(dict.fromkeys(r.config for r in doc.rows)),
        )
    raise UnsupportedFormat(f"unsupported report format {fmt!r}; choose from {', '.join(FORMATS)}")


def _summary_of(r: ReportRow) -> CorrelationSummary:
    return CorrelationSummary(
        r.label, r.rp_mean, r.rs_mean, (r.rp_lo, r.rp_hi), (r.rs_lo, r.rs_hi), r.n_effective, r.n_skipped
    )


# ---- SVG ---------------------------------------------------------------------

_PLOT_H = 300.0
_TOP = 40.0
_LEFT = 56.0
_GROUP_W = 72.0
_BAR_W = 22.0
_CAP_W = 10.0
_COLORS = {"r_p": "#4c72b0", "r_s": "#dd8452"}


def _y(v: float) -> float:
    # y-axis fixed to [-1, 1]
    return _TOP + (1.0 - v) / 2.0 * _PLOT_H


def quoteattr_body(text: str) -> str:
    return escape(text, {'"': "&quot;"})


def _n(v: float) -> str:
    return f"{v:.2f}"


def render_errorbar_svg(summaries: Sequence[CorrelationSummary], title: str = "") -> str:
    """Grouped bars of mean r_p / r_s per label with CI whiskers."""
    if not summaries:
        raise EmptyReport("no summaries to plot")
    width = _LEFT + _GROUP_W * len(summaries) + 130.0
    height = _TOP + _PLOT_H + 60.0
    right = _LEFT + _GROUP_W * len(summaries)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_n(width)}" height="{_n(height)}" '
        f'viewBox="0 0 {_n(width)} {_n(height)}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{_n(width)}" height="{_n(height)}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f'<text x="{_n(_LEFT)}" y="20.00" font-size="13">{escape(title)}</text>')
    for tick in (-1.0, -0.5, 0.0, 0.5, 1.0):
        y = _n(_y(tick))
        out.append(f'<line x1="{_n(_LEFT)}" y1="{y}" x2="{_n(right)}" y2="{y}" stroke="#dddddd"/>')
        out.append(f'<text x="{_n(_LEFT - 6)}" y="{y}" text-anchor="end" dominant-baseline="middle">{tick:.1f}</text>')
    out.append(f'<line x1="{_n(_LEFT)}" y1="{_n(_y(1.0))}" x2="{_n(_LEFT)}" y2="{_n(_y(-1.0))}" stroke="#000000"/>')
    out.append(f'<line x1="{_n(_LEFT)}" y1="{_n(_y(0.0))}" x2="{_n(right)}" y2="{_n(_y(0.0))}" stroke="#000000"/>')

    for g, s in enumerate(summaries):
        x0 = _LEFT + g * _GROUP_W + (_GROUP_W - 2 * _BAR_W) / 2.0
        out.append(f'<g class="label" data-label="{quoteattr_body(s.label)}">')
        for b, (name, mean, (lo, hi)) in enumerate(
            (("r_p", s.r_p_mean, s.r_p_ci), ("r_s", s.r_s_mean, s.r_s_ci))
        ):
            x = x0 + b * _BAR_W
            top, base = min(_y(mean), _y(0.0)), max(_y(mean), _y(0.0))
            cx = x + _BAR_W / 2.0
            out.append(
                f'<rect class="{name}" x="{_n(x)}" y="{_n(top)}" width="{_n(_BAR_W)}" '
                f'height="{_n(base - top)}" fill="{_COLORS[name]}"/>'
            )
            out.append(f'<line class="whisker" x1="{_n(cx)}" y1="{_n(_y(hi))}" x2="{_n(cx)}" y2="{_n(_y(lo))}" stroke="#000000"/>')
            for v in (lo, hi):
                out.append(
                    f'<line class="cap" x1="{_n(cx - _CAP_W / 2)}" y1="{_n(_y(v))}" '
                    f'x2="{_n(cx + _CAP_W / 2)}" y2="{_n(_y(v))}" stroke="#000000"/>'
                )
        label_x = _LEFT + g * _GROUP_W + _GROUP_W / 2.0
        out.append(
            f'<text x="{_n(label_x)}" y="{_n(_y(-1.0) + 18)}" text-anchor="middle">{escape(s.label)}</text>'
        )
        out.append("</g>")

    lx = right + 16.0
    for i, name in enumerate(("r_p", "r_s")):
        ly = _TOP + 10.0 + i * 18.0
        out.append(f'<rect x="{_n(lx)}" y="{_n(ly - 9)}" width="12.00" height="12.00" fill="{_COLORS[name]}"/>')
        out.append(f'<text x="{_n(lx + 18)}" y="{_n(ly)}" dominant-baseline="middle">{name} mean, CI whiskers</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
