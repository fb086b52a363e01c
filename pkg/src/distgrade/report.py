"""Grading a whole dataset and rendering the results.

Numbers are printed with six decimals, rounded half-to-even from the
shortest decimal representation of the float (so ``0.0000015`` prints as
``0.000002`` and ``0.0000025`` also as ``0.000002``).
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from xml.sax.saxutils import escape

import numpy as np

from .dataset import Scenario
from .distributions import normal_cdf
from .ecdf import ecdf_eval, one_sample_gaps
from .exceptions import DegenerateSample
from .kstest import (
    DEFAULT_ALPHA,
    EstimatedParametersWarning,
    PMethod,
    TestKind,
    ks_normality_test,
    ks_two_sample_test,
)

CSV_HEADER = ("variable", "scenario", "test", "n", "d", "p", "conclusion")
TEXT_HEADER = ("Variables", "Scenario", "Test", "n", "D - statistics", "P-value", "Conclusion")
FORMATS = ("text", "csv", "json")
TWO_SAMPLE_SCENARIO = "baseline-vs-p2m"
GRID_POINTS = 256

_SIX = Decimal("0.000001")


def fmt6(x):
    """Fixed six-decimal text, round-half-to-even."""
    return format(Decimal(repr(float(x))).quantize(_SIX, rounding=ROUND_HALF_EVEN), "f")


@dataclass(frozen=True)
class ReportRow:
    variable: str
    scenario: str
    test_kind: str
    n_text: str
    d_text: str
    p_text: str
    conclusion: str
    p_method: str
    params_estimated: bool
    n: object

    @classmethod
    def from_result(cls, r):
        if r.test_kind is TestKind.TWO_SAMPLE_COMPARE:
            n_text, n = f"{r.n}/{r.n_b}", [r.n, r.n_b]
        else:
            n_text, n = str(r.n), r.n
        return cls(
            variable=r.variable,
            scenario=r.scenario,
            test_kind=r.test_kind.value,
            n_text=n_text,
            d_text=fmt6(r.statistic.d),
            p_text=fmt6(r.p_value),
            conclusion=r.verdict.conclusion,
            p_method=r.p_method.label,
            params_estimated=r.params_estimated,
            n=n,
        )


def grade_dataset(
    ds,
    alpha=DEFAULT_ALPHA,
    method=None,
    include_two_sample=True,
    *,
    allow_fallback=False,
):
    """Run every test on a dataset.

    Order: variables as they first appear; for each, the Baseline and P2M
    normality tests, then the Baseline-vs-P2M comparison when both series
    exist and ``include_two_sample`` is set.

    Normal parameters are always estimated from each series.  The per-test
    warning about estimated parameters is collapsed into a single warning.
    """
    method = method or PMethod.exact()
    results = []
    estimated_warned = False
    for name, series in ds:
        for scen, sample in series.items():
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", EstimatedParametersWarning)
                try:
                    res = ks_normality_test(
                        sample,
                        None,
                        alpha,
                        method,
                        variable=name,
                        scenario=scen.short,
                        allow_fallback=allow_fallback,
                    )
                except DegenerateSample as exc:
                    raise DegenerateSample(
                        str(exc), variable=name, scenario=scen.short
                    ) from exc
            for w in caught:
                if issubclass(w.category, EstimatedParametersWarning):
                    estimated_warned = True
                else:
                    warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
            results.append(res)
        if include_two_sample and len(series) == 2:
            results.append(
                ks_two_sample_test(
                    series[Scenario.BASELINE],
                    series[Scenario.P2M],
                    alpha,
                    method,
                    variable=name,
                    scenario=TWO_SAMPLE_SCENARIO,
                    allow_fallback=allow_fallback,
                )
            )
    if estimated_warned:
        warnings.warn(
            "normal parameters were estimated from each series; exact and "
            "asymptotic KS p-values are conservative under estimation "
            "(a Monte Carlo method corrects for it)",
            EstimatedParametersWarning,
            stacklevel=2,
        )
    return results


def _render_text(rows):
    table = [TEXT_HEADER] + [
        (r.variable, r.scenario, r.test_kind, r.n_text, r.d_text, r.p_text, r.conclusion)
        for r in rows
    ]
    widths = [max(len(line[c]) for line in table) for c in range(len(TEXT_HEADER))]
    right = {3, 4, 5}
    out = []
    for line in table:
        cells = [
            cell.rjust(w) if c in right else cell.ljust(w)
            for c, (cell, w) in enumerate(zip(line, widths))
        ]
        out.append("  ".join(cells).rstrip())
    return "\n".join(out) + "\n"


def _render_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow((r.variable, r.scenario, r.test_kind, r.n_text, r.d_text, r.p_text, r.conclusion))
    return buf.getvalue()


def _render_json(rows):
    if not rows:
        return "[]\n"
    objs = []
    for r in rows:
        # d and p are written as literal six-decimal JSON numbers
        fields = [
            ("variable", json.dumps(r.variable)),
            ("scenario", json.dumps(r.scenario)),
            ("test", json.dumps(r.test_kind)),
            ("n", json.dumps(r.n)),
            ("d", r.d_text),
            ("p", r.p_text),
            ("conclusion", json.dumps(r.conclusion)),
            ("p_method", json.dumps(r.p_method)),
            ("params_estimated", json.dumps(r.params_estimated)),
        ]
        body = ",\n".join(f'    "{k}": {v}' for k, v in fields)
        objs.append("  {\n" + body + "\n  }")
    return "[\n" + ",\n".join(objs) + "\n]\n"


def render_table(results, fmt="text"):
    """Render results as ``text``, ``csv`` or ``json``."""
    rows = [ReportRow.from_result(r) for r in results]
    if fmt == "text":
        return _render_text(rows)
    if fmt == "csv":
        return _render_csv(rows)
    if fmt == "json":
        return _render_json(rows)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


@dataclass(frozen=True)
class PlotSeries:
    """ECDF and fitted normal CDF on a common abscissa, plus the KS gap.

    ``points`` holds ``(x, f_n, f_theoretical)`` sorted by ``x``.  The gap
    is drawn at ``x_star`` from ``gap_low`` to ``gap_high``; for a lower-side
    maximum the ECDF ordinate is its left limit at ``x_star``.
    """

    variable: str
    scenario: str
    points: tuple
    x_star: float
    gap: float
    gap_low: float
    gap_high: float


def ecdf_plot_data(sample, params, variable="", scenario=""):
    """Plot data comparing the sample ECDF with ``Normal(params)``."""
    x = sample.values
    cdf = lambda v: normal_cdf(v, params)  # noqa: E731
    grid = np.linspace(x[0] - params.sigma, x[-1] + params.sigma, GRID_POINTS)
    xs = np.union1d(x, grid)
    fn = ecdf_eval(sample, xs)
    ft = cdf(xs)
    points = tuple(zip(xs.tolist(), fn.tolist(), ft.tolist()))

    upper, lower = one_sample_gaps(sample, cdf)
    iu, il = int(np.argmax(upper)), int(np.argmax(lower))
    f = cdf(x)
    if upper[iu] >= lower[il]:
        x_star = float(x[iu])
        gap_low, gap_high = float(f[iu]), (iu + 1) / sample.n
    else:
        x_star = float(x[il])
        gap_low, gap_high = il / sample.n, float(f[il])
    gap = float(max(0.0, upper[iu], lower[il]))
    return PlotSeries(variable, scenario, points, x_star, gap, gap_low, gap_high)


_W, _H = 800, 500
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _c(v):
    return f"{v:.2f}"


def render_svg(series):
    """Self-contained 800x500 SVG of a ``PlotSeries``."""
    pw, ph = _W - _ML - _MR, _H - _MT - _MB
    xs = [p[0] for p in series.points]
    x0, x1 = xs[0], xs[-1]
    span = (x1 - x0) or 1.0

    def sx(v):
        return _ML + (v - x0) / span * pw

    def sy(f):
        return _MT + (1.0 - f) * ph

    step = []
    prev_f = None
    for x, fn, _ in series.points:
        if prev_f is not None and fn != prev_f:
            step.append((sx(x), sy(prev_f)))
        step.append((sx(x), sy(fn)))
        prev_f = fn
    smooth = [(sx(x), sy(ft)) for x, _, ft in series.points]

    def pts(seq):
        return " ".join(f"{_c(a)},{_c(b)}" for a, b in seq)

    title = escape(" ".join(t for t in (series.variable, series.scenario) if t))
    gx = _c(sx(series.x_star))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<path class="axes" d="M{_ML},{_MT} V{_MT + ph} H{_ML + pw}" '
        'fill="none" stroke="black" stroke-width="1"/>',
        f'<text x="{_ML - 8}" y="{_c(sy(0.0) + 4)}" font-size="12" text-anchor="end">0</text>',
        f'<text x="{_ML - 8}" y="{_c(sy(1.0) + 4)}" font-size="12" text-anchor="end">1</text>',
        f'<text x="{_ML}" y="{_H - 15}" font-size="12">{x0:.6g}</text>',
        f'<text x="{_ML + pw}" y="{_H - 15}" font-size="12" text-anchor="end">{x1:.6g}</text>',
        f'<text x="{_W // 2}" y="24" font-size="14" text-anchor="middle">'
        f"{title + ': ' if title else ''}D = {fmt6(series.gap)}</text>",
        f'<polyline class="ecdf" points="{pts(step)}" fill="none" stroke="#1f77b4" '
        'stroke-width="1.5"/>',
        f'<polyline class="cdf" points="{pts(smooth)}" fill="none" stroke="#d62728" '
        'stroke-width="1.5"/>',
        f'<line class="ks-gap" x1="{gx}" y1="{_c(sy(series.gap_low))}" x2="{gx}" '
        f'y2="{_c(sy(series.gap_high))}" stroke="black" stroke-width="2" '
        'stroke-dasharray="4,3"/>',
        "</svg>",
    ]
    return "\n".join(lines) + "\n"
