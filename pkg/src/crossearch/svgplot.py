"""Minimal deterministic SVG scatter plots for experiment tables.

No plotting dependency: the writer emits a fixed element order with fixed
number formatting, so the same rows always produce byte-identical files.
Circles show per-dimension means over instances, vertical bars one sample
standard deviation, and polylines the theory columns.
"""
from __future__ import annotations

from statistics import mean, stdev

__all__ = ["emit_plot"]

_WIDTH, _HEIGHT = 640, 440
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 20, 20, 60

# series name -> (row algorithms merged into it, color)
_SERIES = {
    "fig2": (
        ("reference", ("exhaustive", "descent_reference"), "#000000"),
        ("random_search", ("random_search",), "#808080"),
        ("crossover", ("crossover",), "#cc0000"),
        ("offspring", ("offspring",), "#0044cc"),
    ),
    "fig3": (
        ("reference", ("exhaustive", "descent_reference"), "#000000"),
        ("crossover", ("crossover",), "#cc0000"),
        ("offspring", ("offspring",), "#0044cc"),
        ("mean_field", ("mean_field",), "#007700"),
        ("mean_field_offspring", ("mean_field_offspring",), "#cc8800"),
    ),
}

# offspring-statistics rows carry their payload in offspring_mean
_MEAN_VALUED = {"offspring", "mean_field_offspring"}


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _collect(rows, kind):
    """Per series: {n: [values]} and {n: [theory means]}."""
    points, theory = {}, {}
    for name, algorithms, _ in _SERIES[kind]:
        value_of = (
            (lambda r: r.offspring_mean)
            if name in _MEAN_VALUED
            else (lambda r: r.best_value)
        )
        pts, thy = {}, {}
        for row in rows:
            if row.algorithm not in algorithms:
                continue
            value = value_of(row)
            if value is not None:
                pts.setdefault(row.n_dims, []).append(value)
            if row.theory_mean is not None:
                thy.setdefault(row.n_dims, []).append(row.theory_mean)
        points[name], theory[name] = pts, thy
    return points, theory


def _axis_limits(points, theory):
    xs, ys = set(), []
    for pts in points.values():
        for n, values in pts.items():
            xs.add(n)
            spread = stdev(values) if len(values) > 1 else 0.0
            ys.extend([mean(values) - spread, mean(values) + spread])
    for thy in theory.values():
        for n, values in thy.items():
            xs.add(n)
            ys.append(mean(values))
    if not xs or not ys:
        raise ValueError("no plottable rows")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_pad = max(0.5, 0.05 * (x_hi - x_lo))
    y_pad = max(0.05, 0.08 * (y_hi - y_lo))
    return (x_lo - x_pad, x_hi + x_pad), (y_lo - y_pad, y_hi + y_pad), sorted(xs)


def emit_plot(rows, kind: str, path) -> None:
    """Render rows from an experiment table to an SVG file."""
    if kind not in _SERIES:
        raise ValueError(f"kind must be one of {sorted(_SERIES)}, got {kind!r}")
    points, theory = _collect(rows, kind)
    (x_lo, x_hi), (y_lo, y_hi), x_ticks = _axis_limits(points, theory)

    def px(x):
        return _LEFT + (x - x_lo) / (x_hi - x_lo) * (_WIDTH - _LEFT - _RIGHT)

    def py(y):
        return _TOP + (y_hi - y) / (y_hi - y_lo) * (_HEIGHT - _TOP - _BOTTOM)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{_LEFT}" y1="{_HEIGHT - _BOTTOM}" x2="{_WIDTH - _RIGHT}" '
        f'y2="{_HEIGHT - _BOTTOM}" stroke="black"/>',
        f'<line x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT}" '
        f'y2="{_HEIGHT - _BOTTOM}" stroke="black"/>',
    ]
    for x in x_ticks:
        out.append(
            f'<line x1="{_fmt(px(x))}" y1="{_HEIGHT - _BOTTOM}" '
            f'x2="{_fmt(px(x))}" y2="{_HEIGHT - _BOTTOM + 5}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(px(x))}" y="{_HEIGHT - _BOTTOM + 20}" '
            f'font-size="12" text-anchor="middle">{x}</text>'
        )
    for i in range(6):
        y = y_lo + i * (y_hi - y_lo) / 5
        out.append(
            f'<line x1="{_LEFT - 5}" y1="{_fmt(py(y))}" x2="{_LEFT}" '
            f'y2="{_fmt(py(y))}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_LEFT - 8}" y="{_fmt(py(y) + 4)}" font-size="12" '
            f'text-anchor="end">{y:.3g}</text>'
        )
    out.append(
        f'<text x="{_fmt((_LEFT + _WIDTH - _RIGHT) / 2)}" y="{_HEIGHT - 15}" '
        f'font-size="13" text-anchor="middle">dimensions</text>'
    )

    series = _SERIES[kind]
    for idx, (name, _, color) in enumerate(series):
        thy = theory[name]
        if len(thy) >= 2:
            coords = " ".join(
                f"{_fmt(px(n))},{_fmt(py(mean(values)))}"
                for n, values in sorted(thy.items())
            )
            out.append(
                f'<polyline class="theory" fill="none" stroke="{color}" '
                f'stroke-dasharray="5,3" points="{coords}"/>'
            )
        shift = (idx - (len(series) - 1) / 2) * 6.0
        for n, values in sorted(points[name].items()):
            cx = px(n) + shift
            center = mean(values)
            spread = stdev(values) if len(values) > 1 else 0.0
            if spread > 0.0:
                out.append(
                    f'<line class="spread" x1="{_fmt(cx)}" '
                    f'y1="{_fmt(py(center - spread))}" x2="{_fmt(cx)}" '
                    f'y2="{_fmt(py(center + spread))}" stroke="{color}"/>'
                )
            out.append(
                f'<circle class="point" cx="{_fmt(cx)}" cy="{_fmt(py(center))}" '
                f'r="4" fill="{color}"/>'
            )
        out.append(
            f'<text x="{_WIDTH - _RIGHT - 150}" y="{_TOP + 15 + 16 * idx}" '
            f'font-size="12" fill="{color}">{name}</text>'
        )
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
