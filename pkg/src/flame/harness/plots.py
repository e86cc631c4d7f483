"""Deterministic SVG rendering of metrics files.

Hand-rolled SVG keeps output byte-stable for identical input: fixed
canvas, fixed tick count, and %.6g coordinate formatting with no
timestamps or generated ids.
"""

from __future__ import annotations

from pathlib import Path

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 50
PLOT_KINDS = ("learning-curve", "mse-vs-nest", "goal-scatter")
_SERIES_COLORS = ("#1f6fb2", "#c44e52", "#55a868", "#8172b2")


class PlotError(ValueError):
    pass


def read_metrics_csv(path):
    """(columns, rows) from a metrics file; comment lines start with '#'."""
    lines = [ln for ln in Path(path).read_text().splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise PlotError("metrics file has no header row")
    columns = [c.strip() for c in lines[0].split(",")]
    if len(columns) < 2 or any(not c for c in columns):
        raise PlotError("malformed metrics header")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(columns):
            raise PlotError(f"row has {len(cells)} cells, expected "
                            f"{len(columns)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise PlotError(f"non-numeric cell: {exc}") from None
    return columns, rows


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _scale(vals, lo_px, hi_px):
    lo, hi = min(vals), max(vals)
    if hi == lo:
        hi = lo + 1.0
    span = hi - lo
    return lambda v: lo_px + (v - lo) / span * (hi_px - lo_px), lo, hi


def _axes_svg(x_label: str, y_label: str, xlo, xhi, ylo, yhi) -> list[str]:
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
    parts = [
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
        'fill="none" stroke="#333333" stroke-width="1"/>'
    ]
    for i in range(5):
        fx = i / 4.0
        px = x0 + fx * (x1 - x0)
        py = y0 - fx * (y0 - y1)
        xv = xlo + fx * (xhi - xlo)
        yv = ylo + fx * (yhi - ylo)
        parts.append(f'<line x1="{_fmt(px)}" y1="{y0}" x2="{_fmt(px)}" '
                     f'y2="{y0 + 5}" stroke="#333333"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{y0 + 20}" font-size="11" '
                     f'text-anchor="middle">{_fmt(xv)}</text>')
        parts.append(f'<line x1="{x0 - 5}" y1="{_fmt(py)}" x2="{x0}" '
                     f'y2="{_fmt(py)}" stroke="#333333"/>')
        parts.append(f'<text x="{x0 - 8}" y="{_fmt(py + 4)}" font-size="11" '
                     f'text-anchor="end">{_fmt(yv)}</text>')
    parts.append(f'<text x="{(x0 + x1) / 2}" y="{HEIGHT - 12}" '
                 f'font-size="13" text-anchor="middle">{x_label}</text>')
    parts.append(f'<text x="16" y="{(y0 + y1) / 2}" font-size="13" '
                 f'text-anchor="middle" transform="rotate(-90 16 '
                 f'{(y0 + y1) / 2})">{y_label}</text>')
    return parts


def _document(body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">\n'
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>')
    return head + "\n" + "\n".join(body) + "\n</svg>\n"


def _polyline(xs, ys, to_px_x, to_px_y, color: str) -> str:
    pts = " ".join(f"{_fmt(to_px_x(x))},{_fmt(to_px_y(y))}"
                   for x, y in zip(xs, ys))
    return (f'<polyline points="{pts}" fill="none" stroke="{color}" '
            'stroke-width="1.5"/>')


def _series_plot(series, x_label, y_label):
    """series: list of (label, xs, ys)."""
    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys]
    if not all_x:
        return _document(_axes_svg(x_label, y_label, 0.0, 1.0, 0.0, 1.0))
    to_x, xlo, xhi = _scale(all_x, MARGIN_L, WIDTH - MARGIN_R)
    to_y, ylo, yhi = _scale(all_y, HEIGHT - MARGIN_B, MARGIN_T)
    body = _axes_svg(x_label, y_label, xlo, xhi, ylo, yhi)
    for i, (label, xs, ys) in enumerate(series):
        color = _SERIES_COLORS[i % len(_SERIES_COLORS)]
        body.append(_polyline(xs, ys, to_x, to_y, color))
        if label:
            body.append(f'<text x="{WIDTH - MARGIN_R - 6}" '
                        f'y="{MARGIN_T + 16 + 14 * i}" font-size="11" '
                        f'text-anchor="end" fill="{color}">{label}</text>')
    return _document(body)


def emit_plot(metrics_path, kind: str, out_path) -> Path:
    """Render one panel kind from a metrics CSV to a deterministic SVG."""
    if kind not in PLOT_KINDS:
        raise PlotError(f"unknown plot kind {kind!r} "
                        f"(choose from {PLOT_KINDS})")
    columns, rows = read_metrics_csv(metrics_path)
    col = {name: i for i, name in enumerate(columns)}

    if kind == "learning-curve":
        if "step" not in col:
            raise PlotError("learning-curve needs a 'step' column")
        y_name = columns[1]
        xs = [r[col["step"]] for r in rows]
        ys = [r[col[y_name]] for r in rows]
        svg = _series_plot([("", xs, ys)], "step", y_name)
    elif kind == "mse-vs-nest":
        nest_cols = [c for c in columns if c.startswith("loglik_mse_nest")]
        if not nest_cols:
            raise PlotError("mse-vs-nest needs loglik_mse_nest* columns")
        if rows:
            last = rows[-1]
            xs = [float(c.removeprefix("loglik_mse_nest")) for c in nest_cols]
            ys = [last[col[c]] for c in nest_cols]
            order = sorted(range(len(xs)), key=lambda i: xs[i])
            xs = [xs[i] for i in order]
            ys = [ys[i] for i in order]
        else:
            xs, ys = [], []
        svg = _series_plot([("", xs, ys)], "integration steps",
                           "log-likelihood MSE")
    else:  # goal-scatter
        goal_cols = [c for c in columns if c.startswith("coverage_g")]
        if not goal_cols:
            raise PlotError("goal-scatter needs coverage_g* columns")
        xs = [r[col["step"]] for r in rows]
        series = [(c, xs, [r[col[c]] for r in rows]) for c in goal_cols]
        svg = _series_plot(series, "step", "terminal-state coverage")

    out_path = Path(out_path)
    out_path.write_text(svg)
    return out_path
