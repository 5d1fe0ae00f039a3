"""Hand-rolled SVG 1.1 polyline plots; keeps the toolkit free of charting deps."""

from __future__ import annotations

import math

_WIDTH, _HEIGHT = 720, 540
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 78, 24, 36, 58
_COLORS = ("#1f6fb2", "#c8421f", "#3a8f3a", "#7a4fa3")


def _ticks(lo: float, hi: float, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


def render_plot(series, *, title="", xlabel="", ylabel="", log_x=False, markers=()):
    """SVG text for polyline series.

    series: iterable of (xs, ys, label); markers: iterable of (x, y, label).
    With log_x the x data must be positive and is drawn on a log10 axis.
    """
    def tx(x):
        return math.log10(x) if log_x else x

    xs_all, ys_all = [], []
    for xs, ys, _ in series:
        xs_all.extend(tx(float(v)) for v in xs)
        ys_all.extend(float(v) for v in ys)
    for mx, my, _ in markers:
        xs_all.append(tx(float(mx)))
        ys_all.append(float(my))
    if not xs_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    x_pad = 0.05 * (x_hi - x_lo or 1.0)
    y_pad = 0.05 * (y_hi - y_lo or 1.0)
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#444" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15" '
            f'font-family="sans-serif">{title}</text>'
        )

    if log_x:
        x_ticks = list(range(math.ceil(x_lo), math.floor(x_hi) + 1))
        x_labels = [f"1e{t:d}" for t in x_ticks]
    else:
        x_ticks = _ticks(x_lo, x_hi)
        x_labels = [f"{t:.4g}" for t in x_ticks]
    for t, lab in zip(x_ticks, x_labels):
        x = px(t)
        parts.append(
            f'<line x1="{x:.2f}" y1="{_MARGIN_T + plot_h}" x2="{x:.2f}" '
            f'y2="{_MARGIN_T + plot_h + 5}" stroke="#444"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{_MARGIN_T + plot_h + 20}" text-anchor="middle" '
            f'font-size="12" font-family="sans-serif">{lab}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        y = py(t)
        parts.append(
            f'<line x1="{_MARGIN_L - 5}" y1="{y:.2f}" x2="{_MARGIN_L}" y2="{y:.2f}" stroke="#444"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 9}" y="{y + 4:.2f}" text-anchor="end" font-size="12" '
            f'font-family="sans-serif">{t:.4g}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_HEIGHT - 16}" text-anchor="middle" '
            f'font-size="13" font-family="sans-serif">{xlabel}</text>'
        )
    if ylabel:
        yy = _MARGIN_T + plot_h / 2
        parts.append(
            f'<text x="20" y="{yy:.1f}" text-anchor="middle" font-size="13" '
            f'font-family="sans-serif" transform="rotate(-90 20 {yy:.1f})">{ylabel}</text>'
        )

    for i, (xs, ys, label) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(tx(float(x))):.2f},{py(float(y)):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        if label:
            ly = _MARGIN_T + 16 + 16 * i
            parts.append(
                f'<line x1="{_WIDTH - _MARGIN_R - 150}" y1="{ly - 4}" x2="{_WIDTH - _MARGIN_R - 126}" '
                f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
            )
            parts.append(
                f'<text x="{_WIDTH - _MARGIN_R - 120}" y="{ly}" font-size="12" '
                f'font-family="sans-serif">{label}</text>'
            )

    for mx, my, label in markers:
        parts.append(
            f'<circle cx="{px(tx(float(mx))):.2f}" cy="{py(float(my)):.2f}" r="4" '
            'fill="#c8421f" stroke="#7a1f0a"/>'
        )
        if label:
            parts.append(
                f'<text x="{px(tx(float(mx))) + 7:.2f}" y="{py(float(my)) - 7:.2f}" font-size="11" '
                f'font-family="sans-serif">{label}</text>'
            )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
