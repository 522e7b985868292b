"""Static SVG line plots of a simulation trace.

Pure text output, no renderer dependency: one file per panel (bending-plane
angle, bending angle, tendon forces, spring temperatures with the
stress-shifted band-edge markers, martensite fractions).
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .engine import SimTrace
from .units import celsius_from_kelvin

_WIDTH, _HEIGHT = 640, 400
_ML, _MR, _MT, _MB = 64, 16, 32, 44
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

PANELS = ("phi", "theta", "force", "temperature", "xi")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    return [lo + span * i / (n - 1) for i in range(n)]


def _line_plot(
    path: Path,
    title: str,
    x_label: str,
    y_label: str,
    series: list[tuple[str, list[float], list[float]]],
    h_lines: list[tuple[str, float]] = (),
    v_lines: list[tuple[str, float]] = (),
) -> None:
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    ys_all += [y for _, y in h_lines]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if math.isclose(y_lo, y_hi, abs_tol=1e-12):
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    else:
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad
    if math.isclose(x_lo, x_hi):
        x_hi = x_lo + 1.0

    plot_w = _WIDTH - _ML - _MR
    plot_h = _HEIGHT - _MT - _MB

    def sx(x: float) -> float:
        return _ML + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return _MT + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<rect x="{_ML}" y="{_MT}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#444444" stroke-width="1"/>',
    ]
    for tick in _ticks(x_lo, x_hi):
        px = sx(tick)
        parts.append(
            f'<line x1="{px:.1f}" y1="{_MT + plot_h}" x2="{px:.1f}" '
            f'y2="{_MT + plot_h + 4}" stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{px:.1f}" y="{_MT + plot_h + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tick:.4g}</text>'
        )
    for tick in _ticks(y_lo, y_hi):
        py = sy(tick)
        parts.append(
            f'<line x1="{_ML - 4}" y1="{py:.1f}" x2="{_ML}" y2="{py:.1f}" '
            'stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{_ML - 8}" y="{py + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tick:.4g}</text>'
        )
    parts.append(
        f'<text x="{_ML + plot_w / 2:.1f}" y="{_HEIGHT - 8}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="16" y="{_MT + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {_MT + plot_h / 2:.1f})">{escape(y_label)}</text>'
    )
    for label, y in h_lines:
        py = sy(y)
        parts.append(
            f'<line x1="{_ML}" y1="{py:.1f}" x2="{_ML + plot_w}" y2="{py:.1f}" '
            'stroke="#888888" stroke-dasharray="6 3"/>'
        )
        parts.append(
            f'<text x="{_ML + plot_w - 4}" y="{py - 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10" fill="#555555">'
            f"{escape(label)}</text>"
        )
    for label, x in v_lines:
        if not x_lo <= x <= x_hi:
            continue
        px = sx(x)
        parts.append(
            f'<line x1="{px:.1f}" y1="{_MT}" x2="{px:.1f}" y2="{_MT + plot_h}" '
            'stroke="#888888" stroke-dasharray="6 3"/>'
        )
        parts.append(
            f'<text x="{px + 4:.1f}" y="{_MT + 12}" font-family="sans-serif" '
            f'font-size="10" fill="#555555">{escape(label)}</text>'
        )
    for idx, (label, xs, ys) in enumerate(series):
        color = _COLORS[idx % len(_COLORS)]
        points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{points}"/>'
        )
        parts.append(
            f'<text x="{_ML + plot_w - 4}" y="{_MT + 14 + 13 * idx}" '
            f'text-anchor="end" font-family="sans-serif" font-size="11" '
            f'fill="{color}">{escape(label)}</text>'
        )
    parts.append("</svg>")
    try:
        path.write_text("\n".join(parts) + "\n")
    except OSError as exc:
        raise OSError(f"writing plot to {path}: {exc}") from exc


def emit_plots(trace: SimTrace, out_dir, run_id: str = "neck") -> list[Path]:
    """Write the five trace panels as ``<run-id>_<panel>.svg``; returns paths."""
    if len(trace) == 0:
        raise ValueError("refusing to plot an empty trace")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t = trace.t
    written: list[Path] = []

    path = out / f"{run_id}_phi.svg"
    _line_plot(
        path,
        "bending-plane angle",
        "time [s]",
        "phi [deg]",
        [("phi", t, [math.degrees(v) for v in trace.phi])],
    )
    written.append(path)

    path = out / f"{run_id}_theta.svg"
    _line_plot(
        path,
        "bending angle",
        "time [s]",
        "theta [deg]",
        [("theta", t, [math.degrees(v) for v in trace.theta])],
    )
    written.append(path)

    path = out / f"{run_id}_force.svg"
    _line_plot(
        path,
        "tendon forces",
        "time [s]",
        "force [N]",
        [
            (f"unit {k + 1}", t, [row[k] for row in trace.unit_forces])
            for k in range(3)
        ],
    )
    written.append(path)

    h_lines = []
    v_lines = []
    if "as_prime_K" in trace.markers:
        h_lines.append(
            ("A_s' [degC]", celsius_from_kelvin(trace.markers["as_prime_K"]))
        )
    if "af_prime_K" in trace.markers:
        h_lines.append(
            ("A_f' [degC]", celsius_from_kelvin(trace.markers["af_prime_K"]))
        )
    if "crossing_t_s" in trace.markers:
        v_lines.append(("crossing [s]", trace.markers["crossing_t_s"]))
    n_springs = trace.n_springs
    path = out / f"{run_id}_temperature.svg"
    _line_plot(
        path,
        "spring temperatures",
        "time [s]",
        "temperature [degC]",
        [
            (
                f"spring {i + 1}",
                t,
                [celsius_from_kelvin(row[i]) for row in trace.spring_temperatures],
            )
            for i in range(n_springs)
        ],
        h_lines=h_lines,
        v_lines=v_lines,
    )
    written.append(path)

    path = out / f"{run_id}_xi.svg"
    _line_plot(
        path,
        "martensite fractions",
        "time [s]",
        "fraction [1]",
        [
            (f"spring {i + 1}", t, [row[i] for row in trace.spring_fractions])
            for i in range(n_springs)
        ],
        v_lines=v_lines,
    )
    written.append(path)
    return written
