"""Hand-rendered SVG line charts: mean curves with +-1 std shaded bands.

Fixed 800x500 viewBox and a fixed palette mirroring the study's color
language (orange = no attack, green = attack, blue = DD, magenta = buffer).
Output bytes are deterministic for a given input.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["Series", "render_chart", "ORANGE", "GREEN", "BLUE", "MAGENTA"]

ORANGE = "#ff7f0e"
GREEN = "#2ca02c"
BLUE = "#1f77b4"
MAGENTA = "#e377c2"

_W, _H = 800, 500
_ML, _MR, _MT, _MB = 64, 16, 44, 48


@dataclass(frozen=True)
class Series:
    """One curve: (x, mean, std) points plus styling."""

    label: str
    points: tuple[tuple[float, float, float], ...]
    color: str
    dash: str | None = None


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_chart(
    series: list[Series],
    title: str = "",
    x_label: str = "number of CNOTs",
    y_label: str = "fidelity",
) -> str:
    if not series or all(not s.points for s in series):
        raise ValueError("nothing to plot")
    xs = [p[0] for s in series for p in s.points]
    x_min, x_max = min(xs), max(xs)
    if x_max == x_min:
        x_max = x_min + 1.0
    y_min, y_max = 0.0, 1.0

    px0, px1 = _ML, _W - _MR
    py0, py1 = _H - _MB, _MT

    def sx(x: float) -> float:
        return px0 + (x - x_min) / (x_max - x_min) * (px1 - px0)

    def sy(y: float) -> float:
        y = min(max(y, y_min), y_max)
        return py0 + (y - y_min) / (y_max - y_min) * (py1 - py0)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_W} {_H}" '
        f'width="{_W}" height="{_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{_W / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" '
            f'font-size="15">{title}</text>'
        )
    # gridlines and y ticks at 0, 0.2 ... 1.0
    for i in range(6):
        y = i / 5
        out.append(
            f'<line x1="{px0}" y1="{_fmt(sy(y))}" x2="{px1}" y2="{_fmt(sy(y))}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px0 - 8}" y="{_fmt(sy(y) + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{y:.1f}</text>'
        )
    # x ticks: at most 10, integer spacing
    span = x_max - x_min
    step = max(1, int(span // 9) or 1)
    tick = int(x_min)
    while tick <= x_max:
        out.append(
            f'<line x1="{_fmt(sx(tick))}" y1="{py0}" x2="{_fmt(sx(tick))}" y2="{py0 + 5}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(sx(tick))}" y="{py0 + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tick}</text>'
        )
        tick += step
    out.append(
        f'<line x1="{px0}" y1="{py0}" x2="{px1}" y2="{py0}" stroke="#000000" stroke-width="1.5"/>'
    )
    out.append(
        f'<line x1="{px0}" y1="{py0}" x2="{px0}" y2="{py1}" stroke="#000000" stroke-width="1.5"/>'
    )
    out.append(
        f'<text x="{(px0 + px1) / 2:.0f}" y="{_H - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{x_label}</text>'
    )
    out.append(
        f'<text x="16" y="{(py0 + py1) / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {(py0 + py1) / 2:.0f})">{y_label}</text>'
    )

    for s in series:
        pts = sorted(s.points)
        if not pts:
            continue
        upper = " ".join(f"{_fmt(sx(x))},{_fmt(sy(m + sd))}" for x, m, sd in pts)
        lower = " ".join(f"{_fmt(sx(x))},{_fmt(sy(m - sd))}" for x, m, sd in reversed(pts))
        out.append(
            f'<polygon points="{upper} {lower}" fill="{s.color}" fill-opacity="0.25" '
            f'stroke="none"/>'
        )
        line = " ".join(f"{_fmt(sx(x))},{_fmt(sy(m))}" for x, m, _ in pts)
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        out.append(
            f'<polyline points="{line}" fill="none" stroke="{s.color}" stroke-width="2"{dash}/>'
        )

    # legend, top-right inside the plot area
    for i, s in enumerate(sorted(series, key=lambda s: s.label)):
        ly = py1 + 14 + 16 * i
        out.append(
            f'<line x1="{px1 - 150}" y1="{ly}" x2="{px1 - 122}" y2="{ly}" '
            f'stroke="{s.color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{px1 - 116}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="11">{s.label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
