"""Minimal static SVG emitters (display only; coordinates are floats)."""

from __future__ import annotations

from xml.sax.saxutils import escape

W, H, PAD = 640, 320, 40


def _scale(lo, hi, a, b):
    span = (hi - lo) or 1.0
    return lambda t: a + (t - lo) / span * (b - a)


def step_plot(breakpoints, values, title="", coord=0):
    """Step function through ``values[i]`` on [breakpoints[i], breakpoints[i+1])."""
    xs = [float(b) for b in breakpoints]
    ys = [float(v.free[coord]) if hasattr(v, "free") else float(v) for v in values]
    ylo, yhi = min(ys + [0.0]) - 1, max(ys + [0.0]) + 1
    sx = _scale(xs[0], xs[-1], PAD, W - PAD)
    sy = _scale(ylo, yhi, H - PAD, PAD)
    pts = []
    for a, b, y in zip(xs, xs[1:], ys):
        pts += [f"{sx(a):.2f},{sy(y):.2f}", f"{sx(b):.2f},{sy(y):.2f}"]
    return _frame(title, [
        f'<line x1="{PAD}" y1="{sy(0):.2f}" x2="{W - PAD}" y2="{sy(0):.2f}" stroke="#bbb"/>',
        f'<polyline fill="none" stroke="#1f4e9c" stroke-width="1.5" points="{" ".join(pts)}"/>',
        f'<text x="{PAD}" y="{H - 10}" font-size="11">0</text>',
        f'<text x="{W - PAD}" y="{H - 10}" font-size="11" text-anchor="end">{xs[-1]:.4g}</text>',
    ])


def scatter_plot(xs, ys, title=""):
    xs, ys = [float(x) for x in xs], [float(y) for y in ys]
    if not xs:
        return _frame(title, [])
    sx = _scale(min(xs), max(xs), PAD, W - PAD)
    sy = _scale(min(ys), max(ys), H - PAD, PAD)
    dots = [f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2" fill="#9c1f1f"/>'
            for x, y in zip(xs, ys)]
    return _frame(title, dots)


def _frame(title, body):
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="20" font-size="13" text-anchor="middle">{escape(title)}</text>',
        *body,
        "</svg>",
    ]) + "\n"
