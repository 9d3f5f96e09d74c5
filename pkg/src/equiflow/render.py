"""Minimal SVG polyline renderer for curve snapshots.

Each figure shows the profile curve, its reflection through the origin
(the other half of the equivariant surface), and the boundary manifold
profile (hyperbola branches or the circle of radius 2), auto-fitted with a
10% margin.
"""

import math

import numpy as np

from .geometry import ProfileCurve

_SIZE = 640.0


def _hyperbola_branches(reach):
    t_max = max(1.0, math.acosh(max(1.5, reach)))
    t = np.linspace(-t_max, t_max, 200)
    branch = np.cosh(t) + 1j * np.sinh(t)
    return [branch, -branch]


def _circle(radius=2.0):
    t = np.linspace(0.0, 2.0 * np.pi, 181)
    return [radius * np.exp(1j * t)]


def _polyline(points, transform, style):
    pts = " ".join(f"{transform(p)[0]:.2f},{transform(p)[1]:.2f}" for p in points)
    return f'<polyline fill="none" {style} points="{pts}"/>'


def render_curve_svg(path, curve: ProfileCurve, boundary: str | None = None):
    """Write an SVG snapshot; boundary is "lawlor", "clifford" or None."""
    main = curve.z
    mirror = -curve.z
    groups = [(main, 'stroke="#202020" stroke-width="2"'),
              (mirror, 'stroke="#909090" stroke-width="2" stroke-dasharray="6,4"')]
    reach = float(np.max(np.abs(main))) * 1.2
    if boundary == "lawlor":
        for b in _hyperbola_branches(reach):
            groups.append((b, 'stroke="#3465a4" stroke-width="1.5"'))
    elif boundary == "clifford":
        for b in _circle():
            groups.append((b, 'stroke="#3465a4" stroke-width="1.5"'))
    xs = np.concatenate([g[0].real for g in groups])
    ys = np.concatenate([g[0].imag for g in groups])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    span = max(x1 - x0, y1 - y0, 1e-9)
    margin = 0.1 * span
    x0, x1 = x0 - margin, x1 + margin
    y0, y1 = y0 - margin, y1 + margin
    scale = _SIZE / max(x1 - x0, y1 - y0)

    def tf(p):
        return ((p.real - x0) * scale, (y1 - p.imag) * scale)

    w = (x1 - x0) * scale
    h = (y1 - y0) * scale
    body = "\n".join(_polyline(g, tf, style) for g, style in groups)
    svg = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" '
           f'height="{h:.0f}" viewBox="0 0 {w:.2f} {h:.2f}">\n{body}\n</svg>\n')
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
