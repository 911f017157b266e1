"""Three-panel plate diagrams: constituent a, constituent b, composite.

Glyphs follow the usual plate convention: a circle where the local group is
a rotation group, an ellipse where it is a conjugate of one, and a
perpendicular sign for discrete groups.  Ellipses are images of the unit
circle under the conjugator; the perpendicular sign is turned by the
rotation part of the local transplant.
"""

from __future__ import annotations

import math

import numpy as np

from .body import MaterialGroupoid
from .linalg import polar_right

CELL = 44
RADIUS = 14


def _glyph(group, transplant: np.ndarray | None, cx: float, cy: float) -> str:
    kind = group.kind
    if group.n != 2:
        return f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="3" fill="black"/>'
    if kind in ("SO", "O"):
        return f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="{RADIUS}" fill="none" stroke="black"/>'
    if kind == "conjugated" and group.base.kind in ("SO", "O"):
        u, s, _ = np.linalg.svd(group.conjugator)
        s = s / math.sqrt(s[0] * s[1])
        ang = math.degrees(math.atan2(u[1, 0], u[0, 0]))
        return (f'<ellipse cx="{cx:.1f}" cy="{cy:.1f}" rx="{RADIUS * s[0]:.2f}" ry="{RADIUS * s[1]:.2f}" '
                f'transform="rotate({-ang:.2f} {cx:.1f} {cy:.1f})" fill="none" stroke="black"/>')
    ang = 0.0
    if transplant is not None:
        q, _ = polar_right(transplant)
        ang = math.degrees(math.atan2(q[1, 0], q[0, 0]))
    r = RADIUS * 0.8
    return (f'<g transform="rotate({-ang:.2f} {cx:.1f} {cy:.1f})" stroke="black">'
            f'<line x1="{cx - r:.1f}" y1="{cy + r / 2:.1f}" x2="{cx + r:.1f}" y2="{cy + r / 2:.1f}"/>'
            f'<line x1="{cx:.1f}" y1="{cy + r / 2:.1f}" x2="{cx:.1f}" y2="{cy - r:.1f}"/></g>')


def _panel(g: MaterialGroupoid, ox: float, title: str, transplants: dict) -> tuple[list[str], float, float]:
    pos = [p.grid_pos for p in g.body.points]
    xs = [p[0] for p in pos]
    ys = [p[1] if len(p) > 1 else 1 for p in pos]
    w = (max(xs) - min(xs) + 1) * CELL
    h = (max(ys) - min(ys) + 1) * CELL
    out = [f'<text x="{ox + w / 2:.1f}" y="16" text-anchor="middle" font-size="12">{title}</text>',
           f'<rect x="{ox:.1f}" y="24" width="{w}" height="{h}" fill="none" stroke="#999"/>']
    for p, x, y in zip(g.body.points, xs, ys):
        cx = ox + (x - min(xs) + 0.5) * CELL
        cy = 24 + (max(ys) - y + 0.5) * CELL
        out.append(_glyph(g.vertex[p.id], transplants.get(p.id), cx, cy))
    return out, w, h


def plate_diagram(a: MaterialGroupoid, b: MaterialGroupoid, c: MaterialGroupoid,
                  titles=("constituent A", "constituent B", "composite")) -> str:
    parts, ox, height = [], 8.0, 0.0
    for g, title, tr in ((a, titles[0], a.transplants), (b, titles[1], b.transplants),
                         (c, titles[2], a.transplants)):
        body, w, h = _panel(g, ox, title, tr)
        parts += body
        ox += w + 24
        height = max(height, h)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{ox:.0f}" height="{height + 32:.0f}">'
            + "".join(parts) + "</svg>\n")
