"""SVG rendering of a configuration."""
from __future__ import annotations

import math
from xml.sax.saxutils import quoteattr

from ._io import atomic_write
from .geometry import DISK


def _f(v):
    return repr(float(v))


def render_svg(config, out=None, pixels=800, margin=0.05) -> str:
    """One <ellipse> per grain in sampling order (rx = R, ry = 1 or R for
    disks, rotated by V in degrees), over the window rectangle.  The y axis
    points up: the scene sits in a group mirrored about the x axis."""
    w = config.window
    x0, y0, x1, y1 = w.bounds()
    pad = margin * max(x1 - x0, y1 - y0)
    vx, vy = x0 - pad, -(y1 + pad)
    vw, vh = x1 - x0 + 2 * pad, y1 - y0 + 2 * pad
    scale = pixels / max(vw, vh)
    stroke = _f(1.0 / scale)
    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width={quoteattr(_f(vw * scale))} height={quoteattr(_f(vh * scale))} '
        f'viewBox="{_f(vx)} {_f(vy)} {_f(vw)} {_f(vh)}">',
        '<g transform="scale(1,-1)">',
        f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" height="{_f(y1 - y0)}" '
        f'fill="none" stroke="black" stroke-width="{stroke}"/>',
    ]
    disk = config.grain_kind == DISK
    for x, y, R, V in zip(config.x, config.y, config.R, config.V):
        ry = R if disk else 1.0
        lines.append(
            f'<ellipse cx="{_f(x)}" cy="{_f(y)}" rx="{_f(R)}" ry="{_f(ry)}" '
            f'transform="rotate({_f(math.degrees(V))} {_f(x)} {_f(y)})" '
            f'fill="steelblue" fill-opacity="0.35" stroke="navy" stroke-width="{stroke}"/>')
    lines += ["</g>", "</svg>", ""]
    doc = "\n".join(lines)
    if out is not None:
        atomic_write(out, doc)
    return doc
