"""Deterministic SVG rendering of tile activity and instantiated wires.

Output is plain text built with fixed numeric formatting, so rendering the
same inputs twice yields byte-identical files. Tiles are drawn as a heatmap
of normalized power, wires as one rectangle per segment (so regional wire
density can be audited by counting elements), pads as circled markers.
"""

from __future__ import annotations

from pathlib import Path

from .classify import ClassMap, TileClass
from .gridgen import PdnLayout

_IDLE_FILL = "#ededed"


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _heat_color(p: float) -> str:
    """Light straw at p=0 to deep red at p=1; idle handled separately."""
    p = min(max(p, 0.0), 1.0)
    r = round(255 + (214 - 255) * p)
    g = round(243 + (39 - 243) * p)
    b = round(196 + (40 - 196) * p)
    return f"#{r:02x}{g:02x}{b:02x}"


def render_layout(layout: PdnLayout, cm: ClassMap | None = None,
                  pads_um: list[tuple[float, float]] | None = None) -> str:
    """Render one layout over its tile heatmap; returns SVG text."""
    ox, oy = layout.origin_um
    w, h = layout.die_w_um, layout.die_h_um
    top = oy + h

    def flip_rect(x: float, y: float, rw: float, rh: float) -> str:
        return (f'x="{_fmt(x)}" y="{_fmt(oy + (top - y - rh))}" '
                f'width="{_fmt(rw)}" height="{_fmt(rh)}"')

    margin = 0.02 * max(w, h)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(ox - margin)} {_fmt(oy - margin)} '
        f'{_fmt(w + 2 * margin)} {_fmt(h + 2 * margin)}">',
        f'<rect {flip_rect(ox, oy, w, h)} fill="#ffffff" stroke="#333333" '
        f'stroke-width="{_fmt(0.002 * max(w, h))}"/>',
    ]

    parts.append('<g id="tiles">')
    tile_w = w / layout.nx
    tile_h = h / layout.ny
    for i in range(layout.nx * layout.ny):
        ix, iy = i % layout.nx, i // layout.nx
        if cm is None:
            fill = "#ffffff"
            letter = "-"
        elif cm.tile_class(i) == TileClass.IDLE:
            fill = _IDLE_FILL
            letter = "I"
        else:
            fill = _heat_color(float(cm.normalized[i]))
            letter = cm.tile_class(i).letter
        parts.append(
            f'<rect {flip_rect(ox + ix * tile_w, oy + iy * tile_h, tile_w, tile_h)} '
            f'fill="{fill}" data-class="{letter}"/>')
    parts.append('</g>')

    # One rectangle per segment; widths are exaggerated to stay visible at
    # die scale but the centerline geometry is exact.
    display_w = {o: max(layout.widths.for_orientation(o), min(w, h) / 300.0)
                 for o in ("h", "v")}
    parts.append('<g id="wires">')
    for s in layout.segments:
        d = display_w[s.orientation]
        if s.orientation == "h":
            attrs = flip_rect(s.x0, s.y0 - d / 2, s.x1 - s.x0, d)
        else:
            attrs = flip_rect(s.x0 - d / 2, s.y0, d, s.y1 - s.y0)
        parts.append(f'<rect {attrs} fill="#1f3552" fill-opacity="0.85"/>')
    parts.append('</g>')

    parts.append('<g id="pads">')
    for px, py in pads_um or []:
        parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(oy + (top - py))}" '
            f'r="{_fmt(0.012 * max(w, h))}" fill="#ffcc00" stroke="#333333" '
            f'stroke-width="{_fmt(0.003 * max(w, h))}"/>')
    parts.append('</g>')

    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def save_svg(text: str, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path
