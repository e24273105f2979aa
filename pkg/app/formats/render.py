"""ASCII and SVG snapshots of configurations.

Rows are offset so the triangular grid reads naturally: +x is to the right,
+y up and to the right, +w up and to the left. Rigid bonds are solid disks,
flexible bonds hollow circles, both drawn at the bond midpoint.
"""
import hashlib
import string

import svgwrite

from app.models.enums import BondType, RenderFormat
from app.models.models import Configuration

RIGID_GLYPH = "*"
FLEXIBLE_GLYPH = "o"
_SYMBOLS = string.ascii_uppercase + string.ascii_lowercase + string.digits

PALETTE = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
]
SVG_SPACING = 40
SVG_RADIUS = 15


def state_symbols(config: Configuration) -> dict[str, str]:
    states = sorted(config.states())
    return {s: _SYMBOLS[i % len(_SYMBOLS)] for i, s in enumerate(states)}


def state_colour(state: str) -> str:
    digest = hashlib.blake2b(state.encode(), digest_size=2).digest()
    return PALETTE[int.from_bytes(digest, "big") % len(PALETTE)]


def _screen(x: int, y: int) -> tuple[int, int]:
    # Doubled coordinates: column 2*(2x + y), row measured upward as 2y.
    return 2 * (2 * x + y), 2 * y


def render_ascii(config: Configuration) -> str:
    if not config.monomers:
        return ""
    symbols = state_symbols(config)
    cells = {_screen(p.x, p.y): symbols[s] for p, s in config.monomers.items()}
    for (p, q), bond in config.bonds.items():
        (c1, r1), (c2, r2) = _screen(p.x, p.y), _screen(q.x, q.y)
        cells[((c1 + c2) // 2, (r1 + r2) // 2)] = RIGID_GLYPH if bond == BondType.RIGID else FLEXIBLE_GLYPH

    cols = [c for c, _ in cells]
    rows = [r for _, r in cells]
    min_c, max_c, min_r, max_r = min(cols), max(cols), min(rows), max(rows)
    lines = []
    for r in range(max_r, min_r - 1, -1):
        line = "".join(cells.get((c, r), " ") for c in range(min_c, max_c + 1))
        lines.append(line.rstrip())
    lines.append("")
    lines.extend(f"{symbol} = {state}" for state, symbol in sorted(symbols.items(), key=lambda kv: kv[1]))
    return "\n".join(lines) + "\n"


def render_svg(config: Configuration) -> str:
    if not config.monomers:
        return svgwrite.Drawing(size=(0, 0)).tostring()

    def position(x: int, y: int) -> tuple[float, float]:
        return (x + y / 2) * SVG_SPACING, -y * SVG_SPACING * 0.866

    points = {p: position(p.x, p.y) for p in config.monomers}
    xs = [x for x, _ in points.values()]
    ys = [y for _, y in points.values()]
    margin = SVG_SPACING
    min_x, min_y = min(xs) - margin, min(ys) - margin
    width, height = max(xs) - min_x + margin, max(ys) - min_y + margin

    dwg = svgwrite.Drawing(size=(f"{width:.0f}", f"{height:.0f}"))
    dwg.viewbox(min_x, min_y, width, height)
    bonds = dwg.add(dwg.g(id="bonds", stroke="#555555"))
    for (p, q), bond in sorted(config.bonds.items()):
        (x1, y1), (x2, y2) = points[p], points[q]
        bonds.add(dwg.line(start=(x1, y1), end=(x2, y2), stroke_width=2))
        mid = ((x1 + x2) / 2, (y1 + y2) / 2)
        if bond == BondType.RIGID:
            bonds.add(dwg.circle(center=mid, r=4, fill="red", stroke="red"))
        else:
            bonds.add(dwg.circle(center=mid, r=4, fill="white", stroke="red", stroke_width=1.5))
    monomers = dwg.add(dwg.g(id="monomers", font_size=9, font_family="monospace"))
    for p, state in sorted(config.monomers.items()):
        center = points[p]
        monomers.add(dwg.circle(center=center, r=SVG_RADIUS, fill=state_colour(state), stroke="black"))
        monomers.add(dwg.text(state, insert=(center[0], center[1] + 3), text_anchor="middle"))
    return dwg.tostring()


def render_snapshot(config: Configuration, fmt: RenderFormat = RenderFormat.ASCII) -> str:
    if RenderFormat(fmt) == RenderFormat.SVG:
        return render_svg(config)
    return render_ascii(config)
