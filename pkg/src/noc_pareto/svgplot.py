"""Self-contained SVG emitters for front scatters and topology drawings.

Data CSVs are the primary artifact; these plots exist for quick visual
inspection without pulling in a plotting stack.
"""

from __future__ import annotations

from noc_pareto.layout import TiledLayout, router_position
from noc_pareto.pareto import ParetoRecord
from noc_pareto.topology import LinkAllocation


def _svg(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>'] + body + ["</svg>"]) + "\n"


def front_svg(records: list[ParetoRecord], front: list[ParetoRecord],
              width: int = 640, height: int = 440) -> str:
    """Scatter of all per-bin records (power on x, latency on y) with the
    non-dominated front drawn as a line."""
    ml, mr, mt, mb = 60, 20, 20, 50
    if not records:
        return _svg(width, height, ['<text x="20" y="40">no records</text>'])
    xs = [r.power_bin for r in records]
    ys = [r.latency_cycles for r in records]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x0 == x1:
        x0, x1 = x0 - 1, x1 + 1
    if y0 == y1:
        y0, y1 = y0 - 1, y1 + 1

    def px(x: float) -> float:
        return ml + (x - x0) / (x1 - x0) * (width - ml - mr)

    def py(y: float) -> float:
        return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb)

    body = [
        f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>',
        f'<text x="{(ml + width - mr) / 2:.1f}" y="{height - 12}" text-anchor="middle" '
        f'font-size="13">power (W, binned)</text>',
        f'<text x="16" y="{(mt + height - mb) / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {(mt + height - mb) / 2:.1f})">latency (cycles)</text>',
    ]
    for xv in range(x0, x1 + 1, max(1, (x1 - x0) // 8)):
        body.append(
            f'<text x="{px(xv):.1f}" y="{height - mb + 16}" text-anchor="middle" font-size="11">{xv}</text>'
        )
    for i in range(5):
        yv = y0 + (y1 - y0) * i / 4
        body.append(
            f'<text x="{ml - 6}" y="{py(yv) + 4:.1f}" text-anchor="end" font-size="11">{yv:.1f}</text>'
        )
    front_set = {r.power_bin for r in front}
    pts = " ".join(f"{px(r.power_bin):.1f},{py(r.latency_cycles):.1f}" for r in front)
    if len(front) > 1:
        body.append(f'<polyline points="{pts}" fill="none" stroke="#d62728" stroke-width="1.5"/>')
    for r in records:
        if r.power_bin in front_set:
            body.append(
                f'<circle cx="{px(r.power_bin):.1f}" cy="{py(r.latency_cycles):.1f}" r="4" fill="#d62728"/>'
            )
        else:
            body.append(
                f'<circle cx="{px(r.power_bin):.1f}" cy="{py(r.latency_cycles):.1f}" r="3" fill="#7f7f7f"/>'
            )
    return _svg(width, height, body)


def topology_svg(alloc: LinkAllocation, layout: TiledLayout,
                 mesh_links: set[tuple[int, int]] | None = None,
                 tile_px: int = 70) -> str:
    """Grid drawing of an allocation; links shared with the reference mesh
    are black, the rest blue. Links are drawn as straight segments between
    tile centers (connectivity, not physical wiring)."""
    rows, cols = layout.grid_rows, layout.grid_cols
    pad = 40
    width = cols * tile_px + 2 * pad
    height = rows * tile_px + 2 * pad

    def center(r: int) -> tuple[float, float]:
        gr, gc = router_position(r, layout)
        return pad + (gc + 0.5) * tile_px, pad + (gr + 0.5) * tile_px

    body = []
    mesh_links = mesh_links or set()
    for i, j in alloc.links():
        (x1, y1), (x2, y2) = center(i), center(j)
        color = "black" if (i, j) in mesh_links else "#1f77b4"
        body.append(
            f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
            f'stroke="{color}" stroke-width="1.6" stroke-opacity="0.85"/>'
        )
    for r in range(alloc.n_routers):
        x, y = center(r)
        body.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="9" fill="#ffdd88" stroke="black"/>')
        body.append(
            f'<text x="{x:.1f}" y="{y + 3.5:.1f}" text-anchor="middle" font-size="9">{r}</text>'
        )
    return _svg(width, height, body)
