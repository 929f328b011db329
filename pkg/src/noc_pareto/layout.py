"""Tiled router placement and length-dependent link latencies.

Routers sit at tile centers of a uniform grid over the die, so inter-router
wiring runs in horizontal/vertical segments only and link length is the
Manhattan distance between tiles. Link latency grows with physical length
through a linear cycles-per-mm coefficient; the default is calibrated so
one inter-router hop on a 4x4 grid over a 21 mm die costs exactly 1 cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_CHIP_MM = 21.0
DEFAULT_CYCLES_PER_MM = 0.19


@dataclass(frozen=True)
class TiledLayout:
    """Physical placement of n routers on a grid_rows x grid_cols tiling."""

    n_routers: int
    grid_rows: int
    grid_cols: int
    chip_width_mm: float = DEFAULT_CHIP_MM
    chip_height_mm: float = DEFAULT_CHIP_MM
    cycles_per_mm: float = DEFAULT_CYCLES_PER_MM

    def __post_init__(self) -> None:
        if self.n_routers < 2:
            raise ValueError("need at least 2 routers")
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise ValueError("grid dimensions must be positive")
        if self.grid_rows * self.grid_cols < self.n_routers:
            raise ValueError(
                f"grid {self.grid_rows}x{self.grid_cols} cannot hold {self.n_routers} routers"
            )
        if self.chip_width_mm <= 0 or self.chip_height_mm <= 0:
            raise ValueError("chip dimensions must be positive")
        if self.cycles_per_mm <= 0:
            raise ValueError("cycles_per_mm must be positive")

    @property
    def spacing_x_mm(self) -> float:
        return self.chip_width_mm / self.grid_cols

    @property
    def spacing_y_mm(self) -> float:
        return self.chip_height_mm / self.grid_rows

    @classmethod
    def for_routers(
        cls,
        n: int,
        grid: tuple[int, int] | None = None,
        chip_mm: tuple[float, float] = (DEFAULT_CHIP_MM, DEFAULT_CHIP_MM),
        cycles_per_mm: float = DEFAULT_CYCLES_PER_MM,
    ) -> "TiledLayout":
        """Layout for n routers; derives a near-square grid when none is given.

        An explicit grid must hold exactly n routers. A derived grid uses
        cols = ceil(sqrt(n)) and may leave trailing tiles empty when n has
        no square factorization.
        """
        if grid is not None:
            rows, cols = grid
            if rows * cols != n:
                raise ValueError(f"grid {rows}x{cols} does not match n={n}")
        else:
            cols = math.isqrt(n)
            if cols * cols < n:
                cols += 1
            rows = (n + cols - 1) // cols
        return cls(
            n_routers=n,
            grid_rows=rows,
            grid_cols=cols,
            chip_width_mm=chip_mm[0],
            chip_height_mm=chip_mm[1],
            cycles_per_mm=cycles_per_mm,
        )


def router_position(r: int, layout: TiledLayout) -> tuple[int, int]:
    """Grid (row, col) of router r under row-major placement."""
    if not (0 <= r < layout.n_routers):
        raise IndexError(f"router id {r} out of range for n={layout.n_routers}")
    return r // layout.grid_cols, r % layout.grid_cols


def link_length_mm(i: int, j: int, layout: TiledLayout) -> float:
    """Rectilinear wire length between routers i and j."""
    if i == j:
        raise ValueError(f"no link from router {i} to itself")
    ri, ci = router_position(i, layout)
    rj, cj = router_position(j, layout)
    return abs(ci - cj) * layout.spacing_x_mm + abs(ri - rj) * layout.spacing_y_mm


def link_latency_cycles(length_mm: float, layout: TiledLayout) -> int:
    """Cycles a flit spends on a link of the given length, at least 1."""
    if length_mm <= 0:
        raise ValueError(f"link length must be positive, got {length_mm}")
    return max(1, math.ceil(length_mm * layout.cycles_per_mm))
