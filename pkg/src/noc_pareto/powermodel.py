"""Parametric power model: activity-driven dynamic plus structural static.

Dynamic power charges an energy per buffer write, per crossbar traversal,
and per flit-mm of link traversal, averaged over the measured cycles at the
network clock. Static power scales with router port counts (degree plus the
local port) and with total link length, so denser and longer-linked networks
cost more even at zero traffic.

The default coefficients are calibrated (scripts/calibrate_power.py) so a
saturated 8x8 mesh at injection rate 0.1 lands near 24 W on the default
21 mm die; other absolute wattages are model-dependent and only relative
orderings should be trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from noc_pareto.netsim import ActivityCounters, NetworkInstance


@dataclass(frozen=True)
class PowerParams:
    """Energy and static-power coefficients; see module docstring."""

    clock_hz: float = 5.0e9
    e_buffer_write: float = 3.0e-12
    e_crossbar: float = 2.0e-12
    e_link_per_mm: float = 3.0e-12
    p_static_router: float = 0.015
    p_static_link_per_mm: float = 0.05

    def __post_init__(self) -> None:
        if self.clock_hz <= 0:
            raise ValueError("clock_hz must be positive")
        for name in ("e_buffer_write", "e_crossbar", "e_link_per_mm",
                     "p_static_router", "p_static_link_per_mm"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def static_power(net: NetworkInstance, params: PowerParams) -> float:
    """Structural power: router ports (degree + 1 local) and link wire length."""
    ports = sum(d + 1 for d in net.allocation.degrees())
    wire_mm = sum(net.link_lengths_mm)
    return params.p_static_router * ports + params.p_static_link_per_mm * wire_mm


def estimate_power(
    counters: ActivityCounters,
    net: NetworkInstance,
    params: PowerParams,
    measured_cycles: int,
) -> float:
    """Total watts for the given activity over measured_cycles cycles."""
    if measured_cycles < 1:
        raise ValueError("measured_cycles must be >= 1")
    if counters.buffer_writes < 0 or counters.crossbar_traversals < 0 or counters.link_flit_mm < 0:
        raise ValueError("activity counters must be non-negative")
    energy = (
        params.e_buffer_write * counters.buffer_writes
        + params.e_crossbar * counters.crossbar_traversals
        + params.e_link_per_mm * counters.link_flit_mm
    )
    dynamic = energy * params.clock_hz / measured_cycles
    return dynamic + static_power(net, params)


def power_bin(watts: float) -> int:
    """Power rounded half-up to the nearest integer watt."""
    if watts < 0:
        raise ValueError(f"power must be non-negative, got {watts}")
    return math.floor(watts + 0.5)
