#!/usr/bin/env python3
"""Calibration run behind the default power coefficients.

Measures activity-counter rates of the saturated 8x8 mesh (injection 0.1,
3-flit packets, the configuration the saturation tests use) plus a few
reference networks, then reports the wattage the current defaults produce
and the static/dynamic split. The defaults in powermodel.py were chosen so
the saturated 8x8 mesh lands near 24 W; rerun this after touching the
simulator's switching behavior.
"""

import argparse

from noc_pareto.layout import TiledLayout
from noc_pareto.netsim import NetworkInstance, RouterParams, TrafficConfig, evaluate
from noc_pareto.powermodel import PowerParams, estimate_power, static_power
from noc_pareto.topology import fully_connected_allocation, mesh_allocation


def report(name, alloc, grid, traffic, router, params, seed):
    net = NetworkInstance(alloc, TiledLayout.for_routers(alloc.n_routers, grid=grid))
    res = evaluate(net, traffic, router, seed)
    c = res.counters
    cyc = res.measured_cycles
    stat = static_power(net, params)
    total = estimate_power(c, net, params, cyc)
    print(
        f"{name:18s} stable={str(res.stable):5s} lat={res.avg_latency_cycles:9.2f} "
        f"bw/cyc={c.buffer_writes / cyc:7.2f} xb/cyc={c.crossbar_traversals / cyc:7.2f} "
        f"mm/cyc={c.link_flit_mm / cyc:8.2f} static={stat:8.2f}W dynamic={total - stat:7.2f}W "
        f"total={total:8.2f}W"
    )
    return total


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    params = PowerParams()
    router = RouterParams()
    saturating = TrafficConfig(injection_rate=0.1, packet_size_flits=3)
    nominal = TrafficConfig(injection_rate=0.1, packet_size_flits=1)

    print(f"defaults: {params}")
    print("-- saturation configuration (anchor: 8x8 mesh ~ 24 W) --")
    anchor = report("mesh 8x8 sat", mesh_allocation(8, 8), (8, 8), saturating, router, params, args.seed)
    report("mesh 4x4 sat", mesh_allocation(4, 4), (4, 4), saturating, router, params, args.seed)
    print("-- nominal single-flit traffic --")
    report("mesh 8x8", mesh_allocation(8, 8), (8, 8), nominal, router, params, args.seed)
    report("mesh 4x4", mesh_allocation(4, 4), (4, 4), nominal, router, params, args.seed)
    report("mesh 3x3", mesh_allocation(3, 3), (3, 3), nominal, router, params, args.seed)
    report("full n=9", fully_connected_allocation(9), (3, 3), nominal, router, params, args.seed)
    report("full n=16", fully_connected_allocation(16), (4, 4), nominal, router, params, args.seed)
    report("full n=64", fully_connected_allocation(64), (8, 8), nominal, router, params, args.seed)
    print(f"anchor total: {anchor:.2f} W (target 24 W +- 30% -> [16.8, 31.2])")


if __name__ == "__main__":
    main()
