"""Latency/power Pareto search over network-on-chip link allocations.

The package couples a flit-level network simulator and a parametric power
model with three search algorithms (random, special greedy, simulated
annealing) that explore the space of binary link allocations and record
the best latency per integer-watt power bin.
"""

from noc_pareto.topology import (
    LinkAllocation,
    link_index,
    num_links,
    combination_count,
    is_connected,
    mesh_allocation,
    fully_connected_allocation,
    random_allocation,
    flip_link,
)
from noc_pareto.layout import TiledLayout, router_position, link_length_mm, link_latency_cycles
from noc_pareto.routing import RoutingTable, build_routing, average_hop_count, path
from noc_pareto.netsim import (
    TrafficConfig,
    RouterParams,
    ActivityCounters,
    NetworkInstance,
    SimResult,
    simulate_once,
    zero_load_latency,
    evaluate,
)
from noc_pareto.powermodel import PowerParams, estimate_power, power_bin
from noc_pareto.evaluator import NetworkEvaluator
from noc_pareto.pareto import ParetoRecord, ParetoRecorder, dominates
from noc_pareto.optimize import (
    AnnealSchedule,
    OptimizerRun,
    fitness,
    boltzmann_accept,
    greedy_eval_count,
    random_search,
    special_greedy,
    simulated_annealing,
    weight_sweep,
)

__version__ = "0.1.0"
