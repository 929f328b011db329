"""Glue between the simulator and the power model, with result caching.

A NetworkEvaluator owns the full evaluation configuration (layout, traffic,
router, power, base seed), so a given allocation always maps to exactly one
SimResult. That makes results safely memoizable: search algorithms revisit
allocations freely and an exhaustive oracle sees the identical numbers the
optimizers saw. Evaluations of distinct allocations may run concurrently;
the cache tolerates duplicate computation because results are pure.
"""

from __future__ import annotations

from noc_pareto.layout import TiledLayout
from noc_pareto.netsim import (
    NetworkInstance,
    RouterParams,
    SimResult,
    TrafficConfig,
    evaluate,
    zero_load_latency,
)
from noc_pareto.powermodel import PowerParams, estimate_power
from noc_pareto.topology import LinkAllocation


class NetworkEvaluator:
    """Evaluates link allocations under one fixed, shared configuration."""

    def __init__(
        self,
        layout: TiledLayout,
        traffic: TrafficConfig = TrafficConfig(),
        router: RouterParams = RouterParams(),
        power: PowerParams = PowerParams(),
        base_seed: int = 0,
        cache: bool = True,
    ):
        self.layout = layout
        self.traffic = traffic
        self.router = router
        self.power = power
        self.base_seed = base_seed
        self._cache: dict[int, SimResult] | None = {} if cache else None
        self.evaluations = 0  # distinct simulations actually run

    @property
    def n_routers(self) -> int:
        return self.layout.n_routers

    def _check(self, allocation: LinkAllocation) -> None:
        if allocation.n_routers != self.layout.n_routers:
            raise ValueError(
                f"allocation is for n={allocation.n_routers}, evaluator for n={self.layout.n_routers}"
            )

    def network(self, allocation: LinkAllocation) -> NetworkInstance:
        self._check(allocation)
        return NetworkInstance(allocation, self.layout)

    def zero_load(self, allocation: LinkAllocation) -> float:
        return zero_load_latency(self.network(allocation), self.router)

    def evaluate(self, allocation: LinkAllocation) -> SimResult:
        """Simulate the allocation and fill in its power estimate."""
        self._check(allocation)
        if self._cache is not None:
            hit = self._cache.get(allocation.mask)
            if hit is not None:
                return hit
        net = NetworkInstance(allocation, self.layout)
        result = evaluate(net, self.traffic, self.router, self.base_seed)
        watts = estimate_power(result.counters, net, self.power, result.measured_cycles)
        result = result.with_power(watts)
        self.evaluations += 1
        if self._cache is not None:
            self._cache[allocation.mask] = result
        return result
