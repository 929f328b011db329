"""Independent reference implementations and shared fixtures for the tests.

Everything here deliberately avoids the package's own graph/search code
paths: connectivity via union-find, hop counts via Floyd-Warshall, fronts
via brute-force dominance, so the tests check the product against genuinely
separate logic.
"""

from __future__ import annotations

import itertools
import random

from noc_pareto.evaluator import NetworkEvaluator
from noc_pareto.layout import TiledLayout
from noc_pareto.netsim import RouterParams, TrafficConfig
from noc_pareto.pareto import ParetoRecorder
from noc_pareto.powermodel import PowerParams
from noc_pareto.topology import LinkAllocation, is_connected


def union_find_connected(alloc: LinkAllocation) -> bool:
    """Connectivity oracle via union-find with path compression."""
    parent = list(range(alloc.n_routers))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in alloc.links():
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    root = find(0)
    return all(find(v) == root for v in range(alloc.n_routers))


def floyd_warshall_hops(alloc: LinkAllocation) -> list[list[float]]:
    """All-pairs hop counts by Floyd-Warshall (inf when unreachable)."""
    n = alloc.n_routers
    inf = float("inf")
    dist = [[0.0 if i == j else inf for j in range(n)] for i in range(n)]
    for i, j in alloc.links():
        dist[i][j] = dist[j][i] = 1.0
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik == inf:
                continue
            di = dist[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    return dist


def grid_manhattan_hops(rows: int, cols: int, a: int, b: int) -> int:
    """Mesh hop-count oracle straight from grid coordinates."""
    ra, ca = divmod(a, cols)
    rb, cb = divmod(b, cols)
    return abs(ra - rb) + abs(ca - cb)


def enumerate_connected(n: int):
    """Every connected allocation of n routers, ascending mask order."""
    p = n * (n - 1) // 2
    for mask in range(1 << p):
        alloc = LinkAllocation(n, mask)
        if is_connected(alloc):
            yield alloc


def random_connected(n: int, rng: random.Random) -> LinkAllocation:
    while True:
        alloc = LinkAllocation(n, rng.getrandbits(n * (n - 1) // 2))
        if is_connected(alloc):
            return alloc


def desk_evaluator(
    n: int,
    rate: float = 0.1,
    sample: int = 256,
    warmup: int = 128,
    packet_size: int = 1,
    base_seed: int = 12345,
    watchdog: int = 256,
) -> NetworkEvaluator:
    """Short-window evaluator used by the optimizer and acceptance tests."""
    return NetworkEvaluator(
        layout=TiledLayout.for_routers(n),
        traffic=TrafficConfig(
            injection_rate=rate,
            packet_size_flits=packet_size,
            sample_period_cycles=sample,
            warmup_cycles=warmup,
            max_drain_cycles=2 * sample,
        ),
        router=RouterParams(deadlock_watchdog_cycles=watchdog),
        power=PowerParams(),
        base_seed=base_seed,
    )


def exhaustive_recorder(evaluator: NetworkEvaluator, n: int) -> ParetoRecorder:
    """Ground-truth recorder: every connected allocation, shared seeds."""
    recorder = ParetoRecorder()
    for alloc in enumerate_connected(n):
        res = evaluator.evaluate(alloc)
        if res.stable:
            recorder.record(res, algorithm="oracle")
    return recorder


def brute_force_front(records) -> list:
    """Non-dominated filter by pairwise comparison, no sorting tricks."""
    pts = list(records)
    out = []
    for r in pts:
        dominated = False
        for q in pts:
            if q is r:
                continue
            qp, ql = q.power_bin, q.latency_cycles
            rp, rl = r.power_bin, r.latency_cycles
            if qp <= rp and ql <= rl and (qp, ql) != (rp, rl):
                dominated = True
                break
        if not dominated:
            out.append(r)
    return sorted(out, key=lambda r: r.power_bin)


def all_pairs_lexicographic(n: int) -> list[tuple[int, int]]:
    """Pair enumeration oracle for the canonical link ordering."""
    return sorted(itertools.combinations(range(n), 2))
