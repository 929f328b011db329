"""Flit-level discrete-time network simulator.

Routers are input-queued: one buffer per incoming link plus an injection
queue, one flit per cycle per output, round-robin arbitration among
competing inputs, and credit backpressure (a flit leaves an input buffer
only when the downstream buffer has a free slot reserved for it). Traffic
is uniform random: each node generates a packet per cycle with probability
injection_rate toward a uniformly random other node.

A run warms up, measures packets delivered during the sample window, then
drains with injection off. Runs are classified ok / diverging / deadlocked;
a network is stable when four replicate runs converge (each diverging run
is discarded and retried once with a fresh seed). The cycle loop is
compiled with numba; results are a pure function of (network, traffic,
router params, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from noc_pareto.layout import TiledLayout, link_latency_cycles, link_length_mm
from noc_pareto.routing import RoutingTable, UnroutableError, build_routing, path
from noc_pareto.topology import LinkAllocation

# Runs whose measured average latency exceeds this multiple of the network's
# zero-load latency are classified as diverging.
DIVERGENCE_CAP_MULTIPLE = 20.0
# A run is also diverging when latency measured over the second half of the
# sample window exceeds this multiple of the first half (unbounded growth).
DIVERGENCE_GROWTH_RATIO = 1.5
# Converging replicate runs required before a network counts as stable.
REPLICATION_QUOTA = 4

RUN_OK = "ok"
RUN_DIVERGING = "diverging"
RUN_DEADLOCK = "deadlock"


@dataclass(frozen=True)
class TrafficConfig:
    """Synthetic uniform-random traffic parameters."""

    injection_rate: float = 0.1
    packet_size_flits: int = 1
    sample_period_cycles: int = 1000
    warmup_cycles: int = 1000
    max_drain_cycles: int = 2000
    pattern: str = "uniform"

    def __post_init__(self) -> None:
        if not (0.0 < self.injection_rate < 1.0):
            raise ValueError("injection_rate must be in (0, 1)")
        if self.packet_size_flits < 1:
            raise ValueError("packet_size_flits must be >= 1")
        if self.sample_period_cycles < 1:
            raise ValueError("sample_period_cycles must be >= 1")
        if self.warmup_cycles < 0 or self.max_drain_cycles < 0:
            raise ValueError("cycle counts must be non-negative")
        if self.pattern != "uniform":
            raise ValueError(f"unsupported traffic pattern {self.pattern!r}")


@dataclass(frozen=True)
class RouterParams:
    """Router microarchitecture parameters."""

    buffer_depth_flits: int = 8
    router_pipeline_cycles: int = 1
    deadlock_watchdog_cycles: int = 1000

    def __post_init__(self) -> None:
        if self.buffer_depth_flits < 1:
            raise ValueError("buffer_depth_flits must be >= 1")
        if self.router_pipeline_cycles < 1:
            raise ValueError("router_pipeline_cycles must be >= 1")
        if self.deadlock_watchdog_cycles < 1:
            raise ValueError("deadlock_watchdog_cycles must be >= 1")


@dataclass(frozen=True)
class ActivityCounters:
    """Flit activity recorded during the measurement window."""

    buffer_writes: int = 0
    crossbar_traversals: int = 0
    link_flit_mm: float = 0.0

    def __post_init__(self) -> None:
        if self.buffer_writes < 0 or self.crossbar_traversals < 0 or self.link_flit_mm < 0:
            raise ValueError("activity counters must be non-negative")

    def __add__(self, other: "ActivityCounters") -> "ActivityCounters":
        return ActivityCounters(
            self.buffer_writes + other.buffer_writes,
            self.crossbar_traversals + other.crossbar_traversals,
            self.link_flit_mm + other.link_flit_mm,
        )


class NetworkInstance:
    """A simulate-ready network: allocation + layout + routing + link costs."""

    def __init__(self, allocation: LinkAllocation, layout: TiledLayout):
        if allocation.n_routers != layout.n_routers:
            raise ValueError("allocation and layout disagree on router count")
        self.allocation = allocation
        self.layout = layout
        self.table: RoutingTable = build_routing(allocation)
        self.links: list[tuple[int, int]] = allocation.links()
        self.link_lengths_mm = [link_length_mm(i, j, layout) for i, j in self.links]
        self.link_latencies = [link_latency_cycles(l, layout) for l in self.link_lengths_mm]
        self._arrays: tuple | None = None
        self._pair_zero_load: dict[int, np.ndarray] = {}

    @property
    def n_routers(self) -> int:
        return self.allocation.n_routers

    def kernel_arrays(self) -> tuple:
        """Directed-channel encoding of the network for the cycle kernel."""
        if self._arrays is not None:
            return self._arrays
        n = self.n_routers
        nchan = 2 * len(self.links)
        chan_src = np.empty(nchan, np.int32)
        chan_dst = np.empty(nchan, np.int32)
        chan_lat = np.empty(nchan, np.int32)
        chan_len = np.empty(nchan, np.float64)
        out_chan = np.full((n, n), -1, np.int32)
        for m, (i, j) in enumerate(self.links):
            for c, (a, b) in ((2 * m, (i, j)), (2 * m + 1, (j, i))):
                chan_src[c] = a
                chan_dst[c] = b
                chan_lat[c] = self.link_latencies[m]
                chan_len[c] = self.link_lengths_mm[m]
                out_chan[a, b] = c
        # CSR lists: per router, input ports (incoming channels ascending,
        # then the injection port nchan + r) and output channels ascending
        in_lists = [[] for _ in range(n)]
        out_lists = [[] for _ in range(n)]
        for c in range(nchan):
            in_lists[chan_dst[c]].append(c)
            out_lists[chan_src[c]].append(c)
        in_start = np.zeros(n + 1, np.int32)
        out_start = np.zeros(n + 1, np.int32)
        in_ports = []
        out_list = []
        for r in range(n):
            in_ports.extend(sorted(in_lists[r]))
            in_ports.append(nchan + r)
            out_list.extend(sorted(out_lists[r]))
            in_start[r + 1] = len(in_ports)
            out_start[r + 1] = len(out_list)
        self._arrays = (
            nchan,
            chan_src,
            chan_dst,
            chan_lat,
            chan_len,
            np.ascontiguousarray(self.table.next_hop),
            out_chan,
            in_start,
            np.asarray(in_ports, np.int32),
            out_start,
            np.asarray(out_list, np.int32),
        )
        return self._arrays


def pair_zero_load(net: NetworkInstance, router: RouterParams = RouterParams()) -> np.ndarray:
    """Contention-free latency of each ordered (source, destination) pair:
    the path's summed link latencies plus (hops + 1) * router_pipeline_cycles.

    Each delivered packet's latency is bounded below by its pair's entry, so
    the kernel can report the exact zero-load bound of the packets it
    actually measured (a finite sample's pair mix differs from uniform).
    """
    pipe = router.router_pipeline_cycles
    cached = net._pair_zero_load.get(pipe)
    if cached is not None:
        return cached
    n = net.n_routers
    lat_of = {}
    for m, (i, j) in enumerate(net.links):
        lat_of[(i, j)] = net.link_latencies[m]
        lat_of[(j, i)] = net.link_latencies[m]
    zl = np.zeros((n, n), dtype=np.float64)
    for s in range(n):
        for d in range(n):
            if s == d:
                continue
            p = path(net.table, s, d)
            zl[s, d] = sum(lat_of[(u, v)] for u, v in zip(p, p[1:])) + len(p) * pipe
    zl.setflags(write=False)
    net._pair_zero_load[pipe] = zl
    return zl


def zero_load_latency(net: NetworkInstance, router: RouterParams = RouterParams()) -> float:
    """Analytic contention-free average packet latency over all ordered pairs."""
    n = net.n_routers
    return float(pair_zero_load(net, router).sum()) / (n * (n - 1))


@dataclass(frozen=True)
class SingleRunResult:
    """Outcome of one simulation run."""

    status: str
    avg_latency_cycles: float
    packets_measured: int
    counters: ActivityCounters
    injected_flits: int
    delivered_flits: int
    inflight_end_flits: int
    measured_cycles: int
    first_half_latency: float
    second_half_latency: float
    # mean contention-free latency of exactly the packets that were measured
    zero_load_of_measured: float

    @property
    def converged(self) -> bool:
        return self.status == RUN_OK


@dataclass(frozen=True)
class SimResult:
    """Aggregated evaluation of one network under replicated runs."""

    allocation: LinkAllocation
    avg_latency_cycles: float
    power_watts: float
    stable: bool
    runs_used: int
    attempts: int
    counters: ActivityCounters
    measured_cycles: int

    def with_power(self, watts: float) -> "SimResult":
        return replace(self, power_watts=watts)


@njit(cache=True, nogil=True)
def _cycle_kernel(
    n,
    nchan,
    chan_dst,
    chan_lat,
    chan_len,
    next_hop,
    out_chan,
    in_start,
    in_ports,
    out_start,
    out_list,
    zl_pair,
    rate,
    fpp,
    warmup,
    sample,
    drain,
    pipeline,
    watchdog,
    bufdepth,
    seed,
):
    np.random.seed(seed)
    B = bufdepth
    inject_until = warmup + sample
    total_cycles = inject_until + drain
    half = warmup + sample // 2

    maxlat = 1
    for c in range(nchan):
        if chan_lat[c] > maxlat:
            maxlat = chan_lat[c]

    # per-channel input buffers at the downstream router (ring buffers)
    buf_flit = np.zeros((nchan, B), np.int64)
    buf_arr = np.zeros((nchan, B), np.int32)
    buf_head = np.zeros(nchan, np.int32)
    buf_cnt = np.zeros(nchan, np.int32)
    credits = np.full(nchan, B, np.int32)
    # flits in flight on each channel (ring buffers; at most chan_lat entries)
    lk_flit = np.zeros((nchan, maxlat), np.int64)
    lk_time = np.zeros((nchan, maxlat), np.int32)
    lk_head = np.zeros(nchan, np.int32)
    lk_cnt = np.zeros(nchan, np.int32)
    # per-node injection queues hold packet ids; a node generates at most one
    # packet per cycle so inject_until + 1 slots can never overflow
    inj_cap = inject_until + 1
    inj_pkt = np.zeros((n, inj_cap), np.int32)
    inj_head = np.zeros(n, np.int32)
    inj_cnt = np.zeros(n, np.int32)
    inj_sent = np.zeros(n, np.int32)
    # packet bookkeeping
    pkt_dst = np.zeros(n * inj_cap, np.int32)
    pkt_t0 = np.zeros(n * inj_cap, np.int32)
    pkt_zl = np.zeros(n * inj_cap, np.float64)
    npkt = 0

    nports = nchan + n  # channel input ports, then injection port per router
    req = np.full(nports, -1, np.int64)
    rr = np.zeros(nchan + n, np.int32)  # per output: round-robin scan start

    lat_sum = 0.0
    lat_cnt = 0
    zl_sum = 0.0
    h1_sum = 0.0
    h1_cnt = 0
    h2_sum = 0.0
    h2_cnt = 0
    buffer_writes = 0
    crossbar = 0
    link_mm = 0.0
    injected = 0
    delivered = 0
    last_move = 0
    status = 0

    for now in range(total_cycles):
        in_window = warmup <= now < inject_until
        moved = False

        # link arrivals: credit was reserved at departure, space guaranteed
        for c in range(nchan):
            while lk_cnt[c] > 0 and lk_time[c, lk_head[c]] == now:
                f = lk_flit[c, lk_head[c]]
                lk_head[c] = (lk_head[c] + 1) % maxlat
                lk_cnt[c] -= 1
                slot = (buf_head[c] + buf_cnt[c]) % B
                buf_flit[c, slot] = f
                buf_arr[c, slot] = now
                buf_cnt[c] += 1
                if in_window:
                    buffer_writes += 1
                moved = True

        # head-of-line requests from a cycle-start snapshot, so each input
        # port moves at most one flit per cycle
        for c in range(nchan):
            if buf_cnt[c] > 0 and now >= buf_arr[c, buf_head[c]] + pipeline:
                f = buf_flit[c, buf_head[c]]
                d = pkt_dst[f >> 1]
                r = chan_dst[c]
                if d == r:
                    req[c] = nchan + r
                else:
                    req[c] = out_chan[r, next_hop[r, d]]
            else:
                req[c] = -1
        for r in range(n):
            port = nchan + r
            if inj_cnt[r] > 0:
                pk = inj_pkt[r, inj_head[r]]
                if now >= pkt_t0[pk] + pipeline:
                    req[port] = out_chan[r, next_hop[r, pkt_dst[pk]]]
                else:
                    req[port] = -1
            else:
                req[port] = -1

        # switch allocation: per output, grant one requesting input round-robin
        for r in range(n):
            ilo = in_start[r]
            nin = in_start[r + 1] - ilo
            nout = out_start[r + 1] - out_start[r]
            for oidx in range(-1, nout):
                if oidx < 0:
                    out = nchan + r  # ejection port
                else:
                    out = out_list[out_start[r] + oidx]
                    if credits[out] == 0:
                        continue
                start = rr[out]
                granted = -1
                for t in range(nin):
                    idx = (start + t) % nin
                    if req[in_ports[ilo + idx]] == out:
                        granted = idx
                        break
                if granted < 0:
                    continue
                port = in_ports[ilo + granted]
                rr[out] = (granted + 1) % nin
                req[port] = -2
                if port < nchan:
                    f = buf_flit[port, buf_head[port]]
                    buf_head[port] = (buf_head[port] + 1) % B
                    buf_cnt[port] -= 1
                    credits[port] += 1
                else:
                    src_r = port - nchan
                    pk = inj_pkt[src_r, inj_head[src_r]]
                    tail = 1 if inj_sent[src_r] == fpp - 1 else 0
                    f = np.int64(pk) * 2 + tail
                    inj_sent[src_r] += 1
                    if inj_sent[src_r] == fpp:
                        inj_head[src_r] = (inj_head[src_r] + 1) % inj_cap
                        inj_cnt[src_r] -= 1
                        inj_sent[src_r] = 0
                if in_window:
                    crossbar += 1
                moved = True
                if out < nchan:
                    credits[out] -= 1
                    slot = (lk_head[out] + lk_cnt[out]) % maxlat
                    lk_flit[out, slot] = f
                    lk_time[out, slot] = now + chan_lat[out]
                    lk_cnt[out] += 1
                    if in_window:
                        link_mm += chan_len[out]
                else:
                    delivered += 1
                    if f & 1 and in_window:
                        pk = f >> 1
                        lat = float(now - pkt_t0[pk])
                        lat_sum += lat
                        lat_cnt += 1
                        zl_sum += pkt_zl[pk]
                        if now < half:
                            h1_sum += lat
                            h1_cnt += 1
                        else:
                            h2_sum += lat
                            h2_cnt += 1

        # packet generation (new flits only become eligible next cycle)
        if now < inject_until:
            for r in range(n):
                if np.random.random() < rate:
                    d = int(np.random.random() * (n - 1))
                    if d >= r:
                        d += 1
                    pkt_dst[npkt] = d
                    pkt_t0[npkt] = now
                    pkt_zl[npkt] = zl_pair[r, d]
                    slot = (inj_head[r] + inj_cnt[r]) % inj_cap
                    inj_pkt[r, slot] = npkt
                    inj_cnt[r] += 1
                    npkt += 1
                    injected += fpp
                    if in_window:
                        buffer_writes += fpp

        if moved:
            last_move = now
        inflight = injected - delivered
        if inflight > 0 and now - last_move >= watchdog:
            status = 2
            break
        if now >= inject_until and inflight == 0:
            break

    # in-flight flits counted from the structures, not from the totals, so
    # conservation is a checkable property instead of an identity
    actual_inflight = 0
    for c in range(nchan):
        actual_inflight += buf_cnt[c] + lk_cnt[c]
    for r in range(n):
        if inj_cnt[r] > 0:
            actual_inflight += inj_cnt[r] * fpp - inj_sent[r]

    return (
        status,
        lat_sum,
        lat_cnt,
        zl_sum,
        h1_sum,
        h1_cnt,
        h2_sum,
        h2_cnt,
        buffer_writes,
        crossbar,
        link_mm,
        injected,
        delivered,
        actual_inflight,
    )


def simulate_once(
    net: NetworkInstance,
    traffic: TrafficConfig,
    router: RouterParams,
    seed: int,
) -> SingleRunResult:
    """One seeded simulation run; deterministic given its arguments."""
    (
        nchan,
        _chan_src,
        chan_dst,
        chan_lat,
        chan_len,
        next_hop,
        out_chan,
        in_start,
        in_ports,
        out_start,
        out_list,
    ) = net.kernel_arrays()
    (
        status_code,
        lat_sum,
        lat_cnt,
        zl_sum,
        h1_sum,
        h1_cnt,
        h2_sum,
        h2_cnt,
        buffer_writes,
        crossbar,
        link_mm,
        injected,
        delivered,
        inflight,
    ) = _cycle_kernel(
        net.n_routers,
        nchan,
        chan_dst,
        chan_lat,
        chan_len,
        next_hop,
        out_chan,
        in_start,
        in_ports,
        out_start,
        out_list,
        pair_zero_load(net, router),
        float(traffic.injection_rate),
        traffic.packet_size_flits,
        traffic.warmup_cycles,
        traffic.sample_period_cycles,
        traffic.max_drain_cycles,
        router.router_pipeline_cycles,
        router.deadlock_watchdog_cycles,
        router.buffer_depth_flits,
        seed & 0xFFFFFFFF,
    )

    avg = lat_sum / lat_cnt if lat_cnt else math.nan
    h1 = h1_sum / h1_cnt if h1_cnt else math.nan
    h2 = h2_sum / h2_cnt if h2_cnt else math.nan
    if status_code == 2:
        status = RUN_DEADLOCK
    elif lat_cnt == 0 or h1_cnt == 0 or h2_cnt == 0:
        status = RUN_DIVERGING
    elif avg > DIVERGENCE_CAP_MULTIPLE * zero_load_latency(net, router):
        status = RUN_DIVERGING
    elif h2 > DIVERGENCE_GROWTH_RATIO * h1:
        status = RUN_DIVERGING
    else:
        status = RUN_OK
    return SingleRunResult(
        status=status,
        avg_latency_cycles=avg,
        packets_measured=lat_cnt,
        counters=ActivityCounters(buffer_writes, crossbar, link_mm),
        injected_flits=injected,
        delivered_flits=delivered,
        inflight_end_flits=inflight,
        measured_cycles=traffic.sample_period_cycles,
        first_half_latency=h1,
        second_half_latency=h2,
        zero_load_of_measured=zl_sum / lat_cnt if lat_cnt else math.nan,
    )


def evaluate(
    net: NetworkInstance,
    traffic: TrafficConfig,
    router: RouterParams,
    base_seed: int,
) -> SimResult:
    """Replicated evaluation: four runs, one retry per diverging run.

    Replicate slot i runs with seed base_seed + i; a diverging slot is
    discarded and retried once with seed base_seed + REPLICATION_QUOTA + i.
    The network is stable when all four slots converge; latency is then the
    mean of the converging runs. Activity counters aggregate over every
    attempted run so power reflects actual switching even for unstable
    networks. power_watts is left NaN for the power model to fill.
    """
    converged: list[SingleRunResult] = []
    fallback: list[SingleRunResult] = []
    counters = ActivityCounters()
    attempts = 0
    for i in range(REPLICATION_QUOTA):
        run = simulate_once(net, traffic, router, base_seed + i)
        attempts += 1
        counters = counters + run.counters
        if not run.converged:
            run = simulate_once(net, traffic, router, base_seed + REPLICATION_QUOTA + i)
            attempts += 1
            counters = counters + run.counters
        if run.converged:
            converged.append(run)
        elif run.packets_measured > 0:
            fallback.append(run)
    stable = len(converged) >= REPLICATION_QUOTA
    if converged:
        used = converged if stable else converged + fallback
    else:
        used = fallback
    if used:
        avg = sum(r.avg_latency_cycles for r in used) / len(used)
    else:
        avg = math.inf
    return SimResult(
        allocation=net.allocation,
        avg_latency_cycles=avg,
        power_watts=math.nan,
        stable=stable,
        runs_used=len(converged) if stable else len(used),
        attempts=attempts,
        counters=counters,
        measured_cycles=attempts * traffic.sample_period_cycles,
    )
