"""Deterministic minimal-hop routing over arbitrary connected allocations.

Routes are fixed per (source, destination): breadth-first search gives
all-pairs hop counts, and the next hop from s toward d is the neighbor of s
with the fewest remaining hops, ties broken by lowest router id. Every step
strictly decreases the remaining hop count, so the fixed paths can never
livelock.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from noc_pareto.topology import LinkAllocation, is_connected


class UnroutableError(ValueError):
    """Raised when asked to route a disconnected allocation."""


@dataclass(frozen=True)
class RoutingTable:
    """All-pairs next-hop and hop-count matrices; next_hop[s, s] == s."""

    next_hop: np.ndarray
    hop_count: np.ndarray

    @property
    def n_routers(self) -> int:
        return self.hop_count.shape[0]


def build_routing(a: LinkAllocation) -> RoutingTable:
    """Minimal-hop table for a connected allocation, lowest-id tie-breaking."""
    if not is_connected(a):
        raise UnroutableError("allocation is not a single connected component")
    n = a.n_routers
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in a.links():
        adj[i].append(j)
        adj[j].append(i)
    for nbrs in adj:
        nbrs.sort()

    hop = np.full((n, n), -1, dtype=np.int32)
    for s in range(n):
        hop[s, s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            du = hop[s, u]
            for v in adj[u]:
                if hop[s, v] < 0:
                    hop[s, v] = du + 1
                    q.append(v)

    nxt = np.empty((n, n), dtype=np.int32)
    for s in range(n):
        nbrs = np.array(adj[s], dtype=np.int32)
        # neighbor hop counts to every destination; argmin picks the first
        # (= lowest id, neighbors are sorted) among minimal candidates
        cand = hop[nbrs, :]
        nxt[s, :] = nbrs[np.argmin(cand, axis=0)]
        nxt[s, s] = s
    hop.setflags(write=False)
    nxt.setflags(write=False)
    return RoutingTable(next_hop=nxt, hop_count=hop)


def average_hop_count(t: RoutingTable) -> float:
    """Mean hop count over all ordered pairs s != d."""
    n = t.n_routers
    return float(t.hop_count.sum()) / (n * (n - 1))


def path(t: RoutingTable, s: int, d: int) -> list[int]:
    """Fixed route from s to d inclusive; the trivial [s] when s == d."""
    n = t.n_routers
    if not (0 <= s < n and 0 <= d < n):
        raise IndexError(f"router id out of range for n={n}")
    out = [s]
    u = s
    while u != d:
        u = int(t.next_hop[u, d])
        out.append(u)
    return out
