"""Per-watt-bin minimum-latency records and Pareto front extraction.

A recorder keeps, for each integer power bin, the lowest latency ever
submitted and the allocation that achieved it. Recorders from independent
runs merge into one; merging takes the per-bin minimum under a total order,
so it is commutative, associative, and idempotent regardless of run order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from noc_pareto.netsim import SimResult
from noc_pareto.powermodel import power_bin
from noc_pareto.topology import LinkAllocation, parse_allocation

CSV_HEADER = "power_bin,latency_cycles,links,allocation,algorithm,weight,seed"


@dataclass(frozen=True)
class ParetoRecord:
    """Best latency seen in one integer-watt power bin."""

    power_bin: int
    latency_cycles: float
    allocation: LinkAllocation
    algorithm: str = ""
    weight: float | None = None
    seed: int | None = None

    def order_key(self) -> tuple:
        """Total order used by merge; latency first, then stable tie-breaks."""
        return (
            self.latency_cycles,
            self.allocation.to_bit_string(),
            self.algorithm,
            -1.0 if self.weight is None else self.weight,
            -1 if self.seed is None else self.seed,
        )

    def csv_row(self) -> str:
        return ",".join(
            (
                str(self.power_bin),
                repr(self.latency_cycles),
                str(self.allocation.link_count),
                self.allocation.to_bit_string(),
                self.algorithm,
                "" if self.weight is None else repr(self.weight),
                "" if self.seed is None else str(self.seed),
            )
        )


def dominates(p: tuple[float, float], q: tuple[float, float]) -> bool:
    """(power, latency) dominance: no worse in both, better in at least one."""
    return p[0] <= q[0] and p[1] <= q[1] and p != q


class ParetoRecorder:
    """Map from power bin to its best ParetoRecord."""

    def __init__(self) -> None:
        self._bins: dict[int, ParetoRecord] = {}

    def __len__(self) -> int:
        return len(self._bins)

    def __contains__(self, power_bin_: int) -> bool:
        return power_bin_ in self._bins

    def get(self, power_bin_: int) -> ParetoRecord | None:
        return self._bins.get(power_bin_)

    def record(
        self,
        result: SimResult,
        algorithm: str = "",
        weight: float | None = None,
        seed: int | None = None,
    ) -> bool:
        """Submit a stable result; returns True if it becomes its bin's best.

        Ties on latency keep the incumbent, so under a fixed seed order the
        first allocation to reach a value wins reproducibly.
        """
        if not result.stable:
            raise ValueError("only stable results may be recorded")
        if not (result.avg_latency_cycles > 0) or math.isinf(result.avg_latency_cycles):
            raise ValueError(f"latency must be positive and finite, got {result.avg_latency_cycles}")
        b = power_bin(result.power_watts)
        old = self._bins.get(b)
        if old is not None and result.avg_latency_cycles >= old.latency_cycles:
            return False
        self._bins[b] = ParetoRecord(
            power_bin=b,
            latency_cycles=result.avg_latency_cycles,
            allocation=result.allocation,
            algorithm=algorithm,
            weight=weight,
            seed=seed,
        )
        return True

    def add_record(self, rec: ParetoRecord) -> bool:
        """Insert an existing record under merge semantics (total order)."""
        old = self._bins.get(rec.power_bin)
        if old is not None and old.order_key() <= rec.order_key():
            return False
        self._bins[rec.power_bin] = rec
        return True

    def merge(self, other: "ParetoRecorder") -> "ParetoRecorder":
        """Per-bin minimum of both recorders; inputs are left untouched."""
        out = ParetoRecorder()
        for rec in self._bins.values():
            out.add_record(rec)
        for rec in other._bins.values():
            out.add_record(rec)
        return out

    def records(self) -> list[ParetoRecord]:
        """All records, dominated bins included, sorted by power bin."""
        return [self._bins[b] for b in sorted(self._bins)]

    def front(self) -> list[ParetoRecord]:
        """Non-dominated records, power ascending, latency strictly decreasing."""
        out: list[ParetoRecord] = []
        best = math.inf
        for rec in self.records():
            if rec.latency_cycles < best:
                out.append(rec)
                best = rec.latency_cycles
        return out

    def to_csv(self, front_only: bool = False) -> str:
        rows = self.front() if front_only else self.records()
        return "\n".join([CSV_HEADER] + [r.csv_row() for r in rows]) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "ParetoRecorder":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != CSV_HEADER:
            raise ValueError("unrecognized recorder CSV header")
        out = cls()
        for ln in lines[1:]:
            b, lat, _links, alloc, algo, weight, seed = ln.split(",")
            out.add_record(
                ParetoRecord(
                    power_bin=int(b),
                    latency_cycles=float(lat),
                    allocation=parse_allocation(alloc),
                    algorithm=algo,
                    weight=float(weight) if weight else None,
                    seed=int(seed) if seed else None,
                )
            )
        return out
