"""Search algorithms over link allocations: random, special greedy, annealing.

All three run against a shared NetworkEvaluator and push every stable
evaluation into a ParetoRecorder, so the recorder reflects everything a run
visited rather than only what it accepted. Runs are deterministic functions
of their seed; weight-sweep runs are independent and may execute in
parallel, with recorders merged afterwards.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from noc_pareto.evaluator import NetworkEvaluator
from noc_pareto.pareto import ParetoRecorder
from noc_pareto.topology import (
    LinkAllocation,
    flip_link,
    fully_connected_allocation,
    is_connected,
    num_links,
    random_allocation,
)

# Bounded redraws when a proposed bit flip disconnects the network.
MAX_FLIP_REDRAWS = 100
# Random connected allocations sampled when deriving a start temperature.
SCHEDULE_SAMPLE_SIZE = 50
# Default terminating temperature as a fraction of the start temperature.
T_END_RATIO = 1e-3


class InvalidWeightError(ValueError):
    """Raised for fitness weights outside (0, 1]."""


def fitness(latency_cycles: float, power_watts: float, weight: float) -> float:
    """Weighted objective E = weight * latency + (1 - weight) * power.

    Raw units, no normalization. A weight of 0 (power only) is rejected:
    without latency pressure the search walks into unstable networks.
    """
    if not (0.0 < weight <= 1.0):
        raise InvalidWeightError(f"weight must be in (0, 1], got {weight}")
    if latency_cycles < 0 or power_watts < 0:
        raise ValueError("latency and power must be non-negative")
    return weight * latency_cycles + (1.0 - weight) * power_watts


def boltzmann_accept(e_new: float, e_ref: float, temperature: float, rng: random.Random) -> bool:
    """Accept e_new against e_ref: always when better, else with probability
    exp(-(e_new - e_ref) / T) against a fresh uniform draw."""
    if e_new < e_ref:
        return True
    if temperature <= 0.0:
        return e_new == e_ref
    return rng.random() < math.exp(-(e_new - e_ref) / temperature)


def greedy_eval_count(n: int) -> int:
    """Closed form (n^4 - 2n^3 - n^2 + 2n) / 8 for a full greedy descent.

    Equals the round-by-round sum p + (p-1) + ... + n of neighbor
    evaluations from the fully connected start down to a spanning tree.
    """
    if n < 2:
        raise ValueError("need at least 2 routers")
    return (n**4 - 2 * n**3 - n**2 + 2 * n) // 8


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling: T starts at t_start and is multiplied by
    cooling_rate each iteration until it falls below t_end."""

    t_start: float
    t_end: float
    cooling_rate: float

    def __post_init__(self) -> None:
        if not (self.t_start > self.t_end > 0):
            raise ValueError("need t_start > t_end > 0")
        if not (0.0 < self.cooling_rate < 1.0):
            raise ValueError("cooling_rate must be in (0, 1)")

    def iterations(self) -> int:
        """Iteration count implied by the cooling geometry."""
        # small slack so budget-constructed schedules round to their budget
        return math.ceil(math.log(self.t_end / self.t_start) / math.log(self.cooling_rate) - 1e-9)

    @classmethod
    def for_budget(cls, t_start: float, budget: int, t_end_ratio: float = T_END_RATIO) -> "AnnealSchedule":
        """Schedule whose cooling consumes exactly `budget` iterations."""
        if budget < 1:
            raise ValueError("budget must be >= 1")
        t_end = t_start * t_end_ratio
        return cls(t_start, t_end, (t_end_ratio) ** (1.0 / budget))


def derive_schedule(
    n: int,
    weight: float,
    evaluator: NetworkEvaluator,
    budget: int,
) -> AnnealSchedule:
    """Self-scaling schedule: t_start is the fitness standard deviation over
    a fixed sample of random connected allocations.

    The sample seed depends only on n, so every weight's derivation touches
    the same allocations and shares the evaluator cache.
    """
    rng = random.Random(0xC001 + n)
    values = []
    for _ in range(SCHEDULE_SAMPLE_SIZE):
        res = evaluator.evaluate(random_allocation(n, rng, require_connected=True))
        if res.stable:
            values.append(fitness(res.avg_latency_cycles, res.power_watts, weight))
    if len(values) >= 2:
        mean = sum(values) / len(values)
        std = math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))
    else:
        std = 0.0
    return AnnealSchedule.for_budget(std if std > 0 else 1.0, budget)


@dataclass
class LogEntry:
    """One optimizer iteration for the line-delimited run log."""

    iteration: int
    allocation: str
    latency: float
    power: float
    fitness: float
    temperature: float
    accepted: bool

    def format_line(self) -> str:
        def num(x: float) -> str:
            return "nan" if math.isnan(x) else repr(x)

        return ",".join(
            (
                str(self.iteration),
                self.allocation,
                num(self.latency),
                num(self.power),
                num(self.fitness),
                num(self.temperature),
                "1" if self.accepted else "0",
            )
        )


@dataclass
class OptimizerRun:
    """Summary of one optimizer execution."""

    algorithm: str
    seed: int | None
    weight: float | None
    budget: int | None
    evaluations: int = 0
    best_fitness: float = math.inf
    best_latency: float = math.inf
    best_allocation: LinkAllocation | None = None
    # where a trajectory-style run (greedy, annealing) ended up
    final_allocation: LinkAllocation | None = None
    log: list[LogEntry] = field(default_factory=list)
    trajectory: list[tuple[int, float]] = field(default_factory=list)


def random_search(
    n: int,
    budget: int,
    seed: int,
    evaluator: NetworkEvaluator,
    recorder: ParetoRecorder | None = None,
) -> tuple[ParetoRecorder, OptimizerRun]:
    """Baseline: evaluate `budget` independent random connected allocations."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    recorder = recorder if recorder is not None else ParetoRecorder()
    rng = random.Random(seed)
    run = OptimizerRun(algorithm="random", seed=seed, weight=None, budget=budget)
    for it in range(budget):
        alloc = random_allocation(n, rng, require_connected=True)
        res = evaluator.evaluate(alloc)
        run.evaluations += 1
        if res.stable:
            recorder.record(res, algorithm="random", seed=seed)
            if res.avg_latency_cycles < run.best_latency:
                run.best_latency = res.avg_latency_cycles
                run.best_allocation = alloc
        run.log.append(
            LogEntry(
                iteration=it,
                allocation=alloc.to_bit_string(),
                latency=res.avg_latency_cycles if res.stable else math.nan,
                power=res.power_watts if res.stable else math.nan,
                fitness=math.nan,
                temperature=math.nan,
                accepted=res.stable,
            )
        )
    return recorder, run


def special_greedy(
    n: int,
    evaluator: NetworkEvaluator,
    recorder: ParetoRecorder | None = None,
) -> tuple[ParetoRecorder, OptimizerRun]:
    """Deterministic descent from the fully connected network.

    Each round examines every one-link-removed neighbor of the current
    network and moves to the stable one with the lowest latency (ties to the
    lowest link index). Stops at a spanning tree (n - 1 links) or as soon as
    no stable neighbor exists. Every examined neighbor counts as one
    evaluation, which makes a full descent cost exactly greedy_eval_count(n);
    disconnected neighbors are counted but never simulated.
    """
    recorder = recorder if recorder is not None else ParetoRecorder()
    run = OptimizerRun(algorithm="greedy", seed=None, weight=None, budget=None)
    current = fully_connected_allocation(n)
    it = 0
    while current.link_count > n - 1:
        best: tuple[float, int, LinkAllocation] | None = None
        for k in range(current.p):
            if not current.has_bit(k):
                continue
            run.evaluations += 1
            cand = flip_link(current, k)
            if not is_connected(cand):
                continue
            res = evaluator.evaluate(cand)
            entry = LogEntry(
                iteration=it,
                allocation=cand.to_bit_string(),
                latency=res.avg_latency_cycles if res.stable else math.nan,
                power=res.power_watts if res.stable else math.nan,
                fitness=math.nan,
                temperature=math.nan,
                accepted=False,
            )
            it += 1
            run.log.append(entry)
            if not res.stable:
                continue
            recorder.record(res, algorithm="greedy")
            if best is None or res.avg_latency_cycles < best[0]:
                best = (res.avg_latency_cycles, k, cand)
        if best is None:
            break  # no stable neighbor; cannot descend further
        latency, _k, current = best
        run.trajectory.append((current.link_count, latency))
        if latency < run.best_latency:
            run.best_latency = latency
            run.best_allocation = current
    run.best_allocation = run.best_allocation or current
    run.final_allocation = current
    return recorder, run


def _propose_flip(current: LinkAllocation, rng: random.Random) -> LinkAllocation | None:
    """Flip one uniformly random link bit; redraw while disconnected."""
    for _ in range(MAX_FLIP_REDRAWS):
        cand = flip_link(current, rng.randrange(current.p))
        if is_connected(cand):
            return cand
    return None


def simulated_annealing(
    n: int,
    weight: float,
    schedule: AnnealSchedule | None,
    seed: int,
    evaluator: NetworkEvaluator,
    recorder: ParetoRecorder | None = None,
    budget: int | None = None,
    compare: str = "best",
) -> tuple[ParetoRecorder, OptimizerRun]:
    """Annealed walk: flip one random link per step, accept by Boltzmann rule.

    A worse proposal is accepted when a uniform draw falls below
    exp(-(E_temp - E_ref) / T). E_ref is the best fitness recorded so far
    (`compare="best"`), or the current state's fitness with the textbook
    variant `compare="current"`. Unstable or undrawable proposals consume
    their iteration and cool T without moving. Every stable evaluation is
    recorded regardless of acceptance.
    """
    if compare not in ("best", "current"):
        raise ValueError(f"compare must be 'best' or 'current', got {compare}")
    fitness(0.0, 0.0, weight)  # validate the weight eagerly
    if schedule is None:
        if budget is None:
            raise ValueError("need a schedule or a budget to derive one")
        schedule = derive_schedule(n, weight, evaluator, budget)
    if budget is None:
        budget = schedule.iterations()
    recorder = recorder if recorder is not None else ParetoRecorder()
    rng = random.Random(seed)
    run = OptimizerRun(algorithm="anneal", seed=seed, weight=weight, budget=budget)

    current: LinkAllocation | None = None
    e_current = math.inf
    e_best = math.inf
    temperature = schedule.t_start
    it = 0
    while temperature > schedule.t_end and run.evaluations < budget:
        if current is None:
            cand = random_allocation(n, rng, require_connected=True)
        else:
            cand = _propose_flip(current, rng)
        run.evaluations += 1
        accepted = False
        latency = power = e_temp = math.nan
        if cand is not None:
            res = evaluator.evaluate(cand)
            if res.stable:
                latency, power = res.avg_latency_cycles, res.power_watts
                e_temp = fitness(latency, power, weight)
                recorder.record(res, algorithm="anneal", weight=weight, seed=seed)
                if current is None:
                    accepted = True
                else:
                    e_ref = e_best if compare == "best" else e_current
                    accepted = boltzmann_accept(e_temp, e_ref, temperature, rng)
                if accepted:
                    current, e_current = cand, e_temp
                if e_temp < e_best:
                    e_best = e_temp
                    run.best_fitness = e_temp
                    run.best_latency = latency
                    run.best_allocation = cand
        run.log.append(
            LogEntry(
                iteration=it,
                allocation="" if cand is None else cand.to_bit_string(),
                latency=latency,
                power=power,
                fitness=e_temp,
                temperature=temperature,
                accepted=accepted,
            )
        )
        it += 1
        temperature *= schedule.cooling_rate
    run.final_allocation = current
    return recorder, run


def weight_sweep(
    n: int,
    weights: list[float],
    schedule: AnnealSchedule | None,
    seed: int,
    evaluator: NetworkEvaluator,
    budget_per_weight: int | None = None,
    jobs: int = 1,
    compare: str = "best",
) -> tuple[ParetoRecorder, list[OptimizerRun]]:
    """One annealing run per weight, merged into a single recorder.

    Runs are independently seeded from the base seed and may execute
    concurrently; the merge is order-independent, so results do not depend
    on scheduling. Low weights populate the low-power bins, high weights the
    low-latency bins.
    """
    if not weights:
        raise InvalidWeightError("need at least one weight")
    for w in weights:
        fitness(0.0, 0.0, w)
    if schedule is None and budget_per_weight is None:
        raise ValueError("need a schedule or a per-weight budget")

    def one(idx: int, w: float) -> tuple[ParetoRecorder, OptimizerRun]:
        return simulated_annealing(
            n,
            w,
            schedule,
            seed + 1_000_003 * idx,
            evaluator,
            recorder=ParetoRecorder(),
            budget=budget_per_weight,
            compare=compare,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda iw: one(*iw), enumerate(weights)))
    else:
        results = [one(i, w) for i, w in enumerate(weights)]

    merged = ParetoRecorder()
    runs = []
    for rec, run in results:
        merged = merged.merge(rec)
        runs.append(run)
    return merged, runs
