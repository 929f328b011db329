"""Command-line front end.

Subcommands:
  evaluate   simulate one allocation and print latency/power/stability
  optimize   run one search algorithm, writing records.csv and run.log
  sweep      annealing runs across the weight list, merged front + SVG
  oracle     exhaustively evaluate every connected allocation (small n)
  topo       describe an allocation: links, lengths, mesh diff, SVG
  config     print the effective configuration

Exit codes: 0 success, 2 usage/config error, 3 unstable-network result,
4 internal error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from noc_pareto.config import ConfigError, RunConfig, format_config, parse_config_file
from noc_pareto.netsim import zero_load_latency
from noc_pareto.optimize import (
    InvalidWeightError,
    OptimizerRun,
    random_search,
    simulated_annealing,
    special_greedy,
    weight_sweep,
)
from noc_pareto.pareto import ParetoRecorder
from noc_pareto.powermodel import power_bin
from noc_pareto.routing import UnroutableError, average_hop_count
from noc_pareto.svgplot import front_svg, topology_svg
from noc_pareto.topology import (
    AllocationFormatError,
    LinkAllocation,
    combination_count,
    is_connected,
    mesh_allocation,
    num_links,
    parse_allocation,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNSTABLE = 3
EXIT_INTERNAL = 4


class CliError(Exception):
    """Usage-level error; message printed, exit code 2."""


def _load_config(args: argparse.Namespace) -> RunConfig:
    cfg = parse_config_file(args.config) if args.config else RunConfig()
    overrides = {}
    if getattr(args, "n", None) is not None:
        overrides["routers"] = args.n
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "budget", None) is not None:
        overrides["anneal_budget"] = args.budget
    if getattr(args, "weights", None):
        try:
            overrides["weights"] = tuple(float(w) for w in args.weights.split(","))
        except ValueError:
            raise CliError(f"bad weights list {args.weights!r}") from None
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    return cfg


def _resolve_allocation(args: argparse.Namespace, cfg: RunConfig) -> tuple[LinkAllocation, RunConfig]:
    """Allocation from the positional string or a preset flag; mesh presets
    pin the layout grid to their own shape when the config leaves it open."""
    from dataclasses import replace

    sources = [s for s in (args.allocation, args.mesh, args.full) if s]
    if len(sources) != 1:
        raise CliError("give exactly one of: an allocation string, --mesh ROWSxCOLS, --full N")
    if args.mesh:
        try:
            rows, cols = (int(v) for v in args.mesh.lower().split("x"))
        except ValueError:
            raise CliError(f"bad mesh spec {args.mesh!r}, expected ROWSxCOLS") from None
        alloc = mesh_allocation(rows, cols)
        if cfg.grid is None:
            cfg = replace(cfg, grid=(rows, cols))
    elif args.full:
        from noc_pareto.topology import fully_connected_allocation

        try:
            alloc = fully_connected_allocation(int(args.full))
        except ValueError:
            raise CliError(f"bad router count {args.full!r}") from None
    else:
        alloc = parse_allocation(args.allocation, n=cfg.routers)
    return alloc, replace(cfg, routers=alloc.n_routers)


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    path.write_text(text)
    print(f"wrote {path}")


def _write_run_log(path: Path, runs: list[OptimizerRun]) -> None:
    lines = []
    for run in runs:
        tag = f"# algorithm={run.algorithm}"
        if run.weight is not None:
            tag += f" weight={run.weight}"
        if run.seed is not None:
            tag += f" seed={run.seed}"
        tag += f" evaluations={run.evaluations}"
        lines.append(tag)
        lines.extend(e.format_line() for e in run.log)
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path}")


def _print_summary(recorder: ParetoRecorder, evaluations: int, elapsed: float) -> None:
    print(f"evaluations: {evaluations}")
    print(f"bins recorded: {len(recorder)}")
    for rec in recorder.front():
        print(f"  front: {rec.power_bin} W -> {rec.latency_cycles:.4f} cycles ({rec.allocation.link_count} links)")
    print(f"wall time: {elapsed:.2f} s")


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    alloc, cfg = _resolve_allocation(args, cfg)
    if not is_connected(alloc):
        raise CliError("allocation is disconnected (orphan routers or isolated groups)")
    evaluator = cfg.evaluator()
    net = evaluator.network(alloc)
    res = evaluator.evaluate(alloc)
    zl = zero_load_latency(net, evaluator.router)
    print(f"routers: {alloc.n_routers}  links: {alloc.link_count}/{alloc.p}")
    print(f"allocation: {alloc.to_bit_string()}")
    print(f"stable: {res.stable}  (runs used {res.runs_used}, attempts {res.attempts})")
    print(f"avg latency: {res.avg_latency_cycles:.4f} cycles")
    print(f"zero-load latency: {zl:.4f} cycles")
    print(f"avg hop count: {average_hop_count(net.table):.4f}")
    print(f"power: {res.power_watts:.4f} W  (bin {power_bin(res.power_watts)})")
    if args.dump_routing:
        path = Path(args.dump_routing)
        n = alloc.n_routers
        rows = ["source,dest,next_hop,hops"]
        for s in range(n):
            for d in range(n):
                if s != d:
                    rows.append(f"{s},{d},{net.table.next_hop[s, d]},{net.table.hop_count[s, d]}")
        _write(path, "\n".join(rows) + "\n")
    return EXIT_OK if res.stable else EXIT_UNSTABLE


def cmd_optimize(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if cfg.routers is None:
        raise CliError("router count required (--n or config 'routers')")
    evaluator = cfg.evaluator()
    out = _out_dir(args)
    t0 = time.time()
    if args.algo == "random":
        recorder, run = random_search(cfg.routers, cfg.anneal_budget, cfg.seed, evaluator)
    elif args.algo == "greedy":
        recorder, run = special_greedy(cfg.routers, evaluator)
    elif args.algo == "anneal":
        weight = args.weight if args.weight is not None else 0.5
        recorder, run = simulated_annealing(
            cfg.routers,
            weight,
            cfg.schedule(),
            cfg.seed,
            evaluator,
            budget=cfg.anneal_budget,
            compare=cfg.anneal_compare,
        )
    else:
        raise CliError(f"unknown algorithm {args.algo!r} (random | greedy | anneal)")
    elapsed = time.time() - t0
    _write(out / "records.csv", recorder.to_csv())
    _write(out / "front.csv", recorder.to_csv(front_only=True))
    _write_run_log(out / "run.log", [run])
    _print_summary(recorder, run.evaluations, elapsed)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if cfg.routers is None:
        raise CliError("router count required (--n or config 'routers')")
    evaluator = cfg.evaluator()
    out = _out_dir(args)
    t0 = time.time()
    recorder, runs = weight_sweep(
        cfg.routers,
        list(cfg.weights),
        cfg.schedule(),
        cfg.seed,
        evaluator,
        budget_per_weight=cfg.anneal_budget,
        jobs=args.jobs,
        compare=cfg.anneal_compare,
    )
    elapsed = time.time() - t0
    _write(out / "records.csv", recorder.to_csv())
    _write(out / "front.csv", recorder.to_csv(front_only=True))
    _write(out / "front.svg", front_svg(recorder.records(), recorder.front()))
    _write_run_log(out / "run.log", runs)
    _print_summary(recorder, sum(r.evaluations for r in runs), elapsed)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if cfg.routers is None:
        raise CliError("router count required (--n or config 'routers')")
    n = cfg.routers
    p = num_links(n)
    if p > 22:
        raise CliError(
            f"exhaustive enumeration needs n(n-1)/2 <= 22 links; n={n} has {p} "
            f"({combination_count(n)} allocations)"
        )
    evaluator = cfg.evaluator()
    out = _out_dir(args)
    t0 = time.time()
    recorder = ParetoRecorder()
    connected = 0
    evaluated = 0
    for mask in range(1 << p):
        alloc = LinkAllocation(n, mask)
        if not is_connected(alloc):
            continue
        connected += 1
        res = evaluator.evaluate(alloc)
        evaluated += 1
        if res.stable:
            recorder.record(res, algorithm="oracle")
    elapsed = time.time() - t0
    print(f"connected allocations: {connected} of {1 << p}")
    _write(out / "records.csv", recorder.to_csv())
    _write(out / "front.csv", recorder.to_csv(front_only=True))
    _print_summary(recorder, evaluated, elapsed)
    return EXIT_OK


def cmd_topo(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    alloc, cfg = _resolve_allocation(args, cfg)
    layout = cfg.layout()
    from noc_pareto.layout import link_latency_cycles, link_length_mm

    out = _out_dir(args)
    mesh_ref = None
    if layout.grid_rows >= 2 and layout.grid_cols >= 2 and layout.grid_rows * layout.grid_cols == alloc.n_routers:
        mesh_ref = mesh_allocation(layout.grid_rows, layout.grid_cols)
    print(f"routers: {alloc.n_routers}  grid: {layout.grid_rows}x{layout.grid_cols}  links: {alloc.link_count}")
    hist: dict[int, int] = {}
    unit = min(layout.spacing_x_mm, layout.spacing_y_mm)
    print("links (i, j, length_mm, latency_cycles):")
    for i, j in alloc.links():
        length = link_length_mm(i, j, layout)
        lat = link_latency_cycles(length, layout)
        units = round(length / unit)
        hist[units] = hist.get(units, 0) + 1
        print(f"  {i:3d} -- {j:<3d}  {length:7.2f} mm  {lat} cy")
    print("link-length histogram (inter-router distances -> count):")
    for units in sorted(hist):
        print(f"  {units}: {hist[units]}")
    if mesh_ref is not None:
        common = alloc.mask & mesh_ref.mask
        extra = alloc.mask & ~mesh_ref.mask
        missing = mesh_ref.mask & ~alloc.mask
        print(
            f"vs {layout.grid_rows}x{layout.grid_cols} mesh: "
            f"common {common.bit_count()}, extra {extra.bit_count()}, missing {missing.bit_count()}"
        )
        mesh_links = set(mesh_ref.links())
    else:
        mesh_links = set()
    _write(out / "topo.svg", topology_svg(alloc, layout, mesh_links))
    return EXIT_OK


def cmd_config(args: argparse.Namespace) -> int:
    cfg = RunConfig() if args.defaults else _load_config(args)
    sys.stdout.write(format_config(cfg))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="noc-pareto", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, out: bool = False) -> None:
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--n", type=int, help="router count (overrides config)")
        p.add_argument("--seed", type=int, help="base seed (overrides config)")
        if out:
            p.add_argument("--out", default=".", help="output directory (default: current)")

    pe = sub.add_parser("evaluate", help="simulate one allocation")
    common(pe)
    pe.add_argument("allocation", nargs="?", help="bit string or n=<n>;bits=<hex>")
    pe.add_argument("--mesh", help="evaluate a ROWSxCOLS mesh instead")
    pe.add_argument("--full", help="evaluate the fully connected network of N routers")
    pe.add_argument("--dump-routing", help="write the routing table CSV here")
    pe.set_defaults(func=cmd_evaluate)

    po = sub.add_parser("optimize", help="run one search algorithm")
    common(po, out=True)
    po.add_argument("--algo", required=True, help="random | greedy | anneal")
    po.add_argument("--weight", type=float, help="fitness weight for anneal")
    po.add_argument("--budget", type=int, help="evaluation budget (overrides config)")
    po.set_defaults(func=cmd_optimize)

    ps = sub.add_parser("sweep", help="annealing across the weight list")
    common(ps, out=True)
    ps.add_argument("--weights", help="comma-separated weights (overrides config)")
    ps.add_argument("--budget", type=int, help="per-weight budget (overrides config)")
    ps.add_argument("--jobs", type=int, default=1, help="concurrent annealing runs")
    ps.set_defaults(func=cmd_sweep)

    pr = sub.add_parser("oracle", help="exhaustive ground truth for small n")
    common(pr, out=True)
    pr.set_defaults(func=cmd_oracle)

    pt = sub.add_parser("topo", help="describe an allocation")
    common(pt, out=True)
    pt.add_argument("allocation", nargs="?", help="bit string or n=<n>;bits=<hex>")
    pt.add_argument("--mesh", help="use a ROWSxCOLS mesh")
    pt.add_argument("--full", help="use the fully connected network of N routers")
    pt.set_defaults(func=cmd_topo)

    pc = sub.add_parser("config", help="print the effective configuration")
    common(pc)
    pc.add_argument("--defaults", action="store_true", help="ignore --config, print defaults")
    pc.set_defaults(func=cmd_config)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (CliError, ConfigError, AllocationFormatError, InvalidWeightError,
            UnroutableError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
