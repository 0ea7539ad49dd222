"""Command-line entry point.

    netevolve run [--config FILE] [--seed N] [--set KEY=VALUE ...] [--out DIR]
    netevolve experiment (PRESET | --scenario FILE) [--replicates N] [--workers N]
                         [--window START,END] [--set KEY=VALUE ...] [--out DIR]
    netevolve inspect SNAPSHOT
    netevolve presets

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import statistics
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import experiments, snapshot
from .config import apply_overrides, load_config, load_scenario, parse_value
from .dynamics import UtilizationMode, utilization
from .errors import NetEvolveError
from .ga import GaConfig, evolve
from .metrics import EXACT_NODE_LIMIT, cost, exact_reliability, pleiotropy, redundancy
from .stats import summarize

OUT_ENV = "NETEVOLVE_OUT"


class UsageError(Exception):
    def __init__(self, message: str, usage: str = ""):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self.format_usage())


@dataclass
class CliCommand:
    name: str  # run | experiment | inspect | presets
    config_path: Path | None = None
    overrides: dict[str, object] = field(default_factory=dict)
    preset: str | None = None
    scenario_path: Path | None = None
    replicates: int | None = None
    workers: int = 1
    window: tuple[int, int] | None = None
    snapshot_path: Path | None = None
    out: Path = Path("out")


# run flags that map straight onto config keys
_RUN_FLAGS = {
    "seed": "master_seed",
    "strategy": "strategy",
    "offspring": "offspring",
    "generations": "generations",
    "link_failure_prob": "link_failure_prob",
    "repair_time": "repair_time",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netevolve", description="Evolve client-server network topologies.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    default_out = os.environ.get(OUT_ENV, "out")

    run = sub.add_parser("run", help="evolve one network and write per-generation output")
    run.add_argument("--config", type=Path, help="flat key=value config file")
    run.add_argument("--seed", help="master seed (overrides the config file)")
    run.add_argument("--strategy")
    run.add_argument("--offspring")
    run.add_argument("--generations")
    run.add_argument("--link-failure-prob", dest="link_failure_prob")
    run.add_argument("--repair-time", dest="repair_time")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override any config key; may repeat")
    run.add_argument("--out", type=Path, default=Path(default_out))

    exp = sub.add_parser("experiment", help="run a preset or scenario-file sweep")
    exp.add_argument("preset", nargs="?", help="preset name, see `netevolve presets`")
    exp.add_argument("--scenario", type=Path, help="scenario file instead of a preset")
    exp.add_argument("--replicates", type=int)
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--window", metavar="START,END", help="statistics window (default 50,150)")
    exp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override a base config key for a preset")
    exp.add_argument("--out", type=Path, default=Path(default_out))

    ins = sub.add_parser("inspect", help="pretty-print a network snapshot")
    ins.add_argument("snapshot", type=Path)

    sub.add_parser("presets", help="list the built-in experiment presets")
    return parser


def _parse_sets(items: list[str]) -> dict[str, object]:
    out = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        out[key] = parse_value(key, value)
    return out


def _parse_window(text: str) -> tuple[int, int]:
    try:
        start, end = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--window expects START,END, got {text!r}") from None
    if not 1 <= start <= end:
        raise UsageError(f"--window needs 1 <= START <= END, got {text!r}")
    return start, end


def parse_args(argv: list[str]) -> CliCommand:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command == "run":
        overrides = _parse_sets(ns.set)
        for flag, key in _RUN_FLAGS.items():
            value = getattr(ns, flag)
            if value is not None:
                overrides[key] = parse_value(key, value)
        return CliCommand("run", config_path=ns.config, overrides=overrides, out=ns.out)
    if ns.command == "experiment":
        if (ns.preset is None) == (ns.scenario is None):
            raise UsageError("give exactly one of PRESET or --scenario", parser.format_usage())
        if ns.preset is not None and ns.preset not in experiments.PRESETS:
            raise UsageError(f"unknown preset {ns.preset!r}; choose from {', '.join(experiments.PRESETS)}")
        if ns.replicates is not None and ns.replicates < 1:
            raise UsageError("--replicates must be >= 1")
        if ns.workers < 1:
            raise UsageError("--workers must be >= 1")
        return CliCommand("experiment", preset=ns.preset, scenario_path=ns.scenario,
                          replicates=ns.replicates, workers=ns.workers,
                          window=None if ns.window is None else _parse_window(ns.window),
                          overrides=_parse_sets(ns.set), out=ns.out)
    if ns.command == "inspect":
        return CliCommand("inspect", snapshot_path=ns.snapshot)
    return CliCommand("presets")


def _window(generations: int) -> tuple[int, int]:
    return (min(50, generations), generations)


def _cmd_run(cmd: CliCommand) -> int:
    cfg = load_config(cmd.config_path) if cmd.config_path else GaConfig()
    cfg = apply_overrides(cfg, cmd.overrides)
    result = evolve(cfg)
    cmd.out.mkdir(parents=True, exist_ok=True)
    experiments.write_generations_csv([(cfg.strategy, cfg.master_seed, result.records)],
                                      cmd.out / "generations.csv")
    experiments.write_plot_data(result.records, cmd.out / "plot.dat")
    (cmd.out / "best_network.json").write_text(snapshot.serialize(result.best), encoding="utf-8")
    window = _window(cfg.generations)
    s = summarize(result.records, window)
    print(
        f"final best fitness {result.records[-1].best.fitness:.6g}; "
        f"generations {window[0]}-{window[1]}: mean reliability {s.mean_reliability:.4f}, "
        f"mean cost {s.mean_cost:.2f}; output in {cmd.out}"
    )
    return 0


def _cmd_experiment(cmd: CliCommand) -> int:
    if cmd.scenario_path is not None:
        scenario = load_scenario(cmd.scenario_path)
        if cmd.overrides:
            scenario = replace(scenario, base=apply_overrides(scenario.base, cmd.overrides))
        if cmd.replicates is not None:
            scenario = replace(scenario, replicates=cmd.replicates)
    else:
        kwargs = {} if cmd.replicates is None else {"replicates": cmd.replicates}
        base = apply_overrides(GaConfig(), cmd.overrides)
        scenario = experiments.PRESETS[cmd.preset](base=base, **kwargs)
    if cmd.window is not None:
        scenario = replace(scenario, stats_window=cmd.window)
    result = experiments.run_scenario(scenario, workers=cmd.workers)
    experiments.write_scenario(result, cmd.out)
    for err in result.errors:
        print(f"cell {err.cell} replicate {err.replicate}: {err.error}", file=sys.stderr)

    by_cell: dict[int, list] = {}
    for row in result.summary:
        by_cell.setdefault(row.cell, []).append(row)
    for cell, rows in sorted(by_cell.items()):
        head = rows[0]
        print(
            f"cell {cell} strategy={head.strategy} {head.param}={head.value}: "
            f"mean reliability {statistics.fmean(r.mean_rel for r in rows):.4f}, "
            f"mean cost {statistics.fmean(r.mean_cost for r in rows):.2f} "
            f"({len(rows)} replicates)"
        )
    print(f"{scenario.name}: {len(result.summary)} summary rows written to {cmd.out / 'summary.csv'}")
    return 1 if result.errors else 0


def _cmd_inspect(cmd: CliCommand) -> int:
    net = snapshot.deserialize(cmd.snapshot_path.read_text(encoding="utf-8"))
    print(f"grid {net.grid[0]}x{net.grid[1]}, min spacing {net.min_spacing}, "
          f"server capacity {net.server_capacity:.6g}")
    print(f"{len(net.clients)} clients, {len(net.servers)} servers, {len(net.links)} links "
          f"({sum(not l.working for l in net.links.values())} failed)")
    print(f"cost {cost(net):.2f}  redundancy {redundancy(net):.4f}  pleiotropy {pleiotropy(net):.4f}  "
          f"utilization nominal {utilization(net, UtilizationMode.NOMINAL):.4f} "
          f"effective {utilization(net, UtilizationMode.EFFECTIVE):.4f}")
    if len(net.nodes) <= EXACT_NODE_LIMIT:
        print(f"exact reliability {exact_reliability(net):.4f}")
    print("nodes:")
    for n in net.nodes.values():
        state = "up" if n.working else f"down {n.down_age}"
        extra = f" traffic {n.traffic:.3f}" if not n.is_server else ""
        print(f"  {n.kind.value}{n.id:<4} at ({n.pos[0]:>3},{n.pos[1]:>3}) {state}{extra}")
    print("links:")
    for l in net.links.values():
        state = "up" if l.working else f"down {l.down_age}"
        a, b = l.endpoints
        print(f"  {l.id:<4} {l.kind.value} {a}-{b} length {net.link_length(l):.2f} {state}")
    return 0


def _cmd_presets() -> int:
    for name, factory in experiments.PRESETS.items():
        sc = factory()
        sweeps = ", ".join(f"{p} in {{{', '.join(experiments._fmt(v) for v in vals)}}}"
                           for p, vals in sc.sweeps)
        print(f"{name}: {sweeps}; {sc.replicates} replicates, window {sc.stats_window}")
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse_args(argv)
    except UsageError as exc:
        if exc.usage:
            sys.stderr.write(exc.usage)
        print(f"netevolve: error: {exc}", file=sys.stderr)
        return 2
    except NetEvolveError as exc:  # bad --set / flag values
        print(f"netevolve: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    try:
        if cmd.name == "run":
            return _cmd_run(cmd)
        if cmd.name == "experiment":
            return _cmd_experiment(cmd)
        if cmd.name == "inspect":
            return _cmd_inspect(cmd)
        return _cmd_presets()
    except (NetEvolveError, OSError, ValueError) as exc:
        print(f"netevolve: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
