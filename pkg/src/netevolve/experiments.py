"""Parameter sweeps over GA runs, window summaries, and CSV/plot-data output.

Generations CSV header::

    generation,strategy,fitness,reliability,cost,redundancy,pleiotropy,ratio,
    utilization_nominal,utilization_effective,n_links,n_servers,n_failed_links,seed

Summary CSV header::

    scenario,cell,strategy,param,value,seed,mean_rel,sd_rel,mean_cost,sd_cost,mean_D,mean_L

Floats carry 6 significant digits; lines end in LF.
"""

from __future__ import annotations

import csv
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .ga import GaConfig, GenerationRecord, Strategy, run
from .stats import DEFAULT_WINDOW, summarize

log = logging.getLogger(__name__)

GENERATIONS_HEADER = [
    "generation", "strategy", "fitness", "reliability", "cost", "redundancy",
    "pleiotropy", "ratio", "utilization_nominal", "utilization_effective",
    "n_links", "n_servers", "n_failed_links", "seed",
]
SUMMARY_HEADER = [
    "scenario", "cell", "strategy", "param", "value", "seed",
    "mean_rel", "sd_rel", "mean_cost", "sd_cost", "mean_D", "mean_L",
]
DEFAULT_REPLICATES = 5


@dataclass(frozen=True)
class Scenario:
    name: str
    base: GaConfig = field(default_factory=GaConfig)
    sweeps: tuple[tuple[str, tuple[Any, ...]], ...] = ()
    replicates: int = DEFAULT_REPLICATES
    stats_window: tuple[int, int] = DEFAULT_WINDOW
    master_seed: int = 0

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        start, end = self.stats_window
        if not 1 <= start <= end:
            raise ValueError(f"bad stats window {self.stats_window}")
        for path, values in self.sweeps:
            if not values:
                raise ValueError(f"sweep {path} has no values")
            set_param(self.base, path, values[0])  # validates the path

    def cells(self) -> list[dict[str, Any]]:
        """Cartesian product of sweep values, first sweep varying slowest."""
        paths = [p for p, _ in self.sweeps]
        return [dict(zip(paths, combo)) for combo in itertools.product(*(v for _, v in self.sweeps))]

    def replicate_seed(self, replicate: int) -> int:
        """Run seed for a replicate; every cell shares it, so cells are paired."""
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(replicate,))
        return int(seq.generate_state(1)[0] & 0x7FFFFFFF)


@dataclass(frozen=True)
class SummaryRow:
    scenario: str
    cell: int
    strategy: str
    param: str
    value: str
    seed: int
    mean_rel: float
    sd_rel: float
    mean_cost: float
    sd_cost: float
    mean_D: float
    mean_L: float


@dataclass
class CellRun:
    cell: int
    params: dict[str, Any]
    replicate: int
    config: GaConfig
    records: list[GenerationRecord] = field(default_factory=list)
    error: str | None = None


@dataclass
class ScenarioResult:
    scenario: Scenario
    runs: list[CellRun]
    summary: list[SummaryRow]

    @property
    def errors(self) -> list[CellRun]:
        return [r for r in self.runs if r.error is not None]


def set_param(cfg: GaConfig, path: str, value: Any) -> GaConfig:
    """Return ``cfg`` with a dotted field path (``env.repair_time``) replaced."""
    head, _, rest = path.partition(".")
    if head not in GaConfig.__dataclass_fields__:
        raise ValueError(f"unknown config field {path!r}")
    if rest:
        inner = getattr(cfg, head)
        if rest not in type(inner).__dataclass_fields__:
            raise ValueError(f"unknown config field {path!r}")
        return replace(cfg, **{head: replace(inner, **{rest: value})})
    return replace(cfg, **{head: value})


def _execute(job: CellRun) -> CellRun:
    try:
        job.records = run(job.config)
    except Exception as exc:  # recorded per cell, never fatal to the sweep
        log.warning("cell %d replicate %d failed: %s", job.cell, job.replicate, exc)
        job.error = f"{type(exc).__name__}: {exc}"
    return job


def run_scenario(scenario: Scenario, workers: int = 1) -> ScenarioResult:
    """Run every cell x replicate and summarize each over the stats window.

    With ``workers > 1`` runs execute in separate processes; output order
    and content are identical to a serial run.
    """
    jobs = []
    for cell_index, params in enumerate(scenario.cells()):
        for rep in range(scenario.replicates):
            cfg = scenario.base
            for path, value in params.items():
                cfg = set_param(cfg, path, value)
            cfg = replace(cfg, master_seed=scenario.replicate_seed(rep))
            if scenario.stats_window[1] > cfg.generations:
                raise ValueError(f"stats window {scenario.stats_window} exceeds {cfg.generations} generations")
            jobs.append(CellRun(cell_index, params, rep, cfg))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_execute, jobs))
    else:
        done = [_execute(j) for j in jobs]

    summary = [_summary_row(scenario, r) for r in done if r.error is None]
    return ScenarioResult(scenario, done, summary)


def _summary_row(scenario: Scenario, r: CellRun) -> SummaryRow:
    s = summarize(r.records, scenario.stats_window)
    varying = {k: v for k, v in r.params.items() if k != "strategy"}
    return SummaryRow(
        scenario=scenario.name,
        cell=r.cell,
        strategy=r.config.strategy.value,
        param=";".join(varying) if varying else "-",
        value=";".join(_fmt(v) for v in varying.values()) if varying else "-",
        seed=r.config.master_seed,
        mean_rel=s.mean_reliability,
        sd_rel=s.sd_reliability,
        mean_cost=s.mean_cost,
        sd_cost=s.sd_cost,
        mean_D=s.mean_redundancy,
        mean_L=s.mean_pleiotropy,
    )


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, Strategy):
        return value.value
    return str(value)


def generation_row(record: GenerationRecord, strategy: Strategy | str, seed: int) -> list[Any]:
    b = record.best
    return [
        record.generation, Strategy.parse(strategy).value, b.fitness, b.reliability, b.cost,
        b.redundancy, b.pleiotropy, record.redundancy_pleiotropy_ratio,
        record.utilization_nominal, record.utilization_effective,
        record.n_links, record.n_servers, record.n_failed_links, seed,
    ]


def summary_row(row: SummaryRow) -> list[Any]:
    return [getattr(row, name) for name in SUMMARY_HEADER]


def write_csv(rows: Iterable[Sequence[Any]], path: str | Path, header: Sequence[str]) -> None:
    """Write rows under ``header`` as UTF-8, LF-terminated, 6-significant-digit CSV."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_generations_csv(runs: Iterable[tuple[Strategy | str, int, Sequence[GenerationRecord]]],
                          path: str | Path) -> None:
    """``runs`` yields (strategy, seed, records) triples."""
    rows = (
        generation_row(rec, strategy, seed)
        for strategy, seed, records in runs
        for rec in records
    )
    write_csv(rows, path, GENERATIONS_HEADER)


def write_summary_csv(rows: Iterable[SummaryRow], path: str | Path) -> None:
    write_csv((summary_row(r) for r in rows), path, SUMMARY_HEADER)


def write_plot_data(records: Sequence[GenerationRecord], path: str | Path) -> None:
    """Whitespace-separated per-generation series with a '#' header, for gnuplot and friends."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("# generation reliability cost ratio\n")
        for r in records:
            fh.write(
                f"{r.generation} {r.best.reliability:.6g} {r.best.cost:.6g} "
                f"{r.redundancy_pleiotropy_ratio:.6g}\n"
            )


def write_scenario(result: ScenarioResult, out_dir: str | Path) -> dict[str, Path]:
    """Write generations.csv and summary.csv for a scenario into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"generations": out / "generations.csv", "summary": out / "summary.csv"}
    write_generations_csv(
        ((r.config.strategy, r.config.master_seed, r.records) for r in result.runs if r.error is None),
        paths["generations"],
    )
    write_summary_csv(result.summary, paths["summary"])
    return paths


# -- presets -----------------------------------------------------------------

def failure_prob_scenario(replicates: int = DEFAULT_REPLICATES, base: GaConfig | None = None) -> Scenario:
    return Scenario(
        name="failure-prob",
        base=base or GaConfig(),
        sweeps=(("strategy", (Strategy.ONE, Strategy.TWO)),
                ("env.link_failure_prob", (0.01, 0.001))),
        replicates=replicates,
    )


def repair_rate_scenario(replicates: int = DEFAULT_REPLICATES, base: GaConfig | None = None) -> Scenario:
    return Scenario(
        name="repair-rate",
        base=base or GaConfig(),
        sweeps=(("strategy", (Strategy.ONE, Strategy.TWO)),
                ("env.repair_time", (2, 10, 50))),
        replicates=replicates,
    )


def offspring_scenario(replicates: int = DEFAULT_REPLICATES, base: GaConfig | None = None) -> Scenario:
    return Scenario(
        name="offspring",
        base=replace(base or GaConfig(), strategy=Strategy.ONE),
        sweeps=(("offspring", (10, 20, 50)),),
        replicates=replicates,
    )


PRESETS = {
    "failure-prob": failure_prob_scenario,
    "repair-rate": repair_rate_scenario,
    "offspring": offspring_scenario,
}
