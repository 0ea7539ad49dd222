"""Mutation-only evolution of network topologies."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from . import metrics
from .dynamics import (
    HIGH_UTILIZATION,
    LOW_UTILIZATION,
    SERVER_PROB,
    EnvParams,
    Shocks,
    UtilizationMode,
    environment_step,
    maintain,
    mutate,
    utilization,
)
from .errors import PopulationTooSmall
from .metrics import MetricsRow
from .model import Network, new_network

STRATEGY_TWO_PARENTS = 2
STRATEGY_TWO_PER_PARENT = 5

# stream purposes for derive_rng
_BUILD, _INIT, _EVAL, _CHILD, _ENV = range(5)


class Strategy(str, enum.Enum):
    ONE = "one"
    TWO = "two"

    @classmethod
    def parse(cls, value) -> Strategy:
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        aliases = {"1": cls.ONE, "one": cls.ONE, "2": cls.TWO, "two": cls.TWO}
        if text not in aliases:
            raise ValueError(f"unknown strategy {value!r}")
        return aliases[text]


@dataclass(frozen=True)
class GaConfig:
    strategy: Strategy = Strategy.ONE
    offspring: int = 10
    generations: int = 150
    mutations_per_offspring: tuple[int, int] = (1, 3)
    env: EnvParams = field(default_factory=EnvParams)
    n_clients: int = 20
    n_servers: int = 3
    grid: tuple[int, int] = (100, 100)
    min_spacing: float = 3.0
    t_max: float = 10.0
    server_capacity: float | None = None  # None: derive from target_utilization
    target_utilization: float = 0.8
    shared_environment: bool = True
    in_band_moves: bool = True
    cost_per_unit_length: float = 1.0
    n_pairs: int = metrics.DEFAULT_N_PAIRS
    low: float = LOW_UTILIZATION
    high: float = HIGH_UTILIZATION
    server_prob: float = SERVER_PROB
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        lo, hi = self.mutations_per_offspring
        if lo < 0 or hi < lo:
            raise ValueError(f"bad mutations_per_offspring {self.mutations_per_offspring}")
        if self.offspring < 1:
            raise ValueError("offspring must be >= 1")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        if self.n_clients < 1 or self.n_servers < 1:
            raise ValueError("need at least one client and one server")
        if self.cost_per_unit_length <= 0 or self.t_max <= 0 or self.target_utilization <= 0:
            raise ValueError("price, t_max and target_utilization must be positive")
        if self.server_capacity is not None and self.server_capacity <= 0:
            raise ValueError("server_capacity must be positive")
        if not self.low <= self.high:
            raise ValueError("low threshold exceeds high threshold")
        if not 0.0 <= self.server_prob <= 1.0:
            raise ValueError("server_prob must lie in [0, 1]")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")

    @property
    def population_size(self) -> int:
        if self.strategy is Strategy.TWO:
            return STRATEGY_TWO_PARENTS * STRATEGY_TWO_PER_PARENT
        return self.offspring


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best: MetricsRow
    utilization_nominal: float
    utilization_effective: float
    n_links: int
    n_servers: int
    n_failed_links: int

    @property
    def redundancy_pleiotropy_ratio(self) -> float:
        return ratio(self.best.redundancy, self.best.pleiotropy)


@dataclass
class RunResult:
    config: GaConfig
    records: list[GenerationRecord]
    best: Network  # parent selected in the final generation


def ratio(redundancy: float, pleiotropy: float) -> float:
    return redundancy / pleiotropy if pleiotropy > 0 else 0.0


def derive_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for a (purpose, generation, index) key."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(seq)


def seed_network(cfg: GaConfig) -> Network:
    """The link-free starting network all runs with this config share."""
    build_seed = int(np.random.SeedSequence(cfg.master_seed, spawn_key=(_BUILD,)).generate_state(1)[0])
    net = new_network(
        n_clients=cfg.n_clients,
        n_servers=cfg.n_servers,
        grid=cfg.grid,
        min_spacing=cfg.min_spacing,
        t_max=cfg.t_max,
        default_link_failure_rate=cfg.env.link_failure_prob,
        seed=build_seed,
    )
    if cfg.server_capacity is not None:
        net.server_capacity = float(cfg.server_capacity)
    else:
        demand = sum(c.traffic for c in net.clients)
        net.server_capacity = demand / (len(net.servers) * cfg.target_utilization)
    return net


def mutate_offspring(parent: Network, cfg: GaConfig, rng: np.random.Generator) -> Network:
    """Copy ``parent`` and apply between min and max maintenance actions."""
    child = parent.copy()
    lo, hi = cfg.mutations_per_offspring
    k = int(rng.integers(lo, hi + 1))
    step = mutate if cfg.in_band_moves else maintain
    for _ in range(k):
        step(child, rng, cfg.low, cfg.high, cfg.server_prob)
    return child


def evaluate_population(population: list[Network], cfg: GaConfig, generation: int,
                        pool=None) -> list[MetricsRow]:
    """Metrics for every member, each with its own derived stream.

    ``pool`` may be any ``concurrent.futures`` executor; results do not
    depend on evaluation order.
    """
    args = [
        (net, cfg.n_pairs, cfg.cost_per_unit_length, cfg.master_seed, generation, i)
        for i, net in enumerate(population)
    ]
    if pool is None:
        return [_evaluate_member(*a) for a in args]
    return list(pool.map(_evaluate_member, *zip(*args)))


def _evaluate_member(net, n_pairs, price, master_seed, generation, index) -> MetricsRow:
    rng = derive_rng(master_seed, _EVAL, generation, index)
    return metrics.evaluate(net, n_pairs, rng, price)


def rank(rows: list[MetricsRow]) -> list[int]:
    """Member indices by descending fitness, ties to the lower index."""
    return sorted(range(len(rows)), key=lambda i: (-rows[i].fitness, i))


def _record(generation: int, net: Network, row: MetricsRow) -> GenerationRecord:
    return GenerationRecord(
        generation=generation,
        best=row,
        utilization_nominal=utilization(net, UtilizationMode.NOMINAL),
        utilization_effective=utilization(net, UtilizationMode.EFFECTIVE),
        n_links=len(net.links),
        n_servers=len(net.servers),
        n_failed_links=sum(not l.working for l in net.links.values()),
    )


def _breed(parents: list[Network], per_parent: int, cfg: GaConfig, generation: int) -> list[Network]:
    children, streams = [], []
    for parent in parents:
        for _ in range(per_parent):
            rng = derive_rng(cfg.master_seed, _CHILD, generation, len(children))
            children.append(mutate_offspring(parent, cfg, rng))
            streams.append(rng)
    shocks = None
    if cfg.shared_environment:
        shocks = Shocks.draw(
            derive_rng(cfg.master_seed, _ENV, generation),
            max(c.next_link_id for c in children),
            max(c.next_node_id for c in children),
        )
    for child, rng in zip(children, streams):
        environment_step(child, cfg.env, rng, shocks)
    return children


def _generation(population: list[Network], cfg: GaConfig, generation: int, pool=None):
    if cfg.strategy is Strategy.ONE:
        if not population:
            raise PopulationTooSmall("strategy one needs a nonempty population")
        n_parents, per_parent = 1, cfg.offspring
    else:
        if len(population) < STRATEGY_TWO_PARENTS:
            raise PopulationTooSmall(f"strategy two needs two members, got {len(population)}")
        n_parents, per_parent = STRATEGY_TWO_PARENTS, STRATEGY_TWO_PER_PARENT
    rows = evaluate_population(population, cfg, generation, pool)
    top = rank(rows)[:n_parents]
    children = _breed([population[i] for i in top], per_parent, cfg, generation)
    parent = population[top[0]]
    return children, _record(generation, parent, rows[top[0]]), parent


def step_strategy_one(population: list[Network], cfg: GaConfig, generation: int,
                      pool=None) -> tuple[list[Network], GenerationRecord]:
    """Breed ``cfg.offspring`` children from the single fittest member.

    The parent is not carried over; the children are the next population.
    """
    children, record, _ = _generation(population, _with_strategy(cfg, Strategy.ONE), generation, pool)
    return children, record


def step_strategy_two(population: list[Network], cfg: GaConfig, generation: int,
                      pool=None) -> tuple[list[Network], GenerationRecord]:
    """Breed five children from each of the two fittest members."""
    children, record, _ = _generation(population, _with_strategy(cfg, Strategy.TWO), generation, pool)
    return children, record


def _with_strategy(cfg: GaConfig, strategy: Strategy) -> GaConfig:
    return cfg if cfg.strategy is strategy else replace(cfg, strategy=strategy)


def initial_population(cfg: GaConfig) -> list[Network]:
    """Population-size copies of the seed network, each mutated once."""
    seed = seed_network(cfg)
    return [
        mutate_offspring(seed, cfg, derive_rng(cfg.master_seed, _INIT, i))
        for i in range(cfg.population_size)
    ]


def evolve(cfg: GaConfig, pool=None) -> RunResult:
    population = initial_population(cfg)
    records = []
    parent = population[0]
    for generation in range(1, cfg.generations + 1):
        population, record, parent = _generation(population, cfg, generation, pool)
        records.append(record)
    return RunResult(cfg, records, parent)


def run(cfg: GaConfig, pool=None) -> list[GenerationRecord]:
    """One record per generation; a pure function of ``cfg``."""
    return evolve(cfg, pool).records
