"""Utilization and the construction, maintenance and failure processes."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NetEvolveError, NoLinks, NoServers, Saturated
from .graph import working_components
from .model import Network, NodeKind

LOW_UTILIZATION = 0.75
HIGH_UTILIZATION = 0.85
SERVER_PROB = 0.2


class UtilizationMode(str, enum.Enum):
    NOMINAL = "nominal"
    EFFECTIVE = "effective"


@dataclass(frozen=True)
class EnvParams:
    link_failure_prob: float = 0.01
    node_failure_prob: float = 0.0
    repair_time: int = 2

    def __post_init__(self):
        for name in ("link_failure_prob", "node_failure_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if int(self.repair_time) != self.repair_time or self.repair_time < 1:
            raise ValueError(f"repair_time must be an integer >= 1, got {self.repair_time}")


def served_clients(net: Network) -> list[int]:
    """Ids of working clients with a working path to a working server."""
    labels = working_components(net)
    server_components = {labels[s.id] for s in net.servers if s.working}
    return [
        c.id for c in net.clients
        if c.working and labels[c.id] in server_components
    ]


def utilization(net: Network, mode: UtilizationMode = UtilizationMode.EFFECTIVE) -> float:
    """Requested traffic over total server capacity.

    NOMINAL sums every client's traffic. EFFECTIVE sums only clients that
    can currently reach a server, so it moves as links are added, removed
    or fail.
    """
    servers = net.servers
    if not servers:
        raise NoServers("utilization needs at least one server")
    if UtilizationMode(mode) is UtilizationMode.NOMINAL:
        demand = sum(c.traffic for c in net.clients)
    else:
        demand = sum(net.nodes[i].traffic for i in served_clients(net))
    return demand / (len(servers) * net.server_capacity)


def legal_pairs(net: Network) -> list[tuple[int, int]]:
    """Unlinked node pairs that may be joined, in deterministic order."""
    taken = net.linked_pairs()
    ids = sorted(net.nodes)
    pairs = []
    for i, a in enumerate(ids):
        a_server = net.nodes[a].is_server
        for b in ids[i + 1:]:
            if a_server and net.nodes[b].is_server:
                continue
            if frozenset((a, b)) not in taken:
                pairs.append((a, b))
    return pairs


def add_random_link(net: Network, rng: np.random.Generator) -> int:
    pairs = legal_pairs(net)
    if not pairs:
        raise Saturated("no legal node pair left to link")
    a, b = pairs[int(rng.integers(len(pairs)))]
    return net.add_link(a, b).id


def remove_random_link(net: Network, rng: np.random.Generator) -> int:
    """Delete a uniformly chosen link, working or failed."""
    if not net.links:
        raise NoLinks("network has no links to remove")
    ids = sorted(net.links)
    link_id = ids[int(rng.integers(len(ids)))]
    del net.links[link_id]
    return link_id


def add_server(net: Network, rng: np.random.Generator) -> int:
    pos = net.random_position(rng)
    return net.add_node(NodeKind.SERVER, pos).id


@dataclass(frozen=True)
class FailureReport:
    links_failed: int = 0
    nodes_failed: int = 0
    links_repaired: int = 0
    nodes_repaired: int = 0


@dataclass(frozen=True)
class Shocks:
    """Pre-drawn failure uniforms indexed by entity id.

    Passing the same shocks to several networks makes a link (or node) that
    they share fail in all of them or in none.
    """

    links: np.ndarray
    nodes: np.ndarray

    @classmethod
    def draw(cls, rng: np.random.Generator, n_links: int, n_nodes: int) -> Shocks:
        return cls(rng.random(n_links), rng.random(n_nodes))


def environment_step(net: Network, env: EnvParams, rng: np.random.Generator | None = None,
                     shocks: Shocks | None = None) -> FailureReport:
    """Advance failure and repair by one generation.

    Order: failed entities age by one, entities whose age reaches
    ``repair_time`` come back up, then every entity that was working at
    entry may fail afresh. An entity repaired in this step cannot fail again
    in the same step.

    Without ``shocks`` one uniform is drawn from ``rng`` per candidate,
    links first and then nodes, both in id order. With ``shocks`` entity
    ``i`` fails when ``shocks.links[i]`` (or ``shocks.nodes[i]``) is below
    the failure probability.
    """
    if rng is None and shocks is None:
        raise ValueError("environment_step needs an rng or shocks")
    counts = {"links_failed": 0, "nodes_failed": 0, "links_repaired": 0, "nodes_repaired": 0}
    for label, entities, prob, shared in (
        ("links", [net.links[i] for i in sorted(net.links)], env.link_failure_prob,
         None if shocks is None else shocks.links),
        ("nodes", [net.nodes[i] for i in sorted(net.nodes)], env.node_failure_prob,
         None if shocks is None else shocks.nodes),
    ):
        candidates = [e for e in entities if e.working]
        for e in entities:
            if not e.working:
                e.down_age += 1
                if e.down_age >= env.repair_time:
                    e.working = True
                    e.down_age = 0
                    counts[f"{label}_repaired"] += 1
        if prob <= 0.0 or not candidates:
            continue
        if shared is None:
            draws = rng.random(len(candidates))
        else:
            draws = shared[[e.id for e in candidates]]
        for e, u in zip(candidates, draws):
            if u < prob:
                e.working = False
                e.down_age = 0
                counts[f"{label}_failed"] += 1
    return FailureReport(**counts)


class MaintenanceAction(str, enum.Enum):
    NONE = "none"
    ADD_LINK = "add_link"
    REMOVE_LINK = "remove_link"
    ADD_SERVER = "add_server"


@dataclass(frozen=True)
class MaintenanceReport:
    action: MaintenanceAction
    utilization: float
    blocked: str | None = None  # error name when the action was infeasible

    @property
    def changed(self) -> bool:
        return self.action is not MaintenanceAction.NONE and self.blocked is None


def maintain(
    net: Network,
    rng: np.random.Generator,
    low: float = LOW_UTILIZATION,
    high: float = HIGH_UTILIZATION,
    server_prob: float = SERVER_PROB,
) -> MaintenanceReport:
    """Apply at most one structural change to pull effective utilization into [low, high].

    Below ``low`` a random link is added. Above ``high`` a server is added
    with probability ``server_prob``, otherwise a random link is removed.
    An infeasible action is reported in ``blocked`` and leaves the network
    untouched.
    """
    u = utilization(net, UtilizationMode.EFFECTIVE)
    if u < low:
        action = MaintenanceAction.ADD_LINK
    elif u > high:
        if rng.random() < server_prob:
            action = MaintenanceAction.ADD_SERVER
        else:
            action = MaintenanceAction.REMOVE_LINK
    else:
        return MaintenanceReport(MaintenanceAction.NONE, u)

    return _apply(net, rng, action, u)


def _apply(net: Network, rng: np.random.Generator, action: MaintenanceAction,
           u: float) -> MaintenanceReport:
    try:
        if action is MaintenanceAction.ADD_LINK:
            add_random_link(net, rng)
        elif action is MaintenanceAction.REMOVE_LINK:
            remove_random_link(net, rng)
        else:
            add_server(net, rng)
    except NetEvolveError as exc:
        return MaintenanceReport(action, u, blocked=type(exc).__name__)
    return MaintenanceReport(action, u)


def mutate(
    net: Network,
    rng: np.random.Generator,
    low: float = LOW_UTILIZATION,
    high: float = HIGH_UTILIZATION,
    server_prob: float = SERVER_PROB,
) -> MaintenanceReport:
    """One structural mutation.

    Outside the band this is exactly ``maintain``. Inside it, where
    ``maintain`` would do nothing, a link is added or removed at random
    with equal odds, so a balanced network can still be rewired.
    """
    u = utilization(net, UtilizationMode.EFFECTIVE)
    if not low <= u <= high:
        return maintain(net, rng, low, high, server_prob)
    if rng.random() < 0.5:
        action = MaintenanceAction.ADD_LINK
    else:
        action = MaintenanceAction.REMOVE_LINK
    return _apply(net, rng, action, u)
