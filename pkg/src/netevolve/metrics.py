"""Cost, reliability, fitness, redundancy and pleiotropy of a network."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import NoClients, NoServers, TooFewNodes, TooLarge
from .graph import working_components
from .model import LinkKind, Network

DEFAULT_N_PAIRS = 100
EXACT_NODE_LIMIT = 64


@dataclass(frozen=True)
class MetricsRow:
    fitness: float
    reliability: float
    cost: float
    redundancy: float
    pleiotropy: float


def cost(net: Network, cost_per_unit_length: float = 1.0) -> float:
    """Price times total Euclidean length of every installed link, failed or not."""
    return cost_per_unit_length * sum(net.link_length(l) for l in net.links.values())


def reliability(net: Network, n_pairs: int = DEFAULT_N_PAIRS,
                rng: np.random.Generator | None = None) -> float:
    """Fraction of randomly drawn node pairs joined by a working path.

    Each sample is an unordered pair of distinct nodes drawn uniformly;
    samples are independent (with replacement).
    """
    ids = list(net.nodes)
    n = len(ids)
    if n < 2:
        raise TooFewNodes(f"reliability needs two nodes, network has {n}")
    if n_pairs < 1:
        raise ValueError("n_pairs must be positive")
    rng = rng if rng is not None else np.random.default_rng()
    labels = working_components(net)
    comp = np.array([labels[i] for i in ids])
    first = rng.integers(n, size=n_pairs)
    second = rng.integers(n - 1, size=n_pairs)
    second = second + (second >= first)
    ok = (comp[first] == comp[second]) & (comp[first] >= 0)
    return float(np.count_nonzero(ok)) / n_pairs


def exact_reliability(net: Network) -> float:
    """Connected fraction over all unordered node pairs, by per-pair BFS.

    Deliberately independent of the union-find used by ``reliability``; it
    serves as the test oracle.
    """
    ids = sorted(net.nodes)
    n = len(ids)
    if n > EXACT_NODE_LIMIT:
        raise TooLarge(f"exact reliability limited to {EXACT_NODE_LIMIT} nodes, got {n}")
    if n < 2:
        raise TooFewNodes(f"reliability needs two nodes, network has {n}")
    adjacency: dict[int, list[int]] = {i: [] for i in ids}
    for link in net.links.values():
        a, b = link.endpoints
        if link.working and net.nodes[a].working and net.nodes[b].working:
            adjacency[a].append(b)
            adjacency[b].append(a)

    def has_path(src: int, dst: int) -> bool:
        if not (net.nodes[src].working and net.nodes[dst].working):
            return False
        seen = {src}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            if u == dst:
                return True
            for v in adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return False

    connected = sum(
        has_path(a, b) for i, a in enumerate(ids) for b in ids[i + 1:]
    )
    return connected / (n * (n - 1) // 2)


def fitness_from(rel: float, price_total: float) -> float:
    return rel / price_total if price_total > 0 else 0.0


def fitness(net: Network, n_pairs: int = DEFAULT_N_PAIRS,
            rng: np.random.Generator | None = None,
            cost_per_unit_length: float = 1.0) -> float:
    """Reliability per unit cost; a link-free network scores zero."""
    rel = reliability(net, n_pairs, rng)
    return fitness_from(rel, cost(net, cost_per_unit_length))


def _client_server_links(net: Network):
    return (l for l in net.links.values() if l.kind is LinkKind.CLIENT_SERVER)


def redundancy(net: Network, include_client_links: bool = False) -> float:
    """Client out-degree summed over clients, per server.

    By default a client's out-degree counts only its links to servers.
    With ``include_client_links`` every link incident to a client counts
    (a client-client link then counts once for each endpoint).
    """
    n_servers = len(net.servers)
    if n_servers == 0:
        raise NoServers("redundancy needs at least one server")
    if include_client_links:
        degree = sum(
            (not net.nodes[a].is_server) + (not net.nodes[b].is_server)
            for a, b in (l.endpoints for l in net.links.values())
        )
    else:
        degree = sum(1 for _ in _client_server_links(net))
    return degree / n_servers


def pleiotropy(net: Network) -> float:
    """Server in-degree from clients, summed over servers, per client."""
    n_clients = len(net.clients)
    if n_clients == 0:
        raise NoClients("pleiotropy needs at least one client")
    return sum(1 for _ in _client_server_links(net)) / n_clients


def evaluate(net: Network, n_pairs: int = DEFAULT_N_PAIRS,
             rng: np.random.Generator | None = None,
             cost_per_unit_length: float = 1.0) -> MetricsRow:
    rel = reliability(net, n_pairs, rng)
    price_total = cost(net, cost_per_unit_length)
    return MetricsRow(
        fitness=fitness_from(rel, price_total),
        reliability=rel,
        cost=price_total,
        redundancy=redundancy(net),
        pleiotropy=pleiotropy(net),
    )
