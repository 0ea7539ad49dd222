"""Network genome: nodes, links and their placement on an integer grid."""

from __future__ import annotations

import copy
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, PlacementInfeasible

PLACEMENT_ATTEMPTS = 10_000


class NodeKind(str, enum.Enum):
    CLIENT = "C"
    SERVER = "S"


class LinkKind(str, enum.Enum):
    CLIENT_CLIENT = "CC"
    CLIENT_SERVER = "CS"


@dataclass
class Node:
    id: int
    kind: NodeKind
    pos: tuple[int, int]
    traffic: float = 0.0
    failure_rate: float = 0.0
    working: bool = True
    down_age: int = 0

    @property
    def is_server(self) -> bool:
        return self.kind is NodeKind.SERVER


@dataclass
class Link:
    """An undirected link. Client-server links are stored as (client, server)."""

    id: int
    endpoints: tuple[int, int]
    kind: LinkKind
    failure_rate: float = 0.0
    working: bool = True
    down_age: int = 0

    @property
    def pair(self) -> frozenset[int]:
        return frozenset(self.endpoints)


@dataclass
class Network:
    nodes: dict[int, Node] = field(default_factory=dict)
    links: dict[int, Link] = field(default_factory=dict)
    server_capacity: float = 50.0
    grid: tuple[int, int] = (100, 100)
    min_spacing: float = 3.0
    link_failure_rate: float = 0.0
    next_node_id: int = 0
    next_link_id: int = 0

    # -- views -------------------------------------------------------------

    @property
    def clients(self) -> list[Node]:
        return [n for n in self.nodes.values() if n.kind is NodeKind.CLIENT]

    @property
    def servers(self) -> list[Node]:
        return [n for n in self.nodes.values() if n.kind is NodeKind.SERVER]

    def linked_pairs(self) -> set[frozenset[int]]:
        return {link.pair for link in self.links.values()}

    def link_length(self, link: Link) -> float:
        a, b = link.endpoints
        (xa, ya), (xb, yb) = self.nodes[a].pos, self.nodes[b].pos
        return math.hypot(xa - xb, ya - yb)

    def copy(self) -> Network:
        return copy.deepcopy(self)

    # -- construction ------------------------------------------------------

    def position_free(self, pos: tuple[int, int]) -> bool:
        return all(
            math.hypot(pos[0] - n.pos[0], pos[1] - n.pos[1]) >= self.min_spacing
            for n in self.nodes.values()
        )

    def random_position(self, rng: np.random.Generator) -> tuple[int, int]:
        width, height = self.grid
        for _ in range(PLACEMENT_ATTEMPTS):
            pos = (int(rng.integers(width)), int(rng.integers(height)))
            if self.position_free(pos):
                return pos
        raise PlacementInfeasible(
            f"no position at spacing {self.min_spacing} on {width}x{height} grid "
            f"after {PLACEMENT_ATTEMPTS} attempts"
        )

    def add_node(self, kind: NodeKind, pos: tuple[int, int], traffic: float = 0.0,
                 failure_rate: float = 0.0) -> Node:
        node = Node(self.next_node_id, kind, pos, traffic, failure_rate)
        self.nodes[node.id] = node
        self.next_node_id += 1
        return node

    def add_link(self, a: int, b: int) -> Link:
        """Link two nodes, orienting client-server links client first."""
        na, nb = self.nodes[a], self.nodes[b]
        if a == b:
            raise InvariantViolation(f"self-link on node {a}")
        if na.is_server and nb.is_server:
            raise InvariantViolation(f"server-server link {a}-{b}")
        if frozenset((a, b)) in self.linked_pairs():
            raise InvariantViolation(f"duplicate link {a}-{b}")
        if na.is_server or nb.is_server:
            kind = LinkKind.CLIENT_SERVER
            endpoints = (b, a) if na.is_server else (a, b)
        else:
            kind = LinkKind.CLIENT_CLIENT
            endpoints = (min(a, b), max(a, b))
        link = Link(self.next_link_id, endpoints, kind, self.link_failure_rate)
        self.links[link.id] = link
        self.next_link_id += 1
        return link

    # -- validation --------------------------------------------------------

    def check(self) -> None:
        """Raise InvariantViolation on the first broken invariant."""
        width, height = self.grid
        if width <= 0 or height <= 0:
            raise InvariantViolation(f"grid must be positive, got {self.grid}")
        if self.min_spacing <= 0:
            raise InvariantViolation("min_spacing must be positive")
        if self.server_capacity <= 0:
            raise InvariantViolation("server_capacity must be positive")
        if not 0.0 <= self.link_failure_rate <= 1.0:
            raise InvariantViolation("link_failure_rate outside [0, 1]")
        if not self.clients:
            raise InvariantViolation("network has no clients")
        if not self.servers:
            raise InvariantViolation("network has no servers")

        for key, node in self.nodes.items():
            if key != node.id:
                raise InvariantViolation(f"node keyed {key} has id {node.id}")
            if node.id >= self.next_node_id or node.id < 0:
                raise InvariantViolation(f"node id {node.id} outside allocated range")
            x, y = node.pos
            if not (0 <= x < width and 0 <= y < height):
                raise InvariantViolation(f"node {node.id} at {node.pos} is off-grid")
            if not 0.0 <= node.failure_rate <= 1.0:
                raise InvariantViolation(f"node {node.id} failure_rate {node.failure_rate}")
            if node.traffic < 0:
                raise InvariantViolation(f"node {node.id} has negative traffic")
            _check_state(f"node {node.id}", node.working, node.down_age)

        placed = list(self.nodes.values())
        for i, a in enumerate(placed):
            for b in placed[i + 1:]:
                if math.hypot(a.pos[0] - b.pos[0], a.pos[1] - b.pos[1]) < self.min_spacing:
                    raise InvariantViolation(
                        f"nodes {a.id} and {b.id} closer than {self.min_spacing}"
                    )

        seen: set[frozenset[int]] = set()
        for key, link in self.links.items():
            if key != link.id:
                raise InvariantViolation(f"link keyed {key} has id {link.id}")
            if link.id >= self.next_link_id or link.id < 0:
                raise InvariantViolation(f"link id {link.id} outside allocated range")
            a, b = link.endpoints
            if a == b or a not in self.nodes or b not in self.nodes:
                raise InvariantViolation(f"link {link.id} has bad endpoints {link.endpoints}")
            n_servers = self.nodes[a].is_server + self.nodes[b].is_server
            if n_servers == 2:
                raise InvariantViolation(f"link {link.id} joins two servers")
            expected = LinkKind.CLIENT_SERVER if n_servers == 1 else LinkKind.CLIENT_CLIENT
            if link.kind is not expected:
                raise InvariantViolation(f"link {link.id} labelled {link.kind.name}")
            if link.pair in seen:
                raise InvariantViolation(f"duplicate link between {a} and {b}")
            seen.add(link.pair)
            if not 0.0 <= link.failure_rate <= 1.0:
                raise InvariantViolation(f"link {link.id} failure_rate {link.failure_rate}")
            _check_state(f"link {link.id}", link.working, link.down_age)


def _check_state(what: str, working: bool, down_age: int) -> None:
    if down_age < 0:
        raise InvariantViolation(f"{what} has negative down_age")
    if working and down_age != 0:
        raise InvariantViolation(f"{what} is working with down_age {down_age}")


def new_network(
    n_clients: int = 20,
    n_servers: int = 3,
    grid: tuple[int, int] = (100, 100),
    min_spacing: float = 3.0,
    t_max: float = 10.0,
    default_link_failure_rate: float = 0.0,
    seed: int = 0,
    server_capacity: float = 50.0,
) -> Network:
    """Place clients and servers at random with no links.

    Client traffic is drawn uniformly from the open interval (0, t_max).
    Clients are placed first, then servers; the same seed always yields
    the same network.
    """
    if n_clients < 1 or n_servers < 1:
        raise ValueError("need at least one client and one server")
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    rng = np.random.default_rng(seed)
    net = Network(
        server_capacity=server_capacity,
        grid=(int(grid[0]), int(grid[1])),
        min_spacing=float(min_spacing),
        link_failure_rate=float(default_link_failure_rate),
    )
    for _ in range(n_clients):
        traffic = 0.0
        while traffic == 0.0:  # keep the lower bound open
            traffic = float(rng.uniform(0.0, t_max))
        net.add_node(NodeKind.CLIENT, net.random_position(rng), traffic)
    for _ in range(n_servers):
        net.add_node(NodeKind.SERVER, net.random_position(rng))
    return net
