"""JSON snapshot format for networks.

Layout (``format_version`` 1)::

    {
      "format_version": 1,
      "server_capacity": 50.0,
      "grid": [100, 100],
      "min_spacing": 3.0,
      "link_failure_rate": 0.01,
      "next_node_id": 23,
      "next_link_id": 41,
      "nodes": [{"id", "kind" ("C"|"S"), "pos" [x, y], "traffic",
                 "failure_rate", "working", "down_age"}, ...],
      "links": [{"id", "endpoints" [a, b], "kind" ("CC"|"CS"),
                 "failure_rate", "working", "down_age"}, ...]
    }

Floats are written with ``repr`` precision, so a round trip is exact.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import InvariantViolation, ParseError
from .model import Link, LinkKind, Network, Node, NodeKind

FORMAT_VERSION = 1


def to_dict(net: Network) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "server_capacity": net.server_capacity,
        "grid": list(net.grid),
        "min_spacing": net.min_spacing,
        "link_failure_rate": net.link_failure_rate,
        "next_node_id": net.next_node_id,
        "next_link_id": net.next_link_id,
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind.value,
                "pos": list(n.pos),
                "traffic": n.traffic,
                "failure_rate": n.failure_rate,
                "working": n.working,
                "down_age": n.down_age,
            }
            for n in net.nodes.values()
        ],
        "links": [
            {
                "id": l.id,
                "endpoints": list(l.endpoints),
                "kind": l.kind.value,
                "failure_rate": l.failure_rate,
                "working": l.working,
                "down_age": l.down_age,
            }
            for l in net.links.values()
        ],
    }


def serialize(net: Network) -> str:
    return json.dumps(to_dict(net), indent=2) + "\n"


def from_dict(doc: Any) -> Network:
    """Build a network from a decoded document and validate it."""
    if not isinstance(doc, dict):
        raise ParseError("snapshot must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version!r}")
    try:
        net = Network(
            server_capacity=float(doc["server_capacity"]),
            grid=_int_pair(doc["grid"]),
            min_spacing=float(doc["min_spacing"]),
            link_failure_rate=float(doc.get("link_failure_rate", 0.0)),
            next_node_id=int(doc["next_node_id"]),
            next_link_id=int(doc["next_link_id"]),
        )
        for raw in doc["nodes"]:
            node = Node(
                id=int(raw["id"]),
                kind=NodeKind(raw["kind"]),
                pos=_int_pair(raw["pos"]),
                traffic=float(raw.get("traffic", 0.0)),
                failure_rate=float(raw["failure_rate"]),
                working=_bool(raw["working"]),
                down_age=int(raw["down_age"]),
            )
            if node.id in net.nodes:
                raise InvariantViolation(f"duplicate node id {node.id}")
            net.nodes[node.id] = node
        for raw in doc["links"]:
            link = Link(
                id=int(raw["id"]),
                endpoints=_int_pair(raw["endpoints"]),
                kind=LinkKind(raw["kind"]),
                failure_rate=float(raw["failure_rate"]),
                working=_bool(raw["working"]),
                down_age=int(raw["down_age"]),
            )
            if link.id in net.links:
                raise InvariantViolation(f"duplicate link id {link.id}")
            net.links[link.id] = link
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed snapshot: {exc!r}") from exc
    net.check()
    return net


def deserialize(text: str) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc
    return from_dict(doc)


def _int_pair(value: Any) -> tuple[int, int]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValueError(f"expected a pair, got {value!r}")
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise ValueError(f"expected integers, got {value!r}")
    return int(value[0]), int(value[1])


def _bool(value: Any) -> bool:
    if not isinstance(value, bool):
        raise ValueError(f"expected a boolean, got {value!r}")
    return value
