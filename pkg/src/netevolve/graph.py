"""Connectivity over the working part of a network."""

from __future__ import annotations

from .model import Network


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.size = {x: 1 for x in self.parent}

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


def working_components(net: Network) -> dict[int, int]:
    """Map every node id to a component label.

    Only working nodes and working links carry connectivity; a failed node
    gets the label -1 and is connected to nothing, not even itself.
    """
    alive = [n.id for n in net.nodes.values() if n.working]
    uf = UnionFind(alive)
    for link in net.links.values():
        a, b = link.endpoints
        if link.working and a in uf.parent and b in uf.parent:
            uf.union(a, b)
    labels = {node_id: -1 for node_id in net.nodes}
    for node_id in alive:
        labels[node_id] = uf.find(node_id)
    return labels
