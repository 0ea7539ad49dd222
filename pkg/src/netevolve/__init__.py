"""Evolve client-server network topologies that trade pleiotropy against redundancy."""

from .dynamics import EnvParams, UtilizationMode, environment_step, maintain, utilization
from .ga import GaConfig, GenerationRecord, Strategy, evolve, run
from .metrics import cost, evaluate, exact_reliability, fitness, pleiotropy, redundancy, reliability
from .model import Link, LinkKind, Network, Node, NodeKind, new_network
from .snapshot import deserialize, serialize

__version__ = "0.1.0"

__all__ = [
    "EnvParams", "UtilizationMode", "environment_step", "maintain", "utilization",
    "GaConfig", "GenerationRecord", "Strategy", "evolve", "run",
    "cost", "evaluate", "exact_reliability", "fitness", "pleiotropy", "redundancy", "reliability",
    "Link", "LinkKind", "Network", "Node", "NodeKind", "new_network",
    "deserialize", "serialize",
]
