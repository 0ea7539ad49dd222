"""Exception hierarchy shared by every netevolve module."""


class NetEvolveError(Exception):
    """Base class for all library errors."""


class PlacementInfeasible(NetEvolveError):
    """No free grid position respects the minimum spacing."""


class ParseError(NetEvolveError):
    """A snapshot document could not be parsed."""


class InvariantViolation(NetEvolveError):
    """A network breaks one of the model invariants."""


class NoServers(NetEvolveError):
    pass


class NoClients(NetEvolveError):
    pass


class Saturated(NetEvolveError):
    """Every legal node pair already has a link."""


class NoLinks(NetEvolveError):
    pass


class TooFewNodes(NetEvolveError):
    pass


class TooLarge(NetEvolveError):
    """Network exceeds the exact-enumeration oracle bound."""


class PopulationTooSmall(NetEvolveError):
    pass


class WindowOutOfRange(NetEvolveError):
    pass


class ConfigError(NetEvolveError):
    def __init__(self, key: str, reason: str):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason
