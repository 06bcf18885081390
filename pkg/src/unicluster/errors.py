"""Exception hierarchy shared by every algorithm module."""


class ClusteringError(Exception):
    """Base class; the CLI maps any subclass to exit code 4."""


class NotPositiveDefinite(ClusteringError):
    pass


class ConvergenceFailure(ClusteringError):
    pass


class DegenerateRow(ClusteringError):
    """A point has zero probability under every mixture component."""


class EmptyCluster(ClusteringError):
    pass


class ZeroVolume(ClusteringError):
    """A partition block has no incident edge weight."""


class IsolatedNode(ClusteringError):
    pass


class EmptyNeighborhood(ClusteringError):
    pass


class LengthMismatch(ClusteringError, ValueError):
    pass
