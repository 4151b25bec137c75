"""Exception types raised by the library."""


class CoarseningError(Exception):
    """Base class for every library error."""


class IsolatedNode(CoarseningError, ValueError):
    def __init__(self, node: int):
        super().__init__(f"node {node} has zero degree")
        self.node = node


class BadWeight(CoarseningError, ValueError):
    pass


class BadIndex(CoarseningError, IndexError):
    pass


class SizeMismatch(CoarseningError, ValueError):
    pass


class EmptySupernode(CoarseningError, ValueError):
    def __init__(self, supernode: int):
        super().__init__(f"supernode {supernode} has no member nodes")
        self.supernode = supernode


class NotSymmetric(CoarseningError, ValueError):
    pass


class NoConvergence(CoarseningError, ArithmeticError):
    pass


class TargetTooSmall(CoarseningError, ValueError):
    pass


class NoCandidates(CoarseningError, RuntimeError):
    pass


class BadConfig(CoarseningError, ValueError):
    pass


class DegenerateSample(CoarseningError, RuntimeError):
    pass


class FormatError(CoarseningError, ValueError):
    """Malformed edge-list or partition file."""
