"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map numerical failures
to distinct process exit statuses without a lookup table of its own.
"""

from __future__ import annotations


class NetGaussError(Exception):
    exit_code = 10


# -- input / parsing ---------------------------------------------------------

class InputError(NetGaussError):
    exit_code = 3


class ParseError(NetGaussError):
    exit_code = 4

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.line = line
        self.path = path


class LabelMissing(ParseError):
    pass


# -- graph validation --------------------------------------------------------

class GraphValidationError(NetGaussError):
    exit_code = 5


class AsymmetricMatrix(GraphValidationError):
    def __init__(self, i: int, j: int, wij: float, wji: float):
        super().__init__(f"weights[{i}][{j}]={wij!r} != weights[{j}][{i}]={wji!r}")
        self.indices = (i, j)


class NegativeWeight(GraphValidationError):
    def __init__(self, i: int, j: int, w: float):
        super().__init__(f"negative weight {w!r} at ({i}, {j})")
        self.indices = (i, j)


class SelfLoop(GraphValidationError):
    def __init__(self, i: int, w: float):
        super().__init__(f"self-loop of weight {w!r} at node {i}")
        self.node = i


class EmptyGraph(GraphValidationError):
    pass


class NodeOutOfRange(GraphValidationError):
    def __init__(self, node: int, n: int):
        super().__init__(f"node {node} out of range for graph with {n} nodes")
        self.node = node


class NotConnected(GraphValidationError):
    exit_code = 6


# the design notes call this DisconnectedGraph at the representation boundary
DisconnectedGraph = NotConnected


class BadSpec(NetGaussError):
    exit_code = 2


class BadSize(BadSpec):
    pass


class BadTarget(BadSpec):
    pass


class TooSmall(BadSpec):
    pass


# -- numerical ---------------------------------------------------------------

class NumericalError(NetGaussError):
    exit_code = 7


class DimensionMismatch(NumericalError):
    exit_code = 8


class ZeroEnergy(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class SingularBlock(NumericalError):
    pass


class SingularGram(NumericalError):
    pass


class TooFewSamples(NumericalError):
    pass


class DegenerateResiduals(NumericalError):
    exit_code = 9


class DisconnectedResult(NumericalError):
    pass


class DegenerateSplit(NumericalError):
    pass


class TooFewEligibleNodes(NetGaussError):
    exit_code = 11


class DegenerateJoint(RuntimeWarning):
    """Joint sample covariance is singular; dependent quantities are +inf."""


EXIT_CODES = {
    0: "success",
    2: "usage error or invalid model/evolution specification",
    3: "input/output error (missing or unreadable file)",
    4: "parse error in an input file",
    5: "graph validation error (asymmetric, negative, self-loop, empty, bad node)",
    6: "graph is not connected",
    7: "numerical failure (not positive definite, singular block, too few samples, ...)",
    8: "dimension mismatch between graphs",
    9: "degenerate residuals (source fully determines target)",
    10: "other library error",
    11: "too few eligible nodes",
}
