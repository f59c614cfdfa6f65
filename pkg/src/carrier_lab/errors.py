"""Exception hierarchy shared by all modules."""


class CarrierLabError(Exception):
    """Base class for every error raised by carrier_lab."""


class GraphError(CarrierLabError):
    pass


class DuplicatePosition(GraphError):
    def __init__(self, u, v):
        super().__init__(f"vertices {u} and {v} share a position")
        self.pair = (u, v)


class EdgeCrossing(GraphError):
    def __init__(self, e, f):
        super().__init__(f"edges {e} and {f} cross")
        self.pair = (e, f)


class Disconnected(GraphError):
    pass


class SingletonGraph(GraphError):
    pass


class SizeCapExceeded(GraphError):
    pass


class DegenerateConfiguration(GraphError):
    pass


class PackingError(CarrierLabError):
    pass


class NotATriangulation(PackingError):
    pass


class NoInteriorVertex(PackingError):
    pass


class MaxIterationsExceeded(PackingError):
    """Raised when the radius iteration stalls; ``result`` holds the best iterate."""

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


class BallEscapesCarrier(CarrierLabError):
    pass


class EigenSolverFailure(CarrierLabError):
    pass


class ArcMissesGraph(CarrierLabError):
    pass


class WalkError(CarrierLabError):
    pass


class IsolatedVertex(WalkError):
    pass


class AllWalksTruncated(WalkError):
    pass


class PotentialError(CarrierLabError):
    pass


class EmptyLiveSet(PotentialError):
    pass


class DisconnectedLiveSet(PotentialError):
    pass


class SolverFailure(PotentialError):
    pass


class ZeroDenominator(PotentialError):
    pass


class EmptyAnnulusSide(PotentialError):
    pass


class DomainViolation(PotentialError):
    pass


class PolesTooClose(PotentialError):
    pass


class FormatError(CarrierLabError):
    pass


class FormatVersionMismatch(FormatError):
    pass


class SchemaViolation(FormatError):
    pass


class MissingPositions(FormatError):
    pass


class ConfigParse(CarrierLabError):
    pass
