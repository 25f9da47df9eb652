"""Exception hierarchy.

Every domain failure derives from :class:`FlatSkewError`; malformed input
files raise :class:`SchemaError` instead, which the CLI maps to exit code 2.
"""


class FlatSkewError(Exception):
    """Base class for domain errors (CLI exit code 1)."""

    def to_json(self):
        return {"error": type(self).__name__, "message": str(self)}


class SchemaError(ValueError):
    """Input does not match the documented file or flag format."""


class NotAPermutation(FlatSkewError):
    pass


class Disconnected(FlatSkewError):
    pass


class MarkedPointOnSingularity(FlatSkewError):
    pass


class StartAtSingularity(FlatSkewError):
    pass


class TransversalHitsSingularity(FlatSkewError):
    pass


class DegenerateStep(FlatSkewError):
    pass


class NoValidTransversal(FlatSkewError):
    pass


class LiftHitsSingularity(FlatSkewError):
    def __init__(self, message, cut_index=None):
        super().__init__(message)
        self.cut_index = cut_index


class TrajectoryHitsSingularity(FlatSkewError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class TrajectoryHitsCutEndpoint(FlatSkewError):
    pass


class DirectionParallelToCut(FlatSkewError):
    pass


class CutEndpointOnTransversalOrbit(FlatSkewError):
    def __init__(self, message, breakpoint=None):
        super().__init__(message)
        self.breakpoint = breakpoint


class NoCandidates(FlatSkewError):
    pass


class NoWitnessFound(FlatSkewError):
    pass
