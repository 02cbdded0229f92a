class SmacofError(Exception):
    """Base class for all errors raised by the services"""


class MDSDataError(SmacofError, ValueError):
    """Malformed dissimilarity input or an invalid MDS data structure"""


class ReducibleWeightsError(MDSDataError):
    """The positive-weight graph on the objects is not connected"""

    def __init__(self, message: str, components=None):
        super().__init__(message)
        self.components = components or []


class EngineError(SmacofError, RuntimeError):
    """Failure inside an engine run"""


class EigenConvergenceError(EngineError):
    pass


class DegenerateTransformError(EngineError):
    pass


class PlotError(SmacofError, ValueError):
    pass
