"""Engine error taxonomy; all are EngineError so the service can catch one type."""


class EngineError(Exception):
    pass


class UnknownRule(EngineError):
    pass


class ArityViolation(EngineError):
    pass


class InfeasiblePopulation(EngineError):
    pass


class NothingToRevert(EngineError):
    pass


class SpaceOnSurfaceSkeleton(EngineError):
    pass


class IndexOutOfRange(EngineError):
    pass


class NoResidueData(EngineError):
    pass


class NoSuchInstance(EngineError):
    pass


class InvalidParameter(EngineError):
    pass


class VersionMismatch(EngineError):
    pass


class MissingCatalogEntry(EngineError):
    pass
