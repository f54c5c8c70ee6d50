"""Exception hierarchy shared by every module of the lab."""


class LabError(Exception):
    """Base class for all horolab errors."""


class ResourceLimitError(LabError):
    pass


class UnknownVertexError(LabError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class OutOfBallError(LabError):
    pass


class UncertifiedRegionError(LabError):
    pass


class NotLoxodromicError(LabError):
    pass


class VerificationFailure(LabError):
    """A certificate could not be produced; ``witness`` carries the evidence."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NonConvergenceError(LabError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InconclusiveError(LabError):
    pass


class MismatchedBallError(LabError):
    pass


class FixedClassError(LabError):
    pass


class SameMemberError(LabError):
    pass


class PreconditionError(LabError):
    pass


class UnknownCosetError(LabError):
    pass


class BoundedConjugatorError(LabError):
    pass


class SearchExhaustedError(LabError):
    pass


class RelationFound(LabError):
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class FixedPointsCollideError(LabError):
    pass


class ConfigError(LabError):
    def __init__(self, message, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)
