"""Exception hierarchy.  Every error raised by the package derives from ``CauditError``."""


class CauditError(Exception):
    pass


class ModelError(CauditError):
    """Malformed or invalid causal model."""


class CycleDetected(ModelError):
    pass


class MissingEquation(ModelError):
    pass


class NonTotalTable(ModelError):
    pass


class DomainMismatch(ModelError):
    pass


class IncompleteBackground(ModelError):
    pass


class InterventionOnBackground(ModelError):
    pass


class CapacityExceeded(ModelError):
    """Domain, variable or world count above the configured enumeration caps."""


class InvalidDistribution(ModelError):
    pass


class UnknownVariable(CauditError):
    pass


class InconsistentContext(CauditError):
    """Conditioning on an event of probability zero."""


class FrameError(CauditError):
    """Model does not have the shape required by an analysis frame."""


class RandomnessNotFresh(CauditError):
    pass


class DegenerateSensitive(CauditError):
    pass


class InvalidMetric(CauditError):
    pass


class PreconditionViolated(CauditError):
    pass


class NoDisclosure(PreconditionViolated):
    pass


class InvalidParameter(CauditError):
    pass


class InvalidPrior(InvalidParameter):
    pass


class InvalidConfig(CauditError):
    pass


class ParseError(CauditError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}{message}")
