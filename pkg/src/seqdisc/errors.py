"""Exception hierarchy shared by all modules."""


class SeqDiscError(Exception):
    """Base class for every error raised by this package."""


class InvalidOperator(SeqDiscError, ValueError):
    pass


class DimensionError(SeqDiscError, ValueError):
    pass


class InvalidDensityOperator(SeqDiscError, ValueError):
    pass


class InvalidBlochVector(SeqDiscError, ValueError):
    pass


class InvalidEnsemble(SeqDiscError, ValueError):
    pass


class InvalidInstrument(SeqDiscError, ValueError):
    pass


class IncompleteProjectors(InvalidInstrument):
    pass


class InvalidRealization(SeqDiscError, ValueError):
    pass


class NotPureDilation(InvalidRealization):
    pass


class InvalidChannel(SeqDiscError, ValueError):
    pass


class InvalidParameter(SeqDiscError, ValueError):
    pass


class WrongArity(SeqDiscError, ValueError):
    """Operation defined only for a specific number of states."""


class DegenerateSpectrum(SeqDiscError, ValueError):
    """One of the Helstrom projectors vanishes."""


class ConditionNotSatisfied(SeqDiscError, ValueError):
    """Kraus operators fail ``K^dag P K = K^dag K``."""


class ZeroProbabilityOutcome(SeqDiscError, ArithmeticError):
    """A posterior state was requested for an outcome of (numerically) zero probability."""


class ConfigError(SeqDiscError, ValueError):
    pass
