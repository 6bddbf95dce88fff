"""Exception hierarchy shared by all modules."""


class QuasipinError(Exception):
    """Base class for every error raised by this package."""


class UnknownSetting(QuasipinError):
    pass


class MalformedEntry(QuasipinError):
    pass


class InvalidPair(QuasipinError):
    pass


class SpectrumError(QuasipinError):
    """Raised when a raw occupation vector is not a valid spectrum."""


class WrongLength(SpectrumError):
    pass


class NotOrdered(SpectrumError):
    pass


class NotNormalized(SpectrumError):
    pass


class OutOfRange(SpectrumError):
    pass


class SettingMismatch(QuasipinError):
    pass


class NotInPolytope(QuasipinError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class DegenerateConstraint(QuasipinError):
    pass


class BothZero(InvalidPair):
    pass


class NonEmptyClass(QuasipinError):
    pass


class DegeneratePair(QuasipinError):
    """The intersection of the polytope with a simplex facet is empty or excluded."""


class ImpossibleActiveSpace(QuasipinError):
    pass


class NotAligned(QuasipinError):
    pass


class PairNotInClass(QuasipinError):
    pass


class StateError(QuasipinError):
    """Malformed or unnormalized configuration-interaction state."""


class ExcessiveTruncationError(QuasipinError):
    pass


class InvalidSlice(QuasipinError):
    pass


class IncompatibleSettings(QuasipinError):
    pass


class NoFeasiblePlan(QuasipinError):
    pass


class UnknownConstraint(QuasipinError):
    pass


class ZeroDenominatorEverywhere(QuasipinError):
    """The facet distance vanishes on the whole branch of a ratio program."""
