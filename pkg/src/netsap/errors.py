"""Exception types shared across the package."""


class NetsapError(Exception):
    """Base class for every error raised by netsap."""


class ModelError(NetsapError):
    """A plant model violates one of its structural invariants."""


class DuplicateTransition(ModelError):
    pass


class ZeroOccurringTime(ModelError):
    pass


class UnknownStateOrEvent(ModelError):
    pass


class NoInitialState(ModelError):
    pass


class OverlappingFaultClasses(ModelError):
    pass


class WordNotInLanguage(NetsapError):
    pass


class StateExplosion(NetsapError):
    def __init__(self, limit):
        super().__init__(f"state cap of {limit} states exceeded")
        self.limit = limit


class SpecUnsatisfiableEvenFullyActivated(NetsapError):
    """Some required pair is confusable even with every sensor on."""


class HorizonTooSmallWarning(UserWarning):
    """Bounded enumeration stopped before exhausting the language."""
