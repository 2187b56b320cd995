"""Exception hierarchy shared by every stseq module."""


class StsError(Exception):
    """Base class for all stseq errors."""


class BadOrder(StsError):
    pass


class NotAnSTS(StsError):
    pass


class OutOfRange(StsError):
    pass


class SamePoint(StsError):
    pass


class OrbitCollision(StsError):
    pass


class UnknownId(StsError):
    pass


class MissingDataFile(StsError):
    pass


class BadChar(StsError):
    pass


class NotAPermutation(StsError):
    pass


class TooLarge(StsError):
    pass


class ParseError(StsError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ImproperColouring(StsError):
    pass


class PreconditionFailed(StsError):
    pass


class ClassTooSmall(PreconditionFailed):
    pass


class NotThreeChromatic(PreconditionFailed):
    pass


class UnhandledProfile(StsError):
    pass


class StuckChoice(StsError):
    """A greedy step found no admissible point (the counting argument says this cannot happen)."""


class VerificationFailed(StsError):
    """A construction produced a sequencing that does not verify; always a bug."""


class LedgerCorrupt(StsError):
    pass
