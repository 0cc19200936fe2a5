"""Exception hierarchy shared by every modem stage."""


class ModemError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidParameter(ModemError, ValueError):
    """A parameter record or argument violates its documented invariants."""


class NyquistViolation(InvalidParameter):
    pass


class InvalidDuration(InvalidParameter):
    pass


class EmptySignal(ModemError, ValueError):
    pass


class RateMismatch(ModemError, ValueError):
    pass


class SegmentTooLong(InvalidParameter):
    pass


class SignalTooShort(ModemError, ValueError):
    pass


class InvalidCutoff(InvalidParameter):
    pass


class InvalidOrder(InvalidParameter):
    pass


class FrequencyOutOfRange(InvalidParameter):
    pass


class MalformedWav(ModemError):
    pass


class UnsupportedFormat(ModemError):
    pass


class SampleOutOfRange(ModemError, ValueError):
    pass


class IoFailure(ModemError, OSError):
    pass


class OvermodulationError(ModemError, ValueError):
    pass


class DeviationExceedsNyquist(ModemError, ValueError):
    pass


class NonAsciiInput(ModemError, ValueError):
    pass


class FrameLengthNotByteAligned(ModemError, ValueError):
    pass


class EmptyFrame(ModemError, ValueError):
    pass


class NonIntegralSymbolLength(InvalidParameter):
    pass


class NoSampleAboveThreshold(ModemError):
    pass


class TruncationOutOfRange(ModemError):
    pass


class FrameLengthMismatch(ModemError, ValueError):
    pass
