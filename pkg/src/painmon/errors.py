"""Exception taxonomy shared across the package.

Data/format problems raise subclasses of :class:`PainmonError`; the CLI maps
them to exit code 2. Programming errors (bad arguments from our own code)
stay plain ValueError/TypeError.
"""


class PainmonError(Exception):
    """Base class for all recoverable pipeline errors."""


# --- recording bundle parsing ---------------------------------------------

class MissingSection(PainmonError):
    pass


class MissingRequiredKey(PainmonError):
    def __init__(self, key: str):
        super().__init__(f"required header key missing: {key}")
        self.key = key


class UnsupportedBinaryFormat(PainmonError):
    pass


class MalformedMarkerLine(PainmonError):
    def __init__(self, lineno: int, line: str):
        super().__init__(f"malformed marker entry at line {lineno}: {line!r}")
        self.lineno = lineno


class TruncatedData(PainmonError):
    def __init__(self, trailing_bytes: int):
        super().__init__(f"binary payload truncated: {trailing_bytes} trailing bytes")
        self.trailing_bytes = trailing_bytes


class OrientationUnsupported(PainmonError):
    pass


class CompanionFileMissing(PainmonError):
    pass


class NoStimulusMarkers(PainmonError):
    pass


# --- preprocessing ----------------------------------------------------------

class SignalTooShort(PainmonError):
    pass


class TooFewChannels(PainmonError):
    pass


class AllEpochsRejected(PainmonError):
    pass


class InsufficientEpochs(PainmonError):
    pass


# --- feature extraction -----------------------------------------------------

class BandAboveNyquist(PainmonError):
    pass


class TooFewSegments(PainmonError):
    pass


class ManifestMismatch(PainmonError):
    pass


class NotFitted(PainmonError):
    pass


# --- models -----------------------------------------------------------------

class SingleClassData(PainmonError):
    pass


class NonFiniteFeature(PainmonError):
    pass


class VersionMismatch(PainmonError):
    pass


class CorruptPayload(PainmonError):
    pass


# --- evaluation -------------------------------------------------------------

class TooFewSubjects(PainmonError):
    pass


class TooFewPredictions(PainmonError):
    pass


# --- realtime ---------------------------------------------------------------

class ChannelMismatch(PainmonError):
    pass


class ModelMissing(PainmonError):
    pass


class SourceClosed(PainmonError):
    """Raised internally when a stream source reaches end of data."""


class CacheFormatError(PainmonError):
    """Epoch cache / feature matrix file failed structural validation."""
