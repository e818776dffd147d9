"""Exception hierarchy. Each CLI exit code maps to one branch."""


class RlzapError(Exception):
    """Base class for every error raised by rlzap."""


class InvalidInputError(RlzapError, ValueError):
    """Bad arguments or sequences handed to the library."""


class IngestionError(InvalidInputError):
    """A dataset file could not be read as the requested kind."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (at byte offset {offset})")
        self.offset = offset


class RangeError(RlzapError, IndexError):
    """Position or index outside the valid range."""


class EncodingError(RlzapError):
    """A parsing cannot be encoded (delta or literal-count overflow)."""


class CorruptParseError(RlzapError):
    """A parsing does not decode against the given reference."""


class ReferenceMismatchError(RlzapError):
    """The reference does not match the one an archive was built against."""


class FormatError(RlzapError):
    """Base class for container parse errors."""


class BadMagicError(FormatError):
    pass


class UnsupportedVersionError(FormatError):
    pass


class TruncatedError(FormatError):
    pass


class CorruptArchiveError(FormatError):
    """Checksum failure or structurally inconsistent contents."""
