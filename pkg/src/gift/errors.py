"""Exception types shared across the package."""


class GiftError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(GiftError, ValueError):
    """An argument violates a documented precondition."""


class ZeroNormError(InvalidInputError):
    """A vector or matrix row that must be nonzero has zero norm.

    ``index`` is the offending row index, or None for a standalone vector.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class EmbeddingFormatError(GiftError, ValueError):
    """Base class for embedding-file parse failures."""


class BadMagicError(EmbeddingFormatError):
    """File does not start with the expected array-format magic bytes."""


class UnsupportedDtypeError(EmbeddingFormatError):
    """Header declares a dtype or memory order this reader does not accept."""


class ShapeError(EmbeddingFormatError):
    """Declared shape is not a 1-D vector or 2-D matrix, or is inconsistent."""


class TruncatedPayloadError(EmbeddingFormatError):
    """Payload is shorter than the header-declared shape requires."""


class SweepError(GiftError):
    """A benchmark sweep cell failed; message carries the cell coordinates."""
