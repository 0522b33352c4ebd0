class ExtractorError(Exception):
    """Base class for extraction failures."""


class DecodeError(ExtractorError):
    """Video could not be opened or produced no frames."""


class EncoderLoadError(ExtractorError):
    """The requested embedding model could not be loaded."""
