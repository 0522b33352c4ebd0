"""Video-to-embedding bridge for the keyframe selector.

Decodes frames at a fixed sampling rate, embeds them (and the query
text) with a dual image/text encoder, and writes the selector's
embedding file format plus a timestamp manifest.
"""

__version__ = "0.1.0"

from .extract import ExtractionJob, run_extraction
from .errors import DecodeError, EncoderLoadError, ExtractorError

__all__ = [
    "__version__",
    "ExtractionJob",
    "run_extraction",
    "ExtractorError",
    "DecodeError",
    "EncoderLoadError",
]
