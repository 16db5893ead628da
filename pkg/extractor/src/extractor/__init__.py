"""Checkpoint-to-embedding-store extraction pipeline.

Submodules: preprocess (deterministic eval-path image pipeline), checkpoint
(ResNet-50 state-dict loading), runner (batch extraction + CLI), store_format
(embedding-store directory writer).
"""

from .errors import CheckpointError, DecodeError, ExtractorError, ManifestError
from .preprocess import DEFAULT_SPEC, PreprocessSpec, preprocess
from .runner import extract

__version__ = "0.1.0"

__all__ = [
    "CheckpointError",
    "DecodeError",
    "DEFAULT_SPEC",
    "ExtractorError",
    "ManifestError",
    "PreprocessSpec",
    "extract",
    "preprocess",
    "__version__",
]
