"""Error types for the extraction pipeline."""


class ExtractorError(Exception):
    """Base class; `code` feeds the CLI's machine-readable ERR lines."""

    code = "error"


class DecodeError(ExtractorError):
    """Input image cannot be decoded."""

    code = "decode_error"


class CheckpointError(ExtractorError):
    """Checkpoint missing, unreadable, or incompatible with the architecture."""

    code = "checkpoint_error"


class ManifestError(ExtractorError):
    """Stimulus manifest rows are malformed or violate store rules."""

    code = "manifest_error"
