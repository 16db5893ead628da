"""Exception types shared across the toolkit.

Every error carries a short machine-readable ``code`` used by the CLI's
``ERR<TAB>code<TAB>detail`` lines.
"""


class DevAlignError(Exception):
    code = "error"


class IndexOutOfRange(DevAlignError):
    code = "index_out_of_range"


class InvalidEpoch(DevAlignError):
    code = "invalid_epoch"


class PlacementFailure(DevAlignError):
    code = "placement_failure"


class InvalidLevel(DevAlignError):
    code = "invalid_level"


class UnsupportedSet(DevAlignError):
    code = "unsupported_set"


class IoFailure(DevAlignError):
    code = "io_failure"


class FormatError(DevAlignError):
    code = "format_error"


class ZeroVector(DevAlignError):
    code = "zero_vector"


class NonFinite(DevAlignError):
    code = "non_finite"


class DimensionMismatch(DevAlignError):
    code = "dimension_mismatch"


class DuplicateConcept(DevAlignError):
    code = "duplicate_concept"


class MissingNumerosity(DevAlignError):
    code = "missing_numerosity"


class DegenerateVariance(DevAlignError):
    code = "degenerate_variance"


class FitFailure(DevAlignError):
    code = "fit_failure"


class InconsistentStores(DevAlignError):
    code = "inconsistent_stores"


class DegenerateMatrix(DevAlignError):
    code = "degenerate_matrix"


class InsufficientOverlap(DevAlignError):
    code = "insufficient_overlap"


class LengthMismatch(DevAlignError):
    code = "length_mismatch"
