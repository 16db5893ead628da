"""Shared domain types: concept/class reference table, epoch-age mapping,
stimulus identifiers."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .errors import FormatError, IndexOutOfRange, InvalidEpoch, InvalidLevel


class ConceptClass(enum.Enum):
    TOPOLOGY = "Topology"
    EUCLIDEAN_GEOMETRY = "EuclideanGeometry"
    GEOMETRICAL_FIGURES = "GeometricalFigures"
    SYMMETRICAL_FIGURES = "SymmetricalFigures"
    CHIRAL_FIGURES = "ChiralFigures"
    METRIC_PROPERTIES = "MetricProperties"
    GEOMETRICAL_TRANSFORMATIONS = "GeometricalTransformations"


_TOP = ConceptClass.TOPOLOGY
_EUC = ConceptClass.EUCLIDEAN_GEOMETRY
_FIG = ConceptClass.GEOMETRICAL_FIGURES
_SYM = ConceptClass.SYMMETRICAL_FIGURES
_CHI = ConceptClass.CHIRAL_FIGURES
_MET = ConceptClass.METRIC_PROPERTIES
_TRA = ConceptClass.GEOMETRICAL_TRANSFORMATIONS

# Two training items precede the scored battery and are never scored.
TRAINING_CONCEPTS = ("Color", "Orientation")

# The 43 scored concepts in battery order. Duplicate labels (e.g. the two
# "Right angle" rows) are distinct concepts, distinguished by index only.
_SCORED = (
    ("Holes", _TOP),
    ("Inside", _TOP),
    ("Closure", _TOP),
    ("Connectedness", _TOP),
    ("Alignment of points in lines", _EUC),
    ("Curve", _EUC),
    ("Convex shape", _FIG),
    ("Straight line", _EUC),
    ("Alignment of points in lines", _EUC),
    ("Quadilateral", _FIG),
    ("Right angled triangle", _FIG),
    ("Right angle", _EUC),
    ("Right angle", _EUC),
    ("Distance", _MET),
    ("Circle", _FIG),
    ("Center of circle", _MET),
    ("Middle of segment", _MET),
    ("Equilateral triangle", _FIG),
    ("Fixed proportion", _MET),
    ("Center of quadilateral", _MET),
    ("Square", _FIG),
    ("Rectangle", _FIG),
    ("Parallelogram", _FIG),
    ("Trapezoid", _FIG),
    ("Vertical symmetry", _TRA),
    ("Vertical axis", _SYM),
    ("Horizontal axis", _SYM),
    ("Oblique axis", _SYM),
    ("Translation", _TRA),
    ("Point symmetry", _TRA),
    ("Horizontal symmetry", _TRA),
    ("Rotation", _TRA),
    ("Oblique symmetry", _TRA),
    ("Homothecy (fixed orientation)", _TRA),
    ("Parallel lines", _EUC),
    ("Oblique axis", _CHI),
    ("Homothecy (fixed size)", _TRA),
    ("Secant lines", _EUC),
    ("Vertical axis", _CHI),
    ("Vertical axis", _CHI),
    ("Equidistance", _MET),
    ("Oblique axis", _CHI),
    ("Increasing distance", _MET),
)


@dataclass(frozen=True)
class ConceptTable:
    """Ordered (index, label, class) table for the 43 scored concepts."""

    entries: tuple = tuple(
        (i + 1, label, cls) for i, (label, cls) in enumerate(_SCORED)
    )
    training: tuple = TRAINING_CONCEPTS

    def class_of(self, concept_index: int) -> ConceptClass:
        if not 1 <= concept_index <= len(self.entries):
            raise IndexOutOfRange(
                f"concept index {concept_index} outside 1..{len(self.entries)}"
            )
        return self.entries[concept_index - 1][2]

    def label_of(self, concept_index: int) -> str:
        if not 1 <= concept_index <= len(self.entries):
            raise IndexOutOfRange(
                f"concept index {concept_index} outside 1..{len(self.entries)}"
            )
        return self.entries[concept_index - 1][1]

    def indices_of(self, cls: ConceptClass) -> tuple:
        return tuple(i for i, _, c in self.entries if c is cls)

    def to_tsv(self) -> str:
        lines = [f"{i}\t{label}\t{cls.value}" for i, label, cls in self.entries]
        return "\n".join(lines) + "\n"


CONCEPT_TABLE = ConceptTable()


def class_of(concept_index: int) -> ConceptClass:
    """Class of a scored concept (index 1..43)."""
    return CONCEPT_TABLE.class_of(concept_index)


@dataclass(frozen=True)
class EpochAgeMap:
    """Linear mapping between training epochs and ages in years."""

    epochs_per_year: int = 2
    base_age_years: float = 5.0

    def age_of(self, epoch: int) -> float:
        if epoch < 1:
            raise InvalidEpoch(f"epoch must be >= 1, got {epoch}")
        return self.base_age_years + epoch / self.epochs_per_year

    def epoch_of(self, age: float) -> float:
        return self.epochs_per_year * (age - self.base_age_years)


DEFAULT_EPOCH_AGE_MAP = EpochAgeMap()


def epoch_to_age(epoch: int, mapping: EpochAgeMap = DEFAULT_EPOCH_AGE_MAP) -> float:
    return mapping.age_of(epoch)


_STIMULUS_ID_RE = re.compile(r"^s([1-6])-n([1-9])-l([1-5]|x)-r(\d+)$")


@dataclass(frozen=True, order=True)
class StimulusId:
    """Identifier of one generated stimulus: `s{set}-n{numerosity}-l{level|x}-r{replicate}`."""

    set: int
    numerosity: int
    level: int | None = None
    replicate: int = 0

    def __post_init__(self):
        if not 1 <= self.set <= 6:
            raise FormatError(f"set must be 1..6, got {self.set}")
        if not 1 <= self.numerosity <= 9:
            raise FormatError(f"numerosity must be 1..9, got {self.numerosity}")
        if self.level is not None and not 1 <= self.level <= 5:
            raise InvalidLevel(f"level must be 1..5 or None, got {self.level}")
        if self.replicate < 0:
            raise FormatError(f"replicate must be >= 0, got {self.replicate}")

    def __str__(self) -> str:
        lvl = "x" if self.level is None else str(self.level)
        return f"s{self.set}-n{self.numerosity}-l{lvl}-r{self.replicate}"

    @classmethod
    def parse(cls, text: str) -> "StimulusId":
        m = _STIMULUS_ID_RE.match(text)
        if m is None:
            raise FormatError(f"not a stimulus id: {text!r}")
        level = None if m.group(3) == "x" else int(m.group(3))
        return cls(int(m.group(1)), int(m.group(2)), level, int(m.group(4)))
