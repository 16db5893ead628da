"""Odd-one-out decision rule and per-class accuracy scoring.

Each trial shows six images: five embody a geometric concept and one does
not.  The model's choice is the image with the lowest mean cosine similarity
to the other five; chance performance is 1/6.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .core import CONCEPT_TABLE, ConceptTable
from .errors import (
    DimensionMismatch,
    DuplicateConcept,
    FormatError,
    IndexOutOfRange,
)
from .stats import cosine_matrix
from .store import EmbeddingStore

CHANCE = 1.0 / 6.0

_GT_ID = re.compile(r"^gt-c(\d{2})-i([0-5])$")


@dataclass(frozen=True)
class Trial:
    concept_index: int
    image_vectors: np.ndarray  # (6, dim)
    answer_index: int

    def __post_init__(self):
        if not 1 <= self.concept_index <= 43:
            raise IndexOutOfRange(
                f"concept index {self.concept_index} out of range 1..43"
            )
        if not 0 <= self.answer_index <= 5:
            raise IndexOutOfRange(
                f"answer index {self.answer_index} out of range 0..5"
            )
        vectors = np.asarray(self.image_vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != 6:
            raise DimensionMismatch(
                f"a trial needs 6 equal-length vectors, got shape {vectors.shape}"
            )
        object.__setattr__(self, "image_vectors", vectors)


@dataclass(frozen=True)
class ClassAccuracyReport:
    per_concept: tuple  # ((concept_index, correct), ...)
    per_class: dict  # ConceptClass -> accuracy
    overall: float
    complete: bool
    chance: float = CHANCE


def choose_odd(vectors) -> int:
    """Index of the vector with the lowest mean cosine similarity to the rest.

    Ties break toward the lowest index.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != 6:
        raise DimensionMismatch(f"expected 6 vectors, got shape {x.shape}")
    sim = cosine_matrix(x)
    mean_to_others = (sim.sum(axis=1) - np.diag(sim)) / 5.0
    return int(np.argmin(mean_to_others))


def score_concepts(trials, table: ConceptTable = CONCEPT_TABLE) -> ClassAccuracyReport:
    """Score one trial per concept; accuracies are exact rational means."""
    seen = set()
    per_concept = []
    for trial in trials:
        if trial.concept_index in seen:
            raise DuplicateConcept(
                f"more than one trial for concept {trial.concept_index}"
            )
        seen.add(trial.concept_index)
        correct = choose_odd(trial.image_vectors) == trial.answer_index
        per_concept.append((trial.concept_index, correct))
    if not per_concept:
        raise DuplicateConcept("no trials to score")
    per_concept.sort(key=lambda pair: pair[0])

    class_hits = {}
    class_totals = {}
    hits = 0
    for concept_index, correct in per_concept:
        cls = table.class_of(concept_index)
        class_totals[cls] = class_totals.get(cls, 0) + 1
        class_hits[cls] = class_hits.get(cls, 0) + int(correct)
        hits += int(correct)
    per_class = {
        cls: class_hits[cls] / class_totals[cls] for cls in class_totals
    }
    return ClassAccuracyReport(
        per_concept=tuple(per_concept),
        per_class=per_class,
        overall=hits / len(per_concept),
        complete=len(per_concept) == len(table.entries),
    )


def read_answer_key(path: str) -> dict:
    """Answer key TSV: concept_index<TAB>answer_index, one line per concept."""
    key = {}
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError(f"{path}:{lineno}: expected 2 columns")
        try:
            concept_index, answer_index = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from exc
        if concept_index in key:
            raise DuplicateConcept(f"{path}:{lineno}: repeated concept")
        key[concept_index] = answer_index
    return key


def trials_from_store(store: EmbeddingStore, answer_key: dict) -> list:
    """Assemble trials from a store indexed with ids gt-cNN-iK (K = 0..5)."""
    by_concept = {}
    for row, sid in enumerate(store.ids):
        match = _GT_ID.match(sid)
        if match is None:
            raise FormatError(f"stimulus id {sid!r} is not of the form gt-cNN-iK")
        concept_index = int(match.group(1))
        image_index = int(match.group(2))
        slots = by_concept.setdefault(concept_index, [None] * 6)
        if slots[image_index] is not None:
            raise DuplicateConcept(
                f"image {image_index} of concept {concept_index} appears twice"
            )
        slots[image_index] = row
    trials = []
    for concept_index in sorted(by_concept):
        slots = by_concept[concept_index]
        if any(row is None for row in slots):
            raise FormatError(
                f"concept {concept_index} is missing images "
                f"{[i for i, row in enumerate(slots) if row is None]}"
            )
        if concept_index not in answer_key:
            raise FormatError(f"answer key has no entry for concept {concept_index}")
        vectors = store.vectors[np.array(slots), :].astype(np.float64)
        trials.append(
            Trial(
                concept_index=concept_index,
                image_vectors=vectors,
                answer_index=answer_key[concept_index],
            )
        )
    return trials
