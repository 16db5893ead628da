"""Developmental-alignment analyses for vision-model embeddings.

Submodules:

* core        -- concept table, epoch/age mapping, stimulus identifiers
* stimgen     -- controlled numerosity raster generation (sets 1-5)
* store       -- bit-exact embedding exchange format
* oddoneout   -- odd-one-out rule and per-class accuracy
* numeffects  -- distance/size/ratio effects over numerosity pairs
* numline     -- 1D MDS number-line reconstruction
* growth      -- power fits and human/model trajectory alignment
* oracle      -- synthetic stores with known number-line structure
* reportio    -- deterministic JSON/CSV report emission
* cli         -- `devalign` command-line entry point
"""

from .core import (
    CONCEPT_TABLE,
    DEFAULT_EPOCH_AGE_MAP,
    ConceptClass,
    ConceptTable,
    EpochAgeMap,
    StimulusId,
    class_of,
    epoch_to_age,
)
from .errors import DevAlignError
from .store import EmbeddingStore, StoreManifest, new_store, read_store, write_store

__version__ = "0.1.0"

__all__ = [
    "CONCEPT_TABLE",
    "DEFAULT_EPOCH_AGE_MAP",
    "ConceptClass",
    "ConceptTable",
    "DevAlignError",
    "EmbeddingStore",
    "EpochAgeMap",
    "StimulusId",
    "StoreManifest",
    "__version__",
    "class_of",
    "epoch_to_age",
    "new_store",
    "read_store",
    "write_store",
]
