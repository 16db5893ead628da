"""Bit-exact on-disk exchange format for per-stimulus embedding vectors.

A store directory holds three files:

* ``manifest.txt``  -- ``key=value`` lines, UTF-8, LF-terminated, fixed key order
* ``index.tsv``     -- one stimulus id per line, row order matches the payload
* ``embeddings.bin`` -- count x dim float32, little-endian, row-major
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, IoFailure, NonFinite, ZeroVector

MANIFEST_KEYS = (
    "format_version",
    "model_id",
    "epoch",
    "layer",
    "dim",
    "count",
    "dtype",
    "order",
)


@dataclass(frozen=True)
class StoreManifest:
    model_id: str
    epoch: int
    layer: str
    dim: int
    count: int
    format_version: int = 1
    dtype: str = "f32le"
    order: str = "row_major"


@dataclass(frozen=True)
class EmbeddingStore:
    manifest: StoreManifest
    ids: tuple
    vectors: np.ndarray  # (count, dim) float32, treated as read-only


def new_store(model_id: str, epoch: int, layer: str, ids, vectors) -> EmbeddingStore:
    """Build and validate a store from in-memory rows."""
    vectors = np.ascontiguousarray(vectors, dtype=np.float32)
    if vectors.ndim != 2:
        raise FormatError(f"vectors must be 2-D, got shape {vectors.shape}")
    manifest = StoreManifest(
        model_id=model_id,
        epoch=int(epoch),
        layer=layer,
        dim=int(vectors.shape[1]),
        count=int(vectors.shape[0]),
    )
    store = EmbeddingStore(manifest, tuple(str(i) for i in ids), vectors)
    validate_store(store)
    return store


def validate_store(store: EmbeddingStore) -> None:
    m = store.manifest
    if m.format_version != 1:
        raise FormatError(f"unsupported format_version {m.format_version}")
    if m.dtype != "f32le" or m.order != "row_major":
        raise FormatError(f"unsupported payload layout {m.dtype}/{m.order}")
    if m.dim < 1 or m.count < 1:
        raise FormatError(f"dim and count must be >= 1, got {m.dim}x{m.count}")
    if len(store.ids) != m.count:
        raise FormatError(
            f"index length {len(store.ids)} != manifest count {m.count}"
        )
    if store.vectors.shape != (m.count, m.dim):
        raise FormatError(
            f"payload shape {store.vectors.shape} != manifest {m.count}x{m.dim}"
        )
    seen = set()
    for sid in store.ids:
        if sid in seen:
            raise FormatError(f"duplicate stimulus id {sid!r}")
        seen.add(sid)
    finite = np.isfinite(store.vectors).all(axis=1)
    if not finite.all():
        row = int(np.argmin(finite))
        raise NonFinite(f"non-finite value in row for {store.ids[row]!r}")
    norms = np.linalg.norm(store.vectors.astype(np.float64), axis=1)
    if (norms == 0.0).any():
        row = int(np.argmax(norms == 0.0))
        raise ZeroVector(f"all-zero vector for {store.ids[row]!r}")


def _parse_manifest(path: str) -> StoreManifest:
    try:
        with open(path, "rb") as fh:
            raw = fh.read().decode("utf-8")
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    values = {}
    for lineno, line in enumerate(lines, start=1):
        if "=" not in line:
            raise FormatError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        if lineno <= len(MANIFEST_KEYS):
            expected = MANIFEST_KEYS[lineno - 1]
            if key != expected:
                raise FormatError(
                    f"{path}:{lineno}: expected key {expected!r}, got {key!r}"
                )
            values[key] = value
        # extra keys after the required block are tolerated (producer metadata)
    missing = [k for k in MANIFEST_KEYS if k not in values]
    if missing:
        raise FormatError(f"{path}: missing keys {missing}")
    try:
        return StoreManifest(
            format_version=int(values["format_version"]),
            model_id=values["model_id"],
            epoch=int(values["epoch"]),
            layer=values["layer"],
            dim=int(values["dim"]),
            count=int(values["count"]),
            dtype=values["dtype"],
            order=values["order"],
        )
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def read_store(directory: str) -> EmbeddingStore:
    """Load and fully validate a store directory."""
    man_path = os.path.join(directory, "manifest.txt")
    idx_path = os.path.join(directory, "index.tsv")
    bin_path = os.path.join(directory, "embeddings.bin")
    for p in (man_path, idx_path, bin_path):
        if not os.path.exists(p):
            raise FormatError(f"{p}: missing")
    manifest = _parse_manifest(man_path)

    with open(idx_path, "rb") as fh:
        idx_raw = fh.read().decode("utf-8")
    ids = idx_raw.split("\n")
    if ids and ids[-1] == "":
        ids.pop()
    for lineno, sid in enumerate(ids, start=1):
        if sid == "" or "\t" in sid:
            raise FormatError(f"{idx_path}:{lineno}: bad id {sid!r}")

    expected_bytes = 4 * manifest.dim * manifest.count
    actual_bytes = os.path.getsize(bin_path)
    if actual_bytes != expected_bytes:
        raise FormatError(
            f"{bin_path}: payload is {actual_bytes} bytes, manifest implies "
            f"{expected_bytes} ({manifest.count}x{manifest.dim} f32le)"
        )
    with open(bin_path, "rb") as fh:
        payload = fh.read()
    vectors = np.frombuffer(payload, dtype="<f4").reshape(manifest.count, manifest.dim)

    store = EmbeddingStore(manifest, tuple(ids), vectors)
    validate_store(store)
    return store


def write_store(store: EmbeddingStore, directory: str) -> None:
    """Write a validated store; read_store(write_store(s)) is bit-exact."""
    validate_store(store)
    m = store.manifest
    for text in (m.model_id, m.layer):
        if "\n" in text or "=" in text:
            raise FormatError(f"manifest value {text!r} contains reserved characters")
    for sid in store.ids:
        if "\n" in sid or "\t" in sid:
            raise FormatError(f"stimulus id {sid!r} contains reserved characters")
    manifest_text = "".join(
        f"{key}={getattr(m, key)}\n" for key in MANIFEST_KEYS
    )
    index_text = "".join(f"{sid}\n" for sid in store.ids)
    payload = np.ascontiguousarray(store.vectors, dtype="<f4").tobytes()
    try:
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, "manifest.txt"), "wb") as fh:
            fh.write(manifest_text.encode("utf-8"))
        with open(os.path.join(directory, "index.tsv"), "wb") as fh:
            fh.write(index_text.encode("utf-8"))
        with open(os.path.join(directory, "embeddings.bin"), "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write store to {directory}: {exc}") from exc
