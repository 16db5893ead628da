"""Embedding-store directory writer.

Produces the consumer's documented on-disk layout: `manifest.txt` with eight
ordered `key=value` lines (extra audit keys allowed after them), `index.tsv`
with one stimulus id per line, and `embeddings.bin` holding the row-major
little-endian float32 payload.  The directory is staged under a temporary
name and renamed into place so readers never observe a partial store.
"""

from __future__ import annotations

import os
import shutil
import tempfile

import numpy as np

from .errors import ManifestError


def write_store_dir(
    directory: str,
    model_id: str,
    epoch: int,
    layer: str,
    ids: list,
    vectors: np.ndarray,
    extras: dict | None = None,
) -> None:
    """Atomically write a store directory; refuses to overwrite an existing one."""
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    if vectors.ndim != 2 or vectors.shape[0] != len(ids) or vectors.shape[0] < 1:
        raise ManifestError(
            f"payload shape {vectors.shape} does not match {len(ids)} ids"
        )
    if len(set(ids)) != len(ids):
        raise ManifestError("duplicate stimulus ids")
    if not np.isfinite(vectors).all():
        raise ManifestError("non-finite activation values")
    if (np.linalg.norm(vectors.astype(np.float64), axis=1) == 0.0).any():
        raise ManifestError("all-zero activation row")
    for text in (model_id, layer):
        if "=" in text or "\n" in text or "\t" in text:
            raise ManifestError(f"manifest value {text!r} contains reserved characters")
    for sid in ids:
        if "\n" in sid or "\t" in sid:
            raise ManifestError(f"stimulus id {sid!r} contains reserved characters")

    count, dim = vectors.shape
    lines = [
        "format_version=1",
        f"model_id={model_id}",
        f"epoch={int(epoch)}",
        f"layer={layer}",
        f"dim={dim}",
        f"count={count}",
        "dtype=f32le",
        "order=row_major",
    ]
    for key, value in (extras or {}).items():
        lines.append(f"{key}={value}")

    if os.path.exists(directory):
        raise FileExistsError(f"{directory} already exists; refusing to overwrite")
    parent = os.path.dirname(os.path.abspath(directory)) or "."
    os.makedirs(parent, exist_ok=True)
    staging = tempfile.mkdtemp(prefix=".extract-", dir=parent)
    try:
        with open(os.path.join(staging, "manifest.txt"), "wb") as fh:
            fh.write(("\n".join(lines) + "\n").encode("utf-8"))
        with open(os.path.join(staging, "index.tsv"), "wb") as fh:
            fh.write(("".join(f"{sid}\n" for sid in ids)).encode("utf-8"))
        with open(os.path.join(staging, "embeddings.bin"), "wb") as fh:
            fh.write(vectors.tobytes())
        os.rename(staging, directory)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
