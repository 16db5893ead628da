"""Batch feature extraction over a stimulus manifest.

Reads the generator's TSV manifest (id, relative path, set, numerosity,
level, replicate), preprocesses each image through the deterministic eval
path, runs them through a ResNet-50 backbone, and writes the penultimate
activations as an embedding-store directory.  Inference runs single-threaded
in eval mode under no_grad, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np
import torch

from .checkpoint import load_resnet50
from .errors import ExtractorError, ManifestError
from .preprocess import DEFAULT_SPEC, preprocess

BATCH_SIZE = 16


def read_stimulus_manifest(path: str) -> list:
    """Return (stimulus_id, absolute_image_path) pairs in manifest order."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 6:
                raise ManifestError(
                    f"{path}:{lineno}: expected 6 tab-separated fields, "
                    f"got {len(fields)}"
                )
            entries.append((fields[0], os.path.join(base, fields[1])))
    if not entries:
        raise ManifestError(f"{path}: no stimulus rows")
    return entries


def extract(
    checkpoint_path: str,
    manifest_path: str,
    out_dir: str,
    layer: str = "penultimate",
    model_id: str = "resnet50",
    epoch: int | None = None,
    batch_size: int = BATCH_SIZE,
) -> tuple:
    """Run the extraction pipeline; returns (count, dim).

    The epoch recorded in the output store is, in order of precedence: the
    explicit argument, the checkpoint wrapper's own `epoch` field, else 0.
    """
    if layer != "penultimate":
        raise ManifestError(f"unsupported layer {layer!r}")
    entries = read_stimulus_manifest(manifest_path)
    model, checkpoint_epoch = load_resnet50(checkpoint_path)
    if epoch is None:
        epoch = checkpoint_epoch if checkpoint_epoch is not None else 0

    torch.set_num_threads(1)  # fixed reduction order keeps runs bit-exact
    rows = []
    with torch.no_grad():
        for start in range(0, len(entries), batch_size):
            batch_entries = entries[start : start + batch_size]
            batch = np.stack([preprocess(p, DEFAULT_SPEC) for _, p in batch_entries])
            feats = model(torch.from_numpy(batch))
            rows.append(feats.numpy().astype("<f4"))
    vectors = np.concatenate(rows, axis=0)

    from .store_format import write_store_dir

    write_store_dir(
        out_dir,
        model_id=model_id,
        epoch=epoch,
        layer=layer,
        ids=[sid for sid, _ in entries],
        vectors=vectors,
        extras={"preprocess": DEFAULT_SPEC.audit_tag()},
    )
    return vectors.shape


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extract.py",
        description="Extract penultimate-layer embeddings into a store directory.",
    )
    parser.add_argument("--checkpoint", required=True)
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--layer", default="penultimate", choices=["penultimate"])
    parser.add_argument("--out", required=True)
    parser.add_argument("--model-id", default="resnet50")
    parser.add_argument("--epoch", type=int, default=None)
    parser.add_argument("--batch-size", type=int, default=BATCH_SIZE)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        count, dim = extract(
            args.checkpoint,
            args.manifest,
            args.out,
            layer=args.layer,
            model_id=args.model_id,
            epoch=args.epoch,
            batch_size=args.batch_size,
        )
    except ExtractorError as exc:
        print(f"ERR\t{exc.code}\t{exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ERR\tio_failure\t{exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive internal-error path
        print(f"ERR\tinternal\t{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"OK\textract\tcount={count}\tdim={dim}\tout={args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
