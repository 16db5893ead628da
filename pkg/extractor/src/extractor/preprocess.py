"""Deterministic evaluation-path image preprocessing.

Square bilinear resize to 256, center crop to 224, per-channel normalization
with the standard ImageNet statistics.  Grayscale inputs are replicated into
3 channels before normalization.  No random augmentation anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class PreprocessSpec:
    resize_px: int = 256
    crop_px: int = 224
    mean: tuple = IMAGENET_MEAN
    std: tuple = IMAGENET_STD
    mode: str = "eval_center_crop"

    def audit_tag(self) -> str:
        """Value for the store manifest's `preprocess=` audit line."""
        return (
            f"resize{self.resize_px}x{self.resize_px}-bilinear,"
            f"centercrop{self.crop_px},imagenet-norm,gray-to-rgb"
        )


DEFAULT_SPEC = PreprocessSpec()


def preprocess(path: str, spec: PreprocessSpec = DEFAULT_SPEC) -> np.ndarray:
    """Decode an image file into a normalized (3, crop, crop) float32 array.

    Raises DecodeError when the file is not a decodable raster image.
    """
    try:
        with Image.open(path) as img:
            img.load()
            rgb = img.convert("RGB")
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"{path}: {exc}") from exc
    resized = rgb.resize((spec.resize_px, spec.resize_px), Image.BILINEAR)
    pixels = np.asarray(resized, dtype=np.float32) / 255.0  # (H, W, 3)
    lo = (spec.resize_px - spec.crop_px) // 2
    hi = lo + spec.crop_px
    cropped = pixels[lo:hi, lo:hi, :]
    chw = np.transpose(cropped, (2, 0, 1)).copy()
    mean = np.asarray(spec.mean, dtype=np.float32).reshape(3, 1, 1)
    std = np.asarray(spec.std, dtype=np.float32).reshape(3, 1, 1)
    return (chw - mean) / std
