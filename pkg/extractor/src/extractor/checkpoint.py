"""ResNet-50 checkpoint loading for feature extraction.

Accepts either a bare state dict or a wrapper dict holding one under
`state_dict` or `model` (optionally with an integer `epoch`).  DataParallel
`module.` prefixes are stripped.  Classifier-head (`fc.*`) tensors may be
absent or differently shaped: the head is replaced by identity for
penultimate-layer capture, so only the backbone must match.
"""

from __future__ import annotations

import torch
import torchvision

from .errors import CheckpointError


def _unwrap(payload):
    epoch = None
    state = payload
    if isinstance(payload, dict) and not all(
        torch.is_tensor(v) for v in payload.values()
    ):
        raw_epoch = payload.get("epoch")
        if isinstance(raw_epoch, int):
            epoch = raw_epoch
        for key in ("state_dict", "model"):
            inner = payload.get(key)
            if isinstance(inner, dict):
                state = inner
                break
        else:
            raise CheckpointError("no state_dict found in checkpoint wrapper")
    if not isinstance(state, dict) or not state:
        raise CheckpointError("checkpoint does not contain a state dict")
    return {k.removeprefix("module."): v for k, v in state.items()}, epoch


def load_resnet50(path: str):
    """Load a ResNet-50 backbone ready for penultimate capture.

    Returns (model, epoch_from_checkpoint_or_None).  The final fc layer is
    torch.nn.Identity, so forward passes yield the 2048-wide pooled features.
    """
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise CheckpointError(f"{path}: {exc}") from exc
    state, epoch = _unwrap(payload)

    model = torchvision.models.resnet50(weights=None)
    expected = model.state_dict()
    backbone = {}
    for key, tensor in state.items():
        if key.startswith("fc."):
            continue
        if key not in expected:
            raise CheckpointError(f"unexpected tensor {key!r} in checkpoint")
        if tuple(expected[key].shape) != tuple(tensor.shape):
            raise CheckpointError(
                f"shape mismatch for {key!r}: checkpoint "
                f"{tuple(tensor.shape)} vs model {tuple(expected[key].shape)}"
            )
        backbone[key] = tensor
    missing = [
        k for k in expected if not k.startswith("fc.") and k not in backbone
    ]
    if missing:
        raise CheckpointError(f"checkpoint missing backbone tensors: {missing[:4]}")
    model.load_state_dict(backbone, strict=False)
    model.fc = torch.nn.Identity()
    model.eval()
    return model, epoch
