import numpy as np
import pytest
import torch
import torchvision


def write_pgm(path, pixels: np.ndarray) -> None:
    """Write an 8-bit grayscale P5 image."""
    pixels = np.asarray(pixels, dtype=np.uint8)
    height, width = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def noise_image(seed: int, size: int = 64) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return rng.integers(0, 256, size=(size, size), dtype=np.uint8)


@pytest.fixture(scope="session")
def random_checkpoint(tmp_path_factory):
    """A randomly initialized ResNet-50 state dict saved to disk."""
    torch.manual_seed(0)
    model = torchvision.models.resnet50(weights=None)
    path = tmp_path_factory.mktemp("ckpt") / "random_resnet50.pt"
    torch.save(model.state_dict(), str(path))
    return str(path)


@pytest.fixture(scope="session")
def stimulus_manifest(tmp_path_factory):
    """Five noise stimuli plus the generator-format TSV manifest."""
    root = tmp_path_factory.mktemp("stims")
    lines = []
    for k in range(5):
        sid = f"s1-n{k + 1}-l1-r0"
        write_pgm(str(root / f"{sid}.pgm"), noise_image(seed=k))
        lines.append(f"{sid}\t{sid}.pgm\t1\t{k + 1}\t1\t0")
    manifest = root / "manifest.tsv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(manifest)
