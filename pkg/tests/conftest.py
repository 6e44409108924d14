import struct

import numpy as np
import pytest

from fracsig import PiecewiseLinearPath


@pytest.fixture
def rng():
    return np.random.default_rng(20240724)


@pytest.fixture
def l_path():
    """Right-then-up unit L: the standard area-ordering fixture."""
    return PiecewiseLinearPath(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))


def random_path(rng, n: int, d: int) -> PiecewiseLinearPath:
    return PiecewiseLinearPath(rng.uniform(0.0, 1.0, size=(n, d)))


def write_idx_pair(tmp_path, images: np.ndarray, labels: np.ndarray,
                   image_magic: int = 2051, label_magic: int = 2049,
                   label_count: int | None = None):
    """Write a matching IDX image/label fixture pair and return the paths."""
    count = images.shape[0]
    img_file = tmp_path / "images.idx"
    lbl_file = tmp_path / "labels.idx"
    with img_file.open("wb") as fh:
        fh.write(struct.pack(">iiii", image_magic, count, 28, 28))
        fh.write(np.asarray(images, dtype=np.uint8).tobytes())
    with lbl_file.open("wb") as fh:
        fh.write(struct.pack(">ii", label_magic, count if label_count is None else label_count))
        fh.write(np.asarray(labels, dtype=np.uint8).tobytes())
    return img_file, lbl_file


def synthetic_digits(rng, count: int):
    """Blocky synthetic digit images: class k lights up a class-specific
    stripe pattern with noise, enough structure for classifier smoke tests."""
    images = np.zeros((count, 784), dtype=np.uint8)
    labels = rng.integers(0, 10, size=count).astype(np.uint8)
    base = rng.integers(0, 40, size=(count, 784))
    for i, lbl in enumerate(labels):
        img = base[i].copy()
        rows = np.arange(28)
        mask = (rows[:, None] * 28 + np.arange(28)[None, :]) % (lbl + 3) < 2
        img[mask.ravel()] += 150 + 8 * int(lbl)
        images[i] = np.clip(img, 0, 255)
    return images, labels


def max_mixed_diff(sig_a, sig_b) -> float:
    """max over coefficients of |a-b| / (1 + |b|), levels 1..L."""
    return max(
        float(np.max(np.abs(a - b) / (1.0 + np.abs(b))))
        for a, b in zip(sig_a.levels[1:], sig_b.levels[1:])
    )
