import struct

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(917)


def write_feature_csv(path, values, labels, level=2):
    """Write a CSV in the signature-pipeline format (label,s_1,...)."""
    n_cols = values.shape[1]
    names = _column_names(n_cols)
    with open(path, "w") as fh:
        fh.write(",".join(["label"] + names) + "\n")
        for lbl, row in zip(labels, values):
            fh.write(",".join([str(int(lbl))] + [repr(float(v)) for v in row]) + "\n")
    return path


def _column_names(n_cols):
    names = []
    level = 1
    block = []
    import itertools
    while len(names) < n_cols:
        for word in itertools.product(range(1, 4), repeat=level):
            names.append("s_" + "_".join(map(str, word)))
            if len(names) == n_cols:
                break
        level += 1
    return names


def gaussian_blob_features(rng, count, n_cols=12, n_classes=10, spread=0.6):
    """Ten well-separated class blobs: trivially learnable tabular features."""
    labels = rng.integers(0, n_classes, size=count)
    centers = rng.normal(0.0, 4.0, size=(n_classes, n_cols))
    values = centers[labels] + rng.normal(0.0, spread, size=(count, n_cols))
    return values, labels


def write_idx_pair(dirpath, images, labels):
    """Matching IDX image/label files (28x28 unsigned byte payloads)."""
    count = images.shape[0]
    img_file = dirpath / "images.idx"
    lbl_file = dirpath / "labels.idx"
    with img_file.open("wb") as fh:
        fh.write(struct.pack(">iiii", 2051, count, 28, 28))
        fh.write(np.asarray(images, dtype=np.uint8).tobytes())
    with lbl_file.open("wb") as fh:
        fh.write(struct.pack(">ii", 2049, count))
        fh.write(np.asarray(labels, dtype=np.uint8).tobytes())
    return img_file, lbl_file
