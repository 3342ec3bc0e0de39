import os
import struct
from typing import Optional, Tuple

import numpy as np

from advbs.errors import BadMagic, CountMismatch, DatasetError, InvalidInput, TruncatedFile

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801

# two-moons arcs span [-1, 2] x [-0.5, 1]; this affine map puts them in [0, 1]^2
MOONS_OFFSET = 1.0
MOONS_SCALE = 3.0


class Dataset:
    """
    Labeled images, one flat [0, 1] vector per row.
    """

    def __init__(self, images: np.ndarray, labels: np.ndarray):
        images = np.asarray(images, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64).reshape(-1)
        if images.ndim != 2:
            raise InvalidInput(f"Images must form a 2D array, got shape {images.shape}")
        if images.shape[0] != labels.shape[0]:
            raise CountMismatch(f"{images.shape[0]} images but {labels.shape[0]} labels")
        if images.size and (np.min(images) < 0.0 or np.max(images) > 1.0):
            raise InvalidInput("Image values must lie in [0, 1]")
        if labels.size and np.min(labels) < 0:
            raise InvalidInput("Labels must be nonnegative")
        self._images = images
        self._labels = labels

    @property
    def images(self) -> np.ndarray:
        return self._images

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @property
    def input_dim(self) -> int:
        return self._images.shape[1]

    def __len__(self) -> int:
        return self._labels.shape[0]

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self._images[indices], self._labels[indices])

    def head(self, count: int) -> "Dataset":
        return Dataset(self._images[:count], self._labels[:count])

    def split(self, fraction: float, seed: int) -> Tuple["Dataset", "Dataset"]:
        if not 0.0 < fraction < 1.0:
            raise InvalidInput(f"Split fraction must lie in (0, 1), got {fraction}")
        order = np.random.default_rng(seed).permutation(len(self))
        cut = int(round(fraction * len(self)))
        return self.subset(np.sort(order[:cut])), self.subset(np.sort(order[cut:]))

    def concatenate(self, other: "Dataset") -> "Dataset":
        return Dataset(
            np.concatenate([self._images, other.images]),
            np.concatenate([self._labels, other.labels]),
        )


def _read_header(in_f, path: str, fields: int) -> Tuple[int, ...]:
    data = in_f.read(4 * fields)
    if len(data) < 4 * fields:
        raise TruncatedFile(f"IDX file {path} ends inside its header")
    return struct.unpack(f">{fields}I", data)


def load_idx(images_path: str, labels_path: str, limit: Optional[int] = None) -> Dataset:
    """
    Load an IDX image/label pair (MNIST layout), scaling pixel bytes by 1/255.

    Data format (big endian):
    u32 | magic (0x803 images, 0x801 labels)
    u32 | item count
    u32 | rows, u32 | columns (images only)
    u8[] | pixels row-wise, or labels
    """
    for path in (images_path, labels_path):
        if not os.path.isfile(path):
            raise DatasetError(f"IDX file {path} does not exist")

    with open(images_path, "rb") as images_f, open(labels_path, "rb") as labels_f:
        magic, count, rows, cols = _read_header(images_f, images_path, 4)
        if magic != IDX_IMAGE_MAGIC:
            raise BadMagic(images_path, IDX_IMAGE_MAGIC, magic)
        label_magic, label_count = _read_header(labels_f, labels_path, 2)
        if label_magic != IDX_LABEL_MAGIC:
            raise BadMagic(labels_path, IDX_LABEL_MAGIC, label_magic)
        if count != label_count:
            raise CountMismatch(
                f"{images_path} holds {count} images but {labels_path} {label_count} labels"
            )

        items = count if limit is None else min(count, max(int(limit), 0))
        pixels = rows * cols
        image_bytes = images_f.read(items * pixels)
        if len(image_bytes) < items * pixels:
            raise TruncatedFile(f"IDX file {images_path} holds fewer than {items} images")
        label_bytes = labels_f.read(items)
        if len(label_bytes) < items:
            raise TruncatedFile(f"IDX file {labels_path} holds fewer than {items} labels")

    images = np.frombuffer(image_bytes, dtype=np.uint8).reshape(items, pixels)
    labels = np.frombuffer(label_bytes, dtype=np.uint8)
    return Dataset(images.astype(np.float64) / 255.0, labels.astype(np.int64))


def make_two_moons(count: int, noise_sd: float, seed: int) -> Dataset:
    """
    Two interleaving half circles, label 0 on the upper arc and 1 on the lower.
    The noise is added in arc units, before mapping into [0, 1]^2.
    """
    if count < 2:
        raise InvalidInput(f"Two moons need at least 2 points, got {count}")
    rng = np.random.default_rng(seed)
    lower = count // 2
    upper = count - lower

    theta_upper = np.linspace(0.0, np.pi, upper)
    theta_lower = np.linspace(0.0, np.pi, lower)
    points = np.concatenate(
        [
            np.stack([np.cos(theta_upper), np.sin(theta_upper)], axis=1),
            np.stack([1.0 - np.cos(theta_lower), 0.5 - np.sin(theta_lower)], axis=1),
        ]
    )
    labels = np.concatenate([np.zeros(upper, dtype=np.int64), np.ones(lower, dtype=np.int64)])
    if noise_sd > 0:
        points = points + rng.normal(scale=noise_sd, size=points.shape)

    points = np.clip((points + MOONS_OFFSET) / MOONS_SCALE, 0.0, 1.0)
    order = rng.permutation(count)
    return Dataset(points[order], labels[order])
