import struct
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from advbs.errors import DimensionMismatch, EmptyDataset, InvalidInput, ModelFileError
from advbs.models.classifier import Classifier, log_softmax, softmax
from advbs.models.dataset import Dataset
from advbs.utils import check_keys

LEAKY_SLOPE = 0.01

"""
    Model file layout, all little-endian:

    8s  | magic "ADVBSMLP"
    u32 | format version
    f64 | LeakyReLU negative slope
    u32 | training epochs
    u64 | training seed
    u32 | number of affine layers L
    u32[L + 1] | layer widths, input first
    per layer: f64[in * out] weights (row-major, in x out), f64[out] biases
"""
MODEL_MAGIC = b"ADVBSMLP"
MODEL_VERSION = 1
_HEADER = struct.Struct("<8sIdIQI")


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 0.1
    seed: int = 0
    hidden_sizes: Tuple[int, ...] = field(default=(128, 128))

    def __post_init__(self):
        self.hidden_sizes = tuple(int(h) for h in self.hidden_sizes)
        if self.epochs < 0 or self.batch_size < 1 or self.learning_rate <= 0:
            raise InvalidInput(f"Invalid training configuration {self.serialize()}")

    def serialize(self) -> dict:
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
            "hidden_sizes": list(self.hidden_sizes),
        }

    @staticmethod
    def deserialize(config: dict) -> "TrainConfig":
        keys = ["epochs", "batch_size", "learning_rate", "seed", "hidden_sizes"]
        check_keys(config, keys, "training configuration", required=["seed"])
        return TrainConfig(**config)


def leaky_relu(z: np.ndarray, slope: float) -> np.ndarray:
    return np.where(z >= 0.0, z, slope * z)


def leaky_relu_derivative(z: np.ndarray, slope: float) -> np.ndarray:
    # the kink takes the positive-side slope
    return np.where(z >= 0.0, 1.0, slope)


class MlpModel(Classifier):
    """
    Fully connected network: LeakyReLU hidden layers, softmax output.
    """

    def __init__(
        self,
        weights: Sequence[np.ndarray],
        biases: Sequence[np.ndarray],
        epochs: int = 0,
        seed: int = 0,
        slope: float = LEAKY_SLOPE,
    ):
        if len(weights) != len(biases) or len(weights) == 0:
            raise InvalidInput("MLP requires one bias vector per weight matrix")
        self._weights = [np.array(w, dtype=np.float64) for w in weights]
        self._biases = [np.array(b, dtype=np.float64) for b in biases]
        for prev, cur in zip(self._weights, self._weights[1:]):
            if prev.shape[1] != cur.shape[0]:
                raise InvalidInput(f"Layer shapes {prev.shape} and {cur.shape} do not chain")
        for w, b in zip(self._weights, self._biases):
            if b.shape != (w.shape[1],):
                raise InvalidInput(f"Bias shape {b.shape} does not match weights {w.shape}")
        self._epochs = int(epochs)
        self._seed = int(seed)
        self._slope = float(slope)

    @staticmethod
    def initialize(
        input_dim: int, hidden_sizes: Sequence[int], num_classes: int, seed: int
    ) -> "MlpModel":
        rng = np.random.default_rng(seed)
        widths = [input_dim, *hidden_sizes, num_classes]
        weights, biases = [], []
        for idx, (fan_in, fan_out) in enumerate(zip(widths, widths[1:])):
            hidden = idx < len(widths) - 2
            # He scaling before LeakyReLU, Glorot-like before the softmax
            scale = np.sqrt(2.0 / fan_in) if hidden else np.sqrt(1.0 / fan_in)
            weights.append(rng.standard_normal((fan_in, fan_out)) * scale)
            biases.append(np.zeros(fan_out))
        return MlpModel(weights, biases, epochs=0, seed=seed)

    @property
    def input_dim(self) -> int:
        return self._weights[0].shape[0]

    @property
    def num_classes(self) -> int:
        return self._weights[-1].shape[1]

    @property
    def hidden_sizes(self) -> Tuple[int, ...]:
        return tuple(w.shape[1] for w in self._weights[:-1])

    @property
    def epochs(self) -> int:
        return self._epochs

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def slope(self) -> float:
        return self._slope

    @property
    def weights(self) -> List[np.ndarray]:
        return [w.copy() for w in self._weights]

    @property
    def biases(self) -> List[np.ndarray]:
        return [b.copy() for b in self._biases]

    def copy(self) -> "MlpModel":
        return MlpModel(self._weights, self._biases, self._epochs, self._seed, self._slope)

    def _forward_batch(self, inputs: np.ndarray) -> Tuple[np.ndarray, List[Tuple]]:
        cache = []
        hidden = inputs
        last = len(self._weights) - 1
        for idx, (w, b) in enumerate(zip(self._weights, self._biases)):
            pre = hidden @ w + b
            cache.append((hidden, pre))
            hidden = pre if idx == last else leaky_relu(pre, self._slope)
        return hidden, cache

    def _backward_batch(
        self, cache: List[Tuple], grad_logits: np.ndarray
    ) -> Tuple[np.ndarray, List[np.ndarray], List[np.ndarray]]:
        grad = grad_logits
        grad_w: List[np.ndarray] = []
        grad_b: List[np.ndarray] = []
        last = len(self._weights) - 1
        for idx in range(last, -1, -1):
            inputs, pre = cache[idx]
            if idx != last:
                grad = grad * leaky_relu_derivative(pre, self._slope)
            grad_w.append(inputs.T @ grad)
            grad_b.append(np.sum(grad, axis=0))
            grad = grad @ self._weights[idx].T
        return grad, grad_w[::-1], grad_b[::-1]

    def preactivations(self, x: np.ndarray) -> List[np.ndarray]:
        _, cache = self._forward_batch(self.check_input(x)[None, :])
        return [pre[0] for _, pre in cache[:-1]]

    def _logits(self, x: np.ndarray) -> np.ndarray:
        logits, _ = self._forward_batch(x[None, :])
        return logits[0]

    def _logits_backward(self, x: np.ndarray, grad_logits: np.ndarray) -> np.ndarray:
        _, cache = self._forward_batch(x[None, :])
        grad_input, _, _ = self._backward_batch(cache, grad_logits[None, :])
        return grad_input[0]

    def predict_batch(self, images: np.ndarray) -> np.ndarray:
        logits, _ = self._forward_batch(np.asarray(images, dtype=np.float64))
        return np.argmax(softmax(logits), axis=1)

    def accuracy(self, dataset: Dataset) -> float:
        if len(dataset) == 0:
            raise EmptyDataset("Accuracy of an empty dataset is undefined")
        return float(np.mean(self.predict_batch(dataset.images) == dataset.labels))

    def _train_epoch(
        self, dataset: Dataset, batch_size: int, learning_rate: float, rng: np.random.Generator
    ) -> float:
        order = rng.permutation(len(dataset))
        total = 0.0
        for start in range(0, len(order), batch_size):
            batch = order[start : start + batch_size]
            inputs, labels = dataset.images[batch], dataset.labels[batch]
            logits, cache = self._forward_batch(inputs)
            log_probs = log_softmax(logits)
            total -= float(np.sum(log_probs[np.arange(len(batch)), labels]))

            grad_logits = np.exp(log_probs)
            grad_logits[np.arange(len(batch)), labels] -= 1.0
            grad_logits /= len(batch)
            _, grad_w, grad_b = self._backward_batch(cache, grad_logits)
            for idx in range(len(self._weights)):
                self._weights[idx] -= learning_rate * grad_w[idx]
                self._biases[idx] -= learning_rate * grad_b[idx]
        return total / len(dataset)

    def serialize_bytes(self) -> bytes:
        widths = [self.input_dim, *self.hidden_sizes, self.num_classes]
        chunks = [
            _HEADER.pack(
                MODEL_MAGIC,
                MODEL_VERSION,
                self._slope,
                self._epochs,
                self._seed,
                len(self._weights),
            ),
            struct.pack(f"<{len(widths)}I", *widths),
        ]
        for w, b in zip(self._weights, self._biases):
            chunks.append(w.astype("<f8").tobytes(order="C"))
            chunks.append(b.astype("<f8").tobytes())
        return b"".join(chunks)

    @staticmethod
    def deserialize_bytes(data: bytes) -> "MlpModel":
        if len(data) < _HEADER.size:
            raise ModelFileError("Model file is truncated: incomplete header")
        magic, version, slope, epochs, seed, layers = _HEADER.unpack_from(data, 0)
        if magic != MODEL_MAGIC:
            raise ModelFileError(f"Not a model file: magic {magic!r}")
        if version != MODEL_VERSION:
            raise ModelFileError(f"Unsupported model file version {version}")
        offset = _HEADER.size
        widths_fmt = struct.Struct(f"<{layers + 1}I")
        if len(data) < offset + widths_fmt.size:
            raise ModelFileError("Model file is truncated: incomplete layer widths")
        widths = widths_fmt.unpack_from(data, offset)
        offset += widths_fmt.size

        expected = offset + 8 * sum(i * o + o for i, o in zip(widths, widths[1:]))
        if len(data) != expected:
            raise ModelFileError(f"Model file holds {len(data)} bytes, expected {expected}")
        weights, biases = [], []
        for fan_in, fan_out in zip(widths, widths[1:]):
            w = np.frombuffer(data, dtype="<f8", count=fan_in * fan_out, offset=offset)
            offset += 8 * fan_in * fan_out
            b = np.frombuffer(data, dtype="<f8", count=fan_out, offset=offset)
            offset += 8 * fan_out
            weights.append(w.reshape(fan_in, fan_out).astype(np.float64))
            biases.append(b.astype(np.float64))
        return MlpModel(weights, biases, epochs=epochs, seed=seed, slope=slope)

    def save(self, path: str):
        with open(path, "wb") as out_f:
            out_f.write(self.serialize_bytes())

    @staticmethod
    def load(path: str) -> "MlpModel":
        with open(path, "rb") as in_f:
            return MlpModel.deserialize_bytes(in_f.read())


def train_sgd(
    model: MlpModel,
    dataset: Dataset,
    cfg: TrainConfig,
    history: Optional[List[float]] = None,
    rng: Optional[np.random.Generator] = None,
) -> MlpModel:
    """
    Mini-batch SGD on softmax cross-entropy; returns a new model.

    :param history: when given, receives the mean training loss of every epoch.
    :param rng: shuffling generator; seeded from cfg.seed when omitted.
    """
    if len(dataset) == 0:
        raise EmptyDataset("Cannot train on an empty dataset")
    if dataset.input_dim != model.input_dim:
        raise DimensionMismatch(model.input_dim, dataset.input_dim)
    if np.any(dataset.labels >= model.num_classes):
        raise InvalidInput(f"Labels exceed the {model.num_classes} classes of the model")

    trained = model.copy()
    if cfg.epochs == 0:
        return trained
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    for _ in range(cfg.epochs):
        loss = trained._train_epoch(dataset, cfg.batch_size, cfg.learning_rate, rng)
        if history is not None:
            history.append(loss)
    trained._epochs += cfg.epochs
    trained._seed = cfg.seed
    return trained
