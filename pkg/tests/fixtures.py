import struct
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from advbs.attacks import Attack
from advbs.eval import BenchmarkReport, BenchmarkRunner, aggregate_multi_epsilon
from advbs.models import Dataset, MlpModel, Toy2DModel, make_two_moons, train_sgd
from advbs.models.mlp import TrainConfig

TOY_STARTS = [[0.4, 0.55], [0.55, 0.45], [0.6, 0.52]]

_moons_model: Optional[MlpModel] = None


def toy_inputs(model: Toy2DModel) -> List[Tuple[np.ndarray, int]]:
    return [(np.array(start), model.inside_label) for start in TOY_STARTS]


def moons(count: int = 200, seed: int = 3) -> Dataset:
    return make_two_moons(count, 0.05, seed)


def moons_model() -> MlpModel:
    """
    Small classifier of the two-moons set, trained once per process.
    """
    global _moons_model
    if _moons_model is None:
        cfg = TrainConfig(
            epochs=100, batch_size=16, learning_rate=0.5, seed=0, hidden_sizes=(16, 16)
        )
        model = MlpModel.initialize(2, cfg.hidden_sizes, 2, cfg.seed)
        _moons_model = train_sgd(model, moons(), cfg)
    return _moons_model


def random_mlp(input_dim: int = 16, hidden=(8,), num_classes: int = 3, seed: int = 0):
    return MlpModel.initialize(input_dim, hidden, num_classes, seed)


def write_idx(
    images_path: str,
    labels_path: str,
    images: np.ndarray,
    labels: np.ndarray,
    image_magic: int = 0x803,
    label_magic: int = 0x801,
    label_count: Optional[int] = None,
):
    count, rows, cols = images.shape
    with open(images_path, "wb") as out_f:
        out_f.write(struct.pack(">4I", image_magic, count, rows, cols))
        out_f.write(images.astype(np.uint8).tobytes())
    with open(labels_path, "wb") as out_f:
        label_count = count if label_count is None else label_count
        out_f.write(struct.pack(">2I", label_magic, label_count))
        out_f.write(labels.astype(np.uint8).tobytes())


def sweep(
    runner: BenchmarkRunner, attack: Callable[[float], Attack], epsilons: Sequence[float]
) -> BenchmarkReport:
    """
    Least successful distortion per image over a grid of attack budgets.
    """
    reports = [runner.run(attack(epsilon), seed=0) for epsilon in epsilons]
    return aggregate_multi_epsilon(reports, epsilons)
