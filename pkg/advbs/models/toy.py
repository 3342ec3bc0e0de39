from typing import Sequence

import numpy as np

from advbs.errors import InvalidInput
from advbs.models.classifier import Classifier
from advbs.utils import check_keys


class Toy2DModel(Classifier):
    """
    Binary classifier on the plane with an elliptic decision boundary.

    The score s(y) = k * (sum_j a_j (y_j - c_j)^2 - r^2) is negative inside the
    ellipse; the logits are -s/2 for the inside class and s/2 for the other one,
    so p_inside = sigmoid(-s). Equal axes make the boundary a circle and the
    gradient radial. The gradient only vanishes at the center.
    """

    def __init__(
        self,
        center: Sequence[float] = (0.5, 0.5),
        axes: Sequence[float] = (1.0, 4.0),
        radius: float = 0.3,
        sharpness: float = 20.0,
        inside_label: int = 0,
    ):
        self._center = np.asarray(center, dtype=np.float64)
        self._axes = np.asarray(axes, dtype=np.float64)
        if self._center.shape != (2,) or self._axes.shape != (2,):
            raise InvalidInput("Toy model center and axes must be 2D")
        if np.any(self._axes <= 0) or radius <= 0 or sharpness <= 0:
            raise InvalidInput("Toy model axes, radius and sharpness must be positive")
        if inside_label not in (0, 1):
            raise InvalidInput(f"Inside label must be 0 or 1, got {inside_label}")
        self._radius = float(radius)
        self._sharpness = float(sharpness)
        self._inside = int(inside_label)

    @property
    def input_dim(self) -> int:
        return 2

    @property
    def num_classes(self) -> int:
        return 2

    @property
    def inside_label(self) -> int:
        return self._inside

    def score(self, x: np.ndarray) -> float:
        offset = self.check_input(x) - self._center
        return self._sharpness * (float(np.sum(self._axes * offset**2)) - self._radius**2)

    def _score_gradient(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * self._sharpness * self._axes * (x - self._center)

    def _logits(self, x: np.ndarray) -> np.ndarray:
        half = 0.5 * self.score(x)
        logits = np.full(2, half)
        logits[self._inside] = -half
        return logits

    def _logits_backward(self, x: np.ndarray, grad_logits: np.ndarray) -> np.ndarray:
        outside = 1 - self._inside
        grad_score = 0.5 * (grad_logits[outside] - grad_logits[self._inside])
        return grad_score * self._score_gradient(x)

    def serialize(self) -> dict:
        return {
            "center": self._center.tolist(),
            "axes": self._axes.tolist(),
            "radius": self._radius,
            "sharpness": self._sharpness,
            "inside_label": self._inside,
        }

    @staticmethod
    def deserialize(config: dict) -> "Toy2DModel":
        check_keys(config, ["center", "axes", "radius", "sharpness", "inside_label"], "toy model")
        return Toy2DModel(**config)
