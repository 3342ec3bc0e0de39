"""
    Vector math shared by the attacks: norms, projections, clipping and
    the pixel quantization lattice.

    Images are flat float64 numpy arrays with values in [0, 1].
"""

from dataclasses import dataclass

import numpy as np

from advbs.errors import InvalidInput, ZeroVector
from advbs.types import NormKind

GRID_TOLERANCE = 1e-9


def as_image(values) -> np.ndarray:
    return np.asarray(values, dtype=np.float64).reshape(-1)


@dataclass(frozen=True)
class QuantGrid:
    levels: int = 256

    def __post_init__(self):
        if int(self.levels) != self.levels or self.levels < 2:
            raise InvalidInput(f"Quantization grid needs at least 2 levels, got {self.levels}")

    @property
    def delta(self) -> float:
        return 1.0 / (self.levels - 1)

    def serialize(self) -> dict:
        return {"levels": self.levels}

    @staticmethod
    def deserialize(config: dict) -> "QuantGrid":
        return QuantGrid(int(config["levels"]))


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float
    norm_kind: NormKind = NormKind.L2

    def __post_init__(self):
        if self.radius < 0:
            raise InvalidInput(f"Ball radius must be nonnegative, got {self.radius}")


def l2_norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def linf_norm(v: np.ndarray) -> float:
    if v.size == 0:
        return 0.0
    return float(np.max(np.abs(v)))


def normalize(v: np.ndarray) -> np.ndarray:
    norm = l2_norm(v)
    if norm == 0.0:
        raise ZeroVector("Cannot normalize the zero vector")
    return v / norm


def clip01(v: np.ndarray) -> np.ndarray:
    return np.clip(v, 0.0, 1.0)


def project_ball(v: np.ndarray, ball: Ball) -> np.ndarray:
    offset = v - ball.center
    if ball.norm_kind == NormKind.LINF:
        return ball.center + np.clip(offset, -ball.radius, ball.radius)
    norm = l2_norm(offset)
    if norm <= ball.radius:
        return v
    return ball.center + offset * (ball.radius / norm)


def project_sphere(v: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    return center + radius * normalize(v - center)


def round_to_grid(v: np.ndarray, grid: QuantGrid) -> np.ndarray:
    # values are nonnegative after clipping, so floor(k + 1/2) rounds half away from zero
    steps = np.floor(clip01(v) * (grid.levels - 1) + 0.5)
    return np.minimum(steps, grid.levels - 1) / (grid.levels - 1)


def is_on_grid(v: np.ndarray, grid: QuantGrid, atol: float = GRID_TOLERANCE) -> bool:
    if np.any(v < -atol) or np.any(v > 1.0 + atol):
        return False
    steps = np.rint(v * (grid.levels - 1))
    return bool(np.all(np.abs(v - steps * grid.delta) <= atol))


def distortion(original: np.ndarray, perturbed: np.ndarray) -> float:
    return l2_norm(perturbed - original)
