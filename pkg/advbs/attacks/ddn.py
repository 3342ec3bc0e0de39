import math
from typing import Optional

import numpy as np

from advbs.attacks.attack import Attack
from advbs.attacks.config import DdnParams
from advbs.attacks.outcome import AttackOutcome, Trace
from advbs.core import QuantGrid, as_image, clip01, distortion, project_sphere, round_to_grid
from advbs.errors import ZeroVector
from advbs.models.classifier import Classifier, GradientCounter


def next_radius(current: np.ndarray, x: np.ndarray, adversarial: bool, params: DdnParams) -> float:
    """
    Shrink the sphere around x after an adversarial iterate, grow it otherwise.
    An iterate sitting on x restarts from the initial radius.
    """
    norm = distortion(x, current)
    if norm == 0.0:
        return params.eps0
    return (1.0 - params.gamma) * norm if adversarial else (1.0 + params.gamma) * norm


def ddn(
    model: Classifier,
    x: np.ndarray,
    label: int,
    params: DdnParams = DdnParams(),
    grid: Optional[QuantGrid] = QuantGrid(),
    record_trace: bool = False,
) -> AttackOutcome:
    x = as_image(x)
    counter = GradientCounter(model)
    trace = Trace(record_trace)

    y = x.copy()
    adversarial = model.predict(y) != label
    best: Optional[np.ndarray] = y if adversarial else None
    best_distortion = 0.0 if adversarial else math.inf
    trace.record(model, y, label)

    radius = params.eps0
    for i in range(params.iters):
        gradient = counter.input_gradient(y, label)
        if i > 0:
            radius = next_radius(y, x, adversarial, params)
        norm = np.linalg.norm(gradient)
        step = y - params.alpha * gradient / norm if norm > 0.0 else y
        try:
            step = project_sphere(step, x, radius)
        except ZeroVector:
            pass
        y = clip01(step)
        if grid is not None:
            y = round_to_grid(y, grid)

        adversarial = model.predict(y) != label
        trace.record(model, y, label)
        if adversarial:
            dist = distortion(x, y)
            if dist < best_distortion:
                best, best_distortion = y, dist

    return AttackOutcome.build(model, x, label, best if best is not None else y, counter, trace)


class DDN(Attack):
    @staticmethod
    def name() -> str:
        return "ddn"

    @staticmethod
    def typename() -> str:
        return "Attack.DDN"

    @property
    def params(self) -> DdnParams:
        return self._params  # type: ignore

    def budget(self) -> int:
        return self.params.iters

    def run(
        self, model: Classifier, x: np.ndarray, label: int, record_trace: bool = False
    ) -> AttackOutcome:
        return ddn(model, x, label, self.params, self.grid, record_trace)
