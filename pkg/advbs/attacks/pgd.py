from typing import Optional

import numpy as np

from advbs.attacks.attack import Attack
from advbs.attacks.config import Pgd2Params
from advbs.attacks.outcome import AttackOutcome, Trace
from advbs.core import Ball, QuantGrid, as_image, clip01, project_ball, round_to_grid
from advbs.models.classifier import Classifier, GradientCounter
from advbs.types import NormKind


def pgd2(
    model: Classifier,
    x: np.ndarray,
    label: int,
    epsilon: float,
    alpha: Optional[float] = None,
    iters: int = 20,
    grid: Optional[QuantGrid] = QuantGrid(),
    record_trace: bool = False,
) -> AttackOutcome:
    """
    Normalized-gradient descent of log p_t projected on the 2-ball of radius epsilon.
    The step defaults to epsilon / 2.
    """
    x = as_image(x)
    step = alpha if alpha is not None else epsilon / 2.0
    counter = GradientCounter(model)
    trace = Trace(record_trace)
    ball = Ball(x, epsilon, NormKind.L2)

    y = x.copy()
    trace.record(model, y, label)
    for _ in range(iters):
        gradient = counter.input_gradient(y, label)
        norm = np.linalg.norm(gradient)
        if norm > 0.0:
            y = clip01(project_ball(y - step * gradient / norm, ball))
        trace.record(model, y, label)
    if grid is not None:
        y = round_to_grid(y, grid)
    return AttackOutcome.build(model, x, label, y, counter, trace)


class PGD2(Attack):
    @staticmethod
    def name() -> str:
        return "pgd2"

    @staticmethod
    def typename() -> str:
        return "Attack.PGD2"

    @property
    def params(self) -> Pgd2Params:
        return self._params  # type: ignore

    def budget(self) -> int:
        return self.params.iters

    def run(
        self, model: Classifier, x: np.ndarray, label: int, record_trace: bool = False
    ) -> AttackOutcome:
        p = self.params
        return pgd2(model, x, label, p.epsilon, p.step, p.iters, self.grid, record_trace)
