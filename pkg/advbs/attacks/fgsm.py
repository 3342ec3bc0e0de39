from typing import Optional

import numpy as np

from advbs.attacks.attack import Attack
from advbs.attacks.config import FgsmParams, IfgsmParams
from advbs.attacks.outcome import AttackOutcome, Trace
from advbs.core import Ball, QuantGrid, as_image, clip01, project_ball, round_to_grid
from advbs.models.classifier import Classifier, GradientCounter
from advbs.types import NormKind


def fgsm(
    model: Classifier,
    x: np.ndarray,
    label: int,
    epsilon: float,
    grid: Optional[QuantGrid] = QuantGrid(),
    record_trace: bool = False,
) -> AttackOutcome:
    """
    Single signed-gradient step of length epsilon per pixel.
    A vanishing gradient leaves x untouched.
    """
    x = as_image(x)
    counter = GradientCounter(model)
    trace = Trace(record_trace)
    trace.record(model, x, label)

    gradient = counter.input_gradient(x, label)
    y = clip01(x - epsilon * np.sign(gradient))
    trace.record(model, y, label)
    if grid is not None:
        y = round_to_grid(y, grid)
    return AttackOutcome.build(model, x, label, y, counter, trace)


def ifgsm(
    model: Classifier,
    x: np.ndarray,
    label: int,
    epsilon: float,
    alpha: float = 0.08,
    iters: int = 20,
    grid: Optional[QuantGrid] = QuantGrid(),
    record_trace: bool = False,
) -> AttackOutcome:
    x = as_image(x)
    counter = GradientCounter(model)
    trace = Trace(record_trace)
    ball = Ball(x, epsilon, NormKind.LINF)

    y = x.copy()
    trace.record(model, y, label)
    for _ in range(iters):
        # sign(0) = 0 keeps a zero-gradient iterate in place
        gradient = counter.input_gradient(y, label)
        y = clip01(project_ball(y - alpha * np.sign(gradient), ball))
        trace.record(model, y, label)
    if grid is not None:
        y = round_to_grid(y, grid)
    return AttackOutcome.build(model, x, label, y, counter, trace)


class FGSM(Attack):
    @staticmethod
    def name() -> str:
        return "fgsm"

    @staticmethod
    def typename() -> str:
        return "Attack.FGSM"

    @property
    def params(self) -> FgsmParams:
        return self._params  # type: ignore

    def budget(self) -> int:
        return 1

    def run(
        self, model: Classifier, x: np.ndarray, label: int, record_trace: bool = False
    ) -> AttackOutcome:
        return fgsm(model, x, label, self.params.epsilon, self.grid, record_trace)


class IFGSM(Attack):
    @staticmethod
    def name() -> str:
        return "ifgsm"

    @staticmethod
    def typename() -> str:
        return "Attack.IFGSM"

    @property
    def params(self) -> IfgsmParams:
        return self._params  # type: ignore

    def budget(self) -> int:
        return self.params.iters

    def run(
        self, model: Classifier, x: np.ndarray, label: int, record_trace: bool = False
    ) -> AttackOutcome:
        p = self.params
        return ifgsm(model, x, label, p.epsilon, p.alpha, p.iters, self.grid, record_trace)
