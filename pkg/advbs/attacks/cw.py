import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import expit, logit

from advbs.attacks.attack import Attack
from advbs.attacks.config import CwParams
from advbs.attacks.outcome import AttackOutcome, Trace
from advbs.core import QuantGrid, as_image, distortion, round_to_grid
from advbs.models.classifier import Classifier, GradientCounter, Loss

# logit is infinite on the faces of the unit cube
INWARD_NUDGE = 1e-6


@dataclass
class AdamState:
    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @staticmethod
    def zeros(size: int) -> "AdamState":
        return AdamState(np.zeros(size), np.zeros(size))

    def step(self, w: np.ndarray, gradient: np.ndarray, learning_rate: float) -> np.ndarray:
        self.step_count += 1
        self.first_moment = self.beta1 * self.first_moment + (1.0 - self.beta1) * gradient
        self.second_moment = self.beta2 * self.second_moment + (1.0 - self.beta2) * gradient**2
        m_hat = self.first_moment / (1.0 - self.beta1**self.step_count)
        v_hat = self.second_moment / (1.0 - self.beta2**self.step_count)
        return w - learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class _LambdaSearch:
    value: float
    lower: float = 0.0
    upper: float = math.inf
    history: list = field(default_factory=list)

    def update(self, succeeded: bool):
        self.history.append(self.value)
        if succeeded:
            self.upper = min(self.upper, self.value)
            self.value = math.sqrt(self.lower * self.upper) if self.lower > 0 else self.value / 10.0
        else:
            self.lower = self.value
            if math.isfinite(self.upper):
                self.value = math.sqrt(self.lower * self.upper)
            else:
                # lambda = 0 cannot escalate multiplicatively
                self.value = self.value * 10.0 if self.value > 0 else 1.0


def cw(
    model: Classifier,
    x: np.ndarray,
    label: int,
    params: CwParams = CwParams(),
    grid: Optional[QuantGrid] = QuantGrid(),
    record_trace: bool = False,
) -> AttackOutcome:
    """
    Penalty formulation: minimize ||y - x||^2 + lambda * margin loss over
    y = sigmoid(w) with Adam, for a sequence of trade-off constants.

    Each stage restarts from x with a fresh optimizer state. The returned image is
    the successful candidate of least distortion over all stages, rounded when a
    grid is given; when no stage succeeds, the last iterate.
    """
    x = as_image(x)
    loss = Loss.margin_of(params.margin)
    counter = GradientCounter(model)
    trace = Trace(record_trace, loss)
    search = _LambdaSearch(params.lambda0)

    w_start = logit(np.clip(x, INWARD_NUDGE, 1.0 - INWARD_NUDGE))
    trace.record(model, x, label)

    best: Optional[np.ndarray] = None
    best_distortion = math.inf
    last = x
    for _ in range(params.search_steps):
        lam = search.value
        w = w_start.copy()
        adam = AdamState.zeros(x.size)
        stage_success = False
        for _ in range(params.inner_iters):
            y = expit(w)
            grad_y = 2.0 * (y - x) + lam * counter.input_gradient(y, label, loss)
            w = adam.step(w, grad_y * y * (1.0 - y), params.learning_rate)

            last = expit(w)
            trace.record(model, last, label)
            candidate = round_to_grid(last, grid) if grid is not None else last
            if model.predict(candidate) != label:
                stage_success = True
                dist = distortion(x, candidate)
                if dist < best_distortion:
                    best, best_distortion = candidate, dist
        search.update(stage_success)

    if best is None:
        best = round_to_grid(last, grid) if grid is not None else last
    return AttackOutcome.build(
        model, x, label, best, counter, trace, extras={"lambdas": search.history}
    )


class CarliniWagner(Attack):
    @staticmethod
    def name() -> str:
        return "cw"

    @staticmethod
    def typename() -> str:
        return "Attack.CW"

    @property
    def params(self) -> CwParams:
        return self._params  # type: ignore

    def budget(self) -> int:
        return self.params.search_steps * self.params.inner_iters

    def run(
        self, model: Classifier, x: np.ndarray, label: int, record_trace: bool = False
    ) -> AttackOutcome:
        outcome = cw(model, x, label, self.params, self.grid, record_trace)
        if not outcome.success:
            self.logging.debug(
                f"All {self.params.search_steps} stages failed, lambdas "
                f"{outcome.extras['lambdas']}"
            )
        return outcome
