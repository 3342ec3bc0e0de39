"""
    Boundary projection: a quick gradient descent reaching the wrong side of the
    decision boundary, then a refinement that walks along the boundary towards
    the original image.

    Stage 2 alternates two moves around the sphere centered at x. An adversarial
    iterate goes OUT of the current ball: it moves on the tangent plane of the
    loss level set to a point of smaller distortion. A non-adversarial iterate
    goes IN: it moves against the gradient to a point of larger distortion.
    The sphere radius tightens as the decay factor gamma grows towards 1.
"""

import math
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from advbs.attacks.attack import Attack
from advbs.attacks.config import BpParams
from advbs.attacks.outcome import AttackOutcome, Trace
from advbs.core import QuantGrid, as_image, clip01, distortion, l2_norm, round_to_grid
from advbs.errors import InvalidInput, InvalidTarget, ZeroGradient
from advbs.models.classifier import Classifier, GradientCounter
from advbs.quantization import q_in, q_out
from advbs.types import QuantizationMode

# relative slack of the IN-case precondition epsilon >= ||y - x||
IN_TOLERANCE = 1e-12


def gamma_schedule(i: int, iters: int, gamma_min: float, gamma_max: float = 1.0) -> float:
    if not 0 <= i <= iters:
        raise InvalidInput(f"Iteration {i} outside of [0, {iters}]")
    return gamma_min + i * (gamma_max - gamma_min) / (iters + 1)


def _unit_gradient(model: Classifier, y: np.ndarray, label: int) -> np.ndarray:
    gradient = model.input_gradient(y, label)
    norm = l2_norm(gradient)
    if norm == 0.0:
        raise ZeroGradient("Vanishing loss gradient")
    return gradient / norm


def _rounds_iterates(mode: QuantizationMode, grid: Optional[QuantGrid]) -> bool:
    return grid is not None and mode in (QuantizationMode.ROUND, QuantizationMode.ADAPTIVE)


def bp_stage1(
    model: Classifier,
    x: np.ndarray,
    label: int,
    params: BpParams = BpParams(),
    grid: Optional[QuantGrid] = QuantGrid(),
    trace: Optional[Trace] = None,
) -> Tuple[np.ndarray, int, bool]:
    """
    Normalized gradient descent with growing step alpha * gamma_i until the
    iterate is misclassified or the budget runs out.

    :return: current iterate, iterations consumed and whether it is adversarial
    """
    y = as_image(x).copy()
    i = 0
    while i < params.iters and model.predict(y) == label:
        try:
            direction = _unit_gradient(model, y, label)
        except ZeroGradient:
            return y, i, False
        gamma = gamma_schedule(i, params.iters, params.gamma_min, params.gamma_max)
        y = clip01(y - params.alpha * gamma * direction)
        if _rounds_iterates(params.mode, grid):
            y = round_to_grid(y, grid)  # type: ignore
        i += 1
        if trace is not None:
            trace.record(model, y, label)
    return y, i, model.predict(y) != label


def bp_case_out(x: np.ndarray, y: np.ndarray, g_hat: np.ndarray, epsilon: float) -> np.ndarray:
    """
    Point of the tangent hyperplane through y (normal g_hat) at distance epsilon
    from x and closest to y. When the hyperplane lies farther than epsilon from x,
    the projection of x onto it.
    """
    r = float(np.dot(y - x, g_hat))
    foot = x + r * g_hat
    if abs(r) >= epsilon:
        return foot
    radial = y - foot
    norm = l2_norm(radial)
    if norm == 0.0:
        if y.size == 1:
            return foot
        # y - x is parallel to g_hat: any unit vector of the hyperplane is as close
        j = int(np.argmin(np.abs(g_hat)))
        radial = -g_hat[j] * g_hat
        radial[j] += 1.0
        norm = l2_norm(radial)
    return foot + radial * (math.sqrt(epsilon * epsilon - r * r) / norm)


def bp_case_in(x: np.ndarray, y: np.ndarray, g_hat: np.ndarray, epsilon: float) -> np.ndarray:
    """
    Intersection of the ray from y along -g_hat with the sphere of radius epsilon around x.
    """
    delta = y - x
    norm_sq = float(np.dot(delta, delta))
    if epsilon * epsilon < norm_sq * (1.0 - IN_TOLERANCE):
        raise InvalidTarget(
            f"Target distortion {epsilon} below current distortion {math.sqrt(norm_sq)}"
        )
    r = float(np.dot(delta, g_hat))
    discriminant = max(epsilon * epsilon - norm_sq + r * r, 0.0)
    return y - (r + math.sqrt(discriminant)) * g_hat


def _quantize_out(
    x: np.ndarray, z: np.ndarray, y: np.ndarray, mode: QuantizationMode, grid: Optional[QuantGrid]
) -> np.ndarray:
    if grid is None or mode in (QuantizationMode.NONE, QuantizationMode.END):
        return clip01(z)
    if mode == QuantizationMode.ROUND:
        return round_to_grid(z, grid)
    return q_out(x, clip01(z), y, grid)


def _quantize_in(
    z: np.ndarray, y: np.ndarray, mode: QuantizationMode, grid: Optional[QuantGrid]
) -> np.ndarray:
    if grid is None or mode in (QuantizationMode.NONE, QuantizationMode.END):
        return clip01(z)
    if mode == QuantizationMode.ROUND:
        return round_to_grid(z, grid)
    return q_in(clip01(z), y, grid)


class _BestAdversarial:
    """
    Least-distortion adversarial image among the candidates offered.
    In END mode a candidate counts through its rounded image.
    """

    def __init__(
        self, model: Classifier, x: np.ndarray, label: int, end_grid: Optional[QuantGrid]
    ):
        self._model = model
        self._x = x
        self._label = label
        self._end_grid = end_grid
        self.image: Optional[np.ndarray] = None
        self.distortion = math.inf

    def offer(self, y: np.ndarray):
        candidate = round_to_grid(y, self._end_grid) if self._end_grid is not None else y
        if self._model.predict(candidate) == self._label:
            return
        dist = distortion(self._x, candidate)
        if dist < self.distortion:
            self.image, self.distortion = candidate, dist


def bp_stage2(
    model: Classifier,
    x: np.ndarray,
    label: int,
    y_start: np.ndarray,
    i_start: int,
    params: BpParams = BpParams(),
    grid: Optional[QuantGrid] = QuantGrid(),
    trace: Optional[Trace] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Refinement over the remaining iterations i_start ... K - 1.

    :return: least-distortion adversarial iterate (y_start when none) and the last iterate
    """
    x = as_image(x)
    mode = params.mode
    end_grid = grid if mode == QuantizationMode.END else None
    best = _BestAdversarial(model, x, label, end_grid)
    y = as_image(y_start).copy()
    best.offer(y)

    for i in range(i_start, params.iters):
        norm = distortion(x, y)
        if norm == 0.0:
            # an iterate rounded back onto x leaves no sphere to walk on: IN would target 0
            break
        try:
            g_hat = _unit_gradient(model, y, label)
        except ZeroGradient:
            break
        gamma = gamma_schedule(i, params.iters, params.gamma_min, params.gamma_max)
        if model.predict(y) != label:
            z = bp_case_out(x, y, g_hat, gamma * norm)
            y = _quantize_out(x, z, y, mode, grid)
        else:
            z = bp_case_in(x, y, g_hat, norm / gamma)
            y = _quantize_in(z, y, mode, grid)
        if trace is not None:
            trace.record(model, y, label)
        best.offer(y)

    if best.image is not None:
        return best.image, y
    start = as_image(y_start)
    return (round_to_grid(start, end_grid) if end_grid is not None else start), y


def bp(
    model: Classifier,
    x: np.ndarray,
    label: int,
    params: BpParams = BpParams(),
    grid: Optional[QuantGrid] = QuantGrid(),
    record_trace: bool = False,
) -> AttackOutcome:
    """
    Both stages share the budget of params.iters gradients.
    """
    x = as_image(x)
    counter = GradientCounter(model)
    trace = Trace(record_trace)
    trace.record(model, x, label)
    if grid is None:
        params = replace(params, mode=QuantizationMode.NONE)
    end_grid = grid if params.mode == QuantizationMode.END else None

    y, i, succeeded = bp_stage1(counter, x, label, params, grid, trace)
    if not succeeded:
        adversarial = round_to_grid(y, end_grid) if end_grid is not None else y
        return AttackOutcome.build(
            model, x, label, adversarial, counter, trace, final_iterate=y, stage1_iterations=i
        )
    if i == 0:
        # x is already misclassified
        return AttackOutcome.build(
            model, x, label, x, counter, trace, final_iterate=x, stage1_iterations=0
        )

    best, final = bp_stage2(counter, x, label, y, i, params, grid, trace)
    return AttackOutcome.build(
        model, x, label, best, counter, trace, final_iterate=final, stage1_iterations=i
    )


class BoundaryProjection(Attack):
    @staticmethod
    def name() -> str:
        return "bp"

    @staticmethod
    def typename() -> str:
        return "Attack.BP"

    @property
    def params(self) -> BpParams:
        return self._params  # type: ignore

    def budget(self) -> int:
        return self.params.iters

    def run(
        self, model: Classifier, x: np.ndarray, label: int, record_trace: bool = False
    ) -> AttackOutcome:
        outcome = bp(model, x, label, self.params, self.grid, record_trace)
        if not outcome.success:
            self.logging.debug(
                f"Stage 1 did not cross the boundary within {self.params.iters} iterations"
            )
        return outcome
