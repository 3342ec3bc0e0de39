from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from advbs.errors import DimensionMismatch
from advbs.types import LossKind


@dataclass(frozen=True)
class Loss:
    kind: LossKind = LossKind.NLL
    margin: float = 0.0

    @staticmethod
    def nll() -> "Loss":
        return Loss(LossKind.NLL)

    @staticmethod
    def margin_of(margin: float) -> "Loss":
        return Loss(LossKind.MARGIN, margin)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / np.sum(exps, axis=-1, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


def nll_loss(probs: np.ndarray, label: int) -> float:
    """
    log p_t, the quantity attacks descend. A zero probability yields -inf:
    the attack already succeeded as much as it can.
    """
    if probs[label] <= 0.0:
        return float("-inf")
    return float(np.log(probs[label]))


def margin_loss(probs: np.ndarray, label: int, margin: float = 0.0) -> float:
    if probs[label] <= 0.0:
        return 0.0
    with np.errstate(divide="ignore"):
        log_probs = np.log(probs)
    rival = np.max(np.delete(log_probs, label))
    return float(max(log_probs[label] - rival + margin, 0.0))


def _rival(logits: np.ndarray, label: int) -> int:
    masked = np.array(logits, dtype=np.float64)
    masked[label] = -np.inf
    return int(np.argmax(masked))


class Classifier(ABC):
    """
    Differentiable classifier with frozen parameters.

    Subclasses provide the logits and the vector-Jacobian product of the logits
    with respect to the input; probabilities, losses and input gradients follow.
    """

    @property
    @abstractmethod
    def input_dim(self) -> int:
        pass

    @property
    @abstractmethod
    def num_classes(self) -> int:
        pass

    @abstractmethod
    def _logits(self, x: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def _logits_backward(self, x: np.ndarray, grad_logits: np.ndarray) -> np.ndarray:
        pass

    def check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.input_dim:
            raise DimensionMismatch(self.input_dim, int(x.size))
        return x

    def logits(self, x: np.ndarray) -> np.ndarray:
        return self._logits(self.check_input(x))

    def forward(self, x: np.ndarray) -> np.ndarray:
        return softmax(self.logits(x))

    def predict(self, x: np.ndarray) -> int:
        # np.argmax returns the lowest index among ties
        return int(np.argmax(self.forward(x)))

    def loss(self, x: np.ndarray, label: int, loss: Loss = Loss()) -> float:
        logits = self.logits(x)
        if loss.kind == LossKind.NLL:
            return float(log_softmax(logits)[label])
        rival = _rival(logits, label)
        return float(max(logits[label] - logits[rival] + loss.margin, 0.0))

    def input_gradient(self, x: np.ndarray, label: int, loss: Loss = Loss()) -> np.ndarray:
        x = self.check_input(x)
        logits = self._logits(x)
        grad_logits = np.zeros_like(logits)
        if loss.kind == LossKind.NLL:
            grad_logits -= softmax(logits)
            grad_logits[label] += 1.0
        else:
            rival = _rival(logits, label)
            if logits[label] - logits[rival] + loss.margin > 0.0:
                grad_logits[label] = 1.0
                grad_logits[rival] = -1.0
        return self._logits_backward(x, grad_logits)


class GradientCounter(Classifier):
    """
    Counts input_gradient calls of the wrapped classifier.
    """

    def __init__(self, model: Classifier):
        self._model = model
        self.calls = 0

    @property
    def model(self) -> Classifier:
        return self._model

    @property
    def input_dim(self) -> int:
        return self._model.input_dim

    @property
    def num_classes(self) -> int:
        return self._model.num_classes

    def _logits(self, x: np.ndarray) -> np.ndarray:
        return self._model.logits(x)

    def _logits_backward(self, x: np.ndarray, grad_logits: np.ndarray) -> np.ndarray:
        return self._model._logits_backward(x, grad_logits)

    def input_gradient(self, x: np.ndarray, label: int, loss: Loss = Loss()) -> np.ndarray:
        self.calls += 1
        return self._model.input_gradient(x, label, loss)


def predict(model: Classifier, x: np.ndarray) -> int:
    return model.predict(x)


def input_gradient(model: Classifier, x: np.ndarray, label: int, loss: Loss = Loss()) -> np.ndarray:
    return model.input_gradient(x, label, loss)
