from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from advbs.core import distortion, linf_norm
from advbs.models.classifier import Classifier, GradientCounter, Loss


@dataclass(frozen=True)
class TraceEntry:
    iterate: np.ndarray
    loss: float
    adversarial: bool


class Trace:
    """
    Optional record of the iterates of one attack run.
    """

    def __init__(self, enabled: bool, loss: Loss = Loss()):
        self._enabled = enabled
        self._loss = loss
        self._entries: List[TraceEntry] = []

    @property
    def enabled(self) -> bool:
        return self._enabled

    @property
    def entries(self) -> List[TraceEntry]:
        return self._entries

    def record(self, model: Classifier, y: np.ndarray, label: int):
        if self._enabled:
            loss = model.loss(y, label, self._loss)
            self._entries.append(TraceEntry(y.copy(), loss, model.predict(y) != label))

    def collect(self) -> Optional[List[TraceEntry]]:
        return self._entries if self._enabled else None


@dataclass
class AttackOutcome:
    adversarial: np.ndarray
    success: bool
    distortion_l2: float
    distortion_linf: float
    grads_used: int
    trace: Optional[List[TraceEntry]] = None
    # BP only: the last iterate and the length of its first stage
    final_iterate: Optional[np.ndarray] = None
    stage1_iterations: Optional[int] = None
    extras: dict = field(default_factory=dict)

    @staticmethod
    def build(
        model: Classifier,
        original: np.ndarray,
        label: int,
        adversarial: np.ndarray,
        counter: GradientCounter,
        trace: Trace,
        **kwargs,
    ) -> "AttackOutcome":
        """
        Success and distortions are evaluated on the returned image itself.
        """
        adversarial = np.array(adversarial, dtype=np.float64)
        return AttackOutcome(
            adversarial=adversarial,
            success=model.predict(adversarial) != label,
            distortion_l2=distortion(original, adversarial),
            distortion_linf=linf_norm(adversarial - original),
            grads_used=counter.calls,
            trace=trace.collect(),
            **kwargs,
        )
