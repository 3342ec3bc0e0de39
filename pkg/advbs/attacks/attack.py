from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from advbs.attacks.config import AttackParams
from advbs.attacks.outcome import AttackOutcome
from advbs.core import QuantGrid
from advbs.models.classifier import Classifier
from advbs.utils import LoggingBase


class Attack(ABC, LoggingBase):
    """
    Untargeted white-box attack with fixed parameters.

    A grid of None disables every rounding step of the attack.
    """

    def __init__(self, params: AttackParams, grid: Optional[QuantGrid] = QuantGrid()):
        super().__init__()
        self._params = params
        self._grid = grid

    @property
    def params(self) -> AttackParams:
        return self._params

    @property
    def grid(self) -> Optional[QuantGrid]:
        return self._grid

    @staticmethod
    @abstractmethod
    def name() -> str:
        pass

    @staticmethod
    @abstractmethod
    def typename() -> str:
        pass

    @abstractmethod
    def budget(self) -> int:
        """
        Number of input gradients one run consumes at most.
        """
        pass

    @abstractmethod
    def run(
        self, model: Classifier, x: np.ndarray, label: int, record_trace: bool = False
    ) -> AttackOutcome:
        pass

    def serialize(self) -> dict:
        return {
            "name": self.name(),
            "params": self._params.serialize(),
            "grid": self._grid.serialize() if self._grid else None,
        }
