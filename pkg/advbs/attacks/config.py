from dataclasses import dataclass, fields
from typing import Optional, Type, TypeVar

from advbs.errors import InvalidInput
from advbs.types import QuantizationMode
from advbs.utils import check_keys

T = TypeVar("T", bound="AttackParams")


class AttackParams:
    """
    Dataclass parameters deserialized from JSON; unknown keys are rejected.
    """

    def serialize(self) -> dict:
        out = {}
        for item in fields(self):  # type: ignore
            value = getattr(self, item.name)
            out[item.name] = value.value if isinstance(value, QuantizationMode) else value
        return out

    @classmethod
    def deserialize(cls: Type[T], config: dict) -> T:
        check_keys(config, [item.name for item in fields(cls)], f"{cls.__name__}")  # type: ignore
        return cls(**config)  # type: ignore


@dataclass
class FgsmParams(AttackParams):
    epsilon: float = 1.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise InvalidInput(f"FGSM epsilon must be nonnegative, got {self.epsilon}")


@dataclass
class IfgsmParams(AttackParams):
    epsilon: float = 0.1
    alpha: float = 0.08
    iters: int = 20

    def __post_init__(self):
        if self.epsilon < 0 or self.alpha <= 0 or self.iters < 0:
            raise InvalidInput(f"Invalid I-FGSM parameters {self.serialize()}")


@dataclass
class Pgd2Params(AttackParams):
    epsilon: float = 1.0
    alpha: Optional[float] = None
    iters: int = 20

    def __post_init__(self):
        if self.epsilon < 0 or self.iters < 0:
            raise InvalidInput(f"Invalid PGD2 parameters {self.serialize()}")
        if self.alpha is not None and self.alpha <= 0:
            raise InvalidInput(f"PGD2 step must be positive, got {self.alpha}")

    @property
    def step(self) -> float:
        return self.alpha if self.alpha is not None else self.epsilon / 2.0


@dataclass
class CwParams(AttackParams):
    lambda0: float = 1.0
    search_steps: int = 5
    inner_iters: int = 20
    learning_rate: float = 0.5
    margin: float = 0.0

    def __post_init__(self):
        if (
            self.lambda0 < 0
            or self.search_steps < 1
            or self.inner_iters < 1
            or self.learning_rate <= 0
            or self.margin < 0
        ):
            raise InvalidInput(f"Invalid C&W parameters {self.serialize()}")


@dataclass
class DdnParams(AttackParams):
    eps0: float = 1.0
    gamma: float = 0.05
    iters: int = 20
    alpha: float = 1.0

    def __post_init__(self):
        if not 0 < self.gamma < 1 or self.eps0 <= 0 or self.alpha <= 0 or self.iters < 0:
            raise InvalidInput(f"Invalid DDN parameters {self.serialize()}")


@dataclass
class BpParams(AttackParams):
    alpha: float = 2.0
    gamma_min: float = 0.7
    gamma_max: float = 1.0
    iters: int = 20
    mode: QuantizationMode = QuantizationMode.ADAPTIVE

    def __post_init__(self):
        if isinstance(self.mode, str) and not isinstance(self.mode, QuantizationMode):
            self.mode = QuantizationMode.get(self.mode)
        if self.gamma_max != 1.0:
            raise InvalidInput(f"BP gamma_max is fixed to 1, got {self.gamma_max}")
        if not 0 < self.gamma_min < self.gamma_max or self.alpha <= 0 or self.iters < 1:
            raise InvalidInput(f"Invalid BP parameters {self.serialize()}")
