from enum import Enum

from advbs.errors import ConfigError, UnknownAttack


class Attacks(str, Enum):
    FGSM = "fgsm"
    IFGSM = "ifgsm"
    PGD2 = "pgd2"
    CW = "cw"
    DDN = "ddn"
    BP = "bp"

    @staticmethod
    def get(name: str) -> "Attacks":
        for member in Attacks:
            if member.value == name:
                return member
        raise UnknownAttack(name)

    def targets_distortion(self) -> bool:
        """
        Attacks parametrized by a distortion budget ε; benchmarks sweep them over an ε grid.
        """
        return self in (Attacks.FGSM, Attacks.IFGSM, Attacks.PGD2)


class NormKind(str, Enum):
    L2 = "l2"
    LINF = "linf"


class LossKind(str, Enum):
    NLL = "nll"
    MARGIN = "margin"


class QuantizationMode(str, Enum):
    NONE = "none"
    END = "end"
    ROUND = "round"
    ADAPTIVE = "adaptive"

    @staticmethod
    def get(name: str) -> "QuantizationMode":
        for member in QuantizationMode:
            if member.value == name:
                return member
        raise ConfigError(f"Unknown quantization mode {name}!")


class TrainingMode(str, Enum):
    SCRATCH = "scratch"
    FINETUNE = "finetune"

    @staticmethod
    def get(name: str) -> "TrainingMode":
        for member in TrainingMode:
            if member.value == name:
                return member
        raise ConfigError(f"Unknown training mode {name}!")
