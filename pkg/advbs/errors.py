"""
    Error hierarchy shared by all modules.

    Everything raised on purpose by the library derives from AdvBSError so that
    the command line can map it onto exit code 2; value-domain violations also
    derive from ValueError.
"""


class AdvBSError(RuntimeError):
    pass


class ZeroVector(AdvBSError, ValueError):
    pass


class DimensionMismatch(AdvBSError, ValueError):
    def __init__(self, expected: int, received: int):
        super().__init__(f"Expected input of dimension {expected}, received {received}!")
        self.expected = expected
        self.received = received


class EmptyDataset(AdvBSError):
    pass


class DatasetError(AdvBSError):
    pass


class BadMagic(DatasetError):
    def __init__(self, path: str, expected: int, received: int):
        super().__init__(
            f"Magic number mismatch in {path}: expected {hex(expected)}, found {hex(received)}"
        )


class TruncatedFile(DatasetError):
    pass


class CountMismatch(DatasetError):
    pass


class ModelFileError(AdvBSError):
    pass


class ZeroGradient(AdvBSError):
    pass


class InvalidTarget(AdvBSError, ValueError):
    pass


class AllStagesFailed(AdvBSError):
    pass


class DomainError(AdvBSError, ValueError):
    pass


class InvalidInput(AdvBSError, ValueError):
    pass


class EmptyEvaluationSet(AdvBSError):
    pass


class MismatchedImageSets(AdvBSError):
    pass


class BudgetExceeded(AdvBSError):
    pass


class UnknownAttack(AdvBSError):
    def __init__(self, name: str):
        super().__init__(f"Attack {name} not supported!")
        self.name = name


class ConfigError(AdvBSError):
    pass
