from .records import (  # noqa
    DEFAULT_D_UPP,
    BenchmarkReport,
    EvalRecord,
    OperatingCharacteristic,
)
from .protocol import (  # noqa
    BenchmarkRunner,
    aggregate_multi_epsilon,
    boundary_crossing_stats,
    correctly_classified,
    operating_characteristic,
    quantization_ablation,
    run_benchmark,
)
from .training import AdversarialTrainer, adversarial_training  # noqa
