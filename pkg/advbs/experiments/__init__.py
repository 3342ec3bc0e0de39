from .config import Config as ExperimentConfig  # noqa
from .experiment import Experiment  # noqa
from .quantization_ablation import QuantizationAblation  # noqa
from .adversarial_training import AdversarialTraining  # noqa
from .parameter_study import ParameterStudy  # noqa
from .speed_distortion import SpeedDistortion  # noqa
