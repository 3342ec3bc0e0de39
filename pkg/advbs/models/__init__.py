from .classifier import (  # noqa
    Classifier,
    GradientCounter,
    Loss,
    input_gradient,
    margin_loss,
    nll_loss,
    predict,
    softmax,
)
from .dataset import Dataset, load_idx, make_two_moons  # noqa
from .mlp import MlpModel, TrainConfig, train_sgd  # noqa
from .toy import Toy2DModel  # noqa
