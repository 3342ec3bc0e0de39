"""
    AdvBS: adversarial attacks under image quantization and their benchmark
"""

from .version import __version__  # noqa
from .advbs import AdvBS  # noqa

from .core import QuantGrid  # noqa
from .types import Attacks, QuantizationMode  # noqa
