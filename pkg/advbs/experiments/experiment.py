import os
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

from advbs.experiments.config import Config as ExperimentConfig
from advbs.models.dataset import Dataset
from advbs.models.mlp import MlpModel
from advbs.utils import LoggingBase

# import cycle
if TYPE_CHECKING:
    from advbs import AdvBS


class Experiment(ABC, LoggingBase):
    def __init__(self, cfg: ExperimentConfig):
        super().__init__()
        self._config = cfg

    @property
    def config(self) -> ExperimentConfig:
        return self._config

    @property
    def settings(self) -> dict:
        return self._config.experiment_settings(self.name())

    @property
    def out_dir(self) -> str:
        return self._out_dir

    @staticmethod
    @abstractmethod
    def name() -> str:
        pass

    @staticmethod
    @abstractmethod
    def typename() -> str:
        pass

    def prepare(self, advbs_client: "AdvBS"):
        self._client = advbs_client
        self._model: MlpModel = advbs_client.get_model(self.config.model)
        self._dataset: Dataset = advbs_client.get_dataset(self.config.dataset)
        self._d_upp = (
            self.config.d_upp if self.config.d_upp is not None else advbs_client.config.d_upp
        )
        self._out_dir = os.path.join(advbs_client.output_dir, self.name())
        os.makedirs(self._out_dir, exist_ok=True)

    @abstractmethod
    def run(self):
        pass
