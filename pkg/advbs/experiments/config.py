from typing import Dict, Optional

from advbs.errors import ConfigError
from advbs.utils import check_keys


class Config:
    def __init__(self):
        self._model: str = ""
        self._dataset: dict = {}
        self._seed: int = 0
        self._jobs: int = 1
        self._d_upp: Optional[float] = None
        self._experiment_configs: Dict[str, dict] = {}

    @property
    def model(self) -> str:
        return self._model

    @property
    def dataset(self) -> dict:
        return self._dataset

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def jobs(self) -> int:
        return self._jobs

    @property
    def d_upp(self) -> Optional[float]:
        return self._d_upp

    def experiment_settings(self, name: str) -> dict:
        return self._experiment_configs.get(name, {})

    def serialize(self) -> dict:
        out = {
            "model": self._model,
            "dataset": self._dataset,
            "seed": self._seed,
            "jobs": self._jobs,
            "d_upp": self._d_upp,
            **self._experiment_configs,
        }
        return out

    @staticmethod
    def deserialize(config: dict) -> "Config":

        from advbs.experiments import (
            AdversarialTraining,
            ParameterStudy,
            QuantizationAblation,
            SpeedDistortion,
        )

        experiments = [QuantizationAblation, AdversarialTraining, ParameterStudy, SpeedDistortion]
        names = [exp.name() for exp in experiments]
        check_keys(
            config,
            ["model", "dataset", "seed", "jobs", "d_upp", *names],
            "experiment config",
            required=["model", "dataset"],
        )
        if config.get("seed") is None:
            raise ConfigError("Missing seed in experiment config")

        cfg = Config()
        cfg._model = config["model"]
        cfg._dataset = config["dataset"]
        cfg._seed = int(config["seed"])
        cfg._jobs = int(config.get("jobs", 1))
        cfg._d_upp = config.get("d_upp")
        for name in names:
            if name in config:
                cfg._experiment_configs[name] = config[name]
        return cfg
