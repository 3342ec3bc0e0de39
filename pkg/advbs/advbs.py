import os
from typing import Dict, Optional, Tuple, Type

from advbs.attacks import (
    FGSM,
    IFGSM,
    PGD2,
    Attack,
    AttackParams,
    BoundaryProjection,
    BpParams,
    CarliniWagner,
    CwParams,
    DDN,
    DdnParams,
    FgsmParams,
    IfgsmParams,
    Pgd2Params,
)
from advbs.config import AdvBSConfig, DatasetConfig
from advbs.errors import ConfigError, ModelFileError
from advbs.experiments import Experiment, ExperimentConfig
from advbs.models import Dataset, MlpModel, Toy2DModel, load_idx, make_two_moons
from advbs.types import Attacks
from advbs.utils import LoggingBase, LoggingHandlers


class AdvBS(LoggingBase):
    @property
    def output_dir(self) -> str:
        return self._output_dir

    @property
    def verbose(self) -> bool:
        return self._verbose

    @property
    def logging_filename(self) -> Optional[str]:
        return self._logging_filename

    @property
    def config(self) -> AdvBSConfig:
        return self._config

    def generate_logging_handlers(self, logging_filename: Optional[str] = None) -> LoggingHandlers:
        filename = logging_filename if logging_filename else self.logging_filename
        if filename in self._handlers:
            return self._handlers[filename]
        else:
            handlers = LoggingHandlers(verbose=self.verbose, filename=filename)
            self._handlers[filename] = handlers
            return handlers

    def __init__(
        self,
        output_dir: str,
        verbose: bool = False,
        logging_filename: Optional[str] = None,
        defaults: Optional[str] = None,
    ):
        super().__init__()
        self._config = AdvBSConfig(defaults)
        self._output_dir = output_dir
        self._verbose = verbose
        self._logging_filename = logging_filename
        self._handlers: Dict[Optional[str], LoggingHandlers] = {}
        self.logging_handlers = self.generate_logging_handlers()

        os.makedirs(self.output_dir, exist_ok=True)

    def get_attack(
        self,
        name: str,
        params: Optional[dict] = None,
        quantize: bool = True,
        logging_filename: Optional[str] = None,
    ) -> Attack:
        """
        Attack configured by the project defaults overridden with params.
        """
        implementations: Dict[str, Tuple[Type[Attack], Type[AttackParams]]] = {
            Attacks.FGSM: (FGSM, FgsmParams),
            Attacks.IFGSM: (IFGSM, IfgsmParams),
            Attacks.PGD2: (PGD2, Pgd2Params),
            Attacks.CW: (CarliniWagner, CwParams),
            Attacks.DDN: (DDN, DdnParams),
            Attacks.BP: (BoundaryProjection, BpParams),
        }
        attack_cls, params_cls = implementations[Attacks.get(name)]

        merged = {**self._config.attack_defaults(name), **(params if params else {})}
        attack_params = params_cls.deserialize(merged)
        attack = attack_cls(attack_params, self._config.grid if quantize else None)
        attack.logging_handlers = self.generate_logging_handlers(logging_filename)
        return attack

    def get_model(self, path: str) -> MlpModel:
        if not os.path.exists(path):
            raise ModelFileError(f"Model file {path} does not exist")
        model = MlpModel.load(path)
        self.logging.info(
            f"Loaded model {path}: {model.input_dim} inputs, hidden {list(model.hidden_sizes)}, "
            f"{model.num_classes} classes"
        )
        return model

    def get_toy_model(self, config: Optional[dict] = None) -> Toy2DModel:
        toy = self._config.trace2d_defaults()["toy"]
        return Toy2DModel.deserialize({**toy, **(config if config else {})})

    def get_dataset(self, config: dict) -> Dataset:
        dataset_config = DatasetConfig.deserialize(config)
        options = dataset_config.options
        implementations = {
            "idx": lambda: load_idx(options["images"], options["labels"], options.get("limit")),
            "moons": lambda: make_two_moons(
                int(options["count"]), float(options.get("noise", 0.05)), int(options["seed"])
            ),
        }
        if dataset_config.kind not in implementations:
            raise ConfigError(f"Dataset type {dataset_config.kind} not supported!")
        dataset = implementations[dataset_config.kind]()
        self.logging.info(f"Loaded {dataset_config.kind} dataset with {len(dataset)} images")
        return dataset

    def get_experiment_config(self, config: dict) -> ExperimentConfig:
        return ExperimentConfig.deserialize(config)

    def get_experiment(
        self, experiment_type: str, config: dict, logging_filename: Optional[str] = None
    ) -> Experiment:
        from advbs.experiments import (
            AdversarialTraining,
            ParameterStudy,
            QuantizationAblation,
            SpeedDistortion,
        )

        implementations: Dict[str, Type[Experiment]] = {
            "quantization-ablation": QuantizationAblation,
            "adversarial-training": AdversarialTraining,
            "parameter-study": ParameterStudy,
            "speed-distortion": SpeedDistortion,
        }
        if experiment_type not in implementations:
            raise ConfigError(f"Experiment {experiment_type} not supported!")
        experiment = implementations[experiment_type](self.get_experiment_config(config))
        experiment.logging_handlers = self.generate_logging_handlers(
            logging_filename=logging_filename
        )
        return experiment
