import copy
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from advbs.core import QuantGrid
from advbs.errors import ConfigError
from advbs.types import Attacks, NormKind
from advbs.utils import check_keys, project_absolute_path


class AdvBSConfig:
    """
    Project-wide defaults: quantization grid, attack parameters, epsilon grids.
    """

    def __init__(self, path: Optional[str] = None):
        path = path if path else project_absolute_path("config", "defaults.json")
        with open(path, "r") as cfg:
            self._defaults = json.load(cfg)

    @property
    def grid(self) -> QuantGrid:
        return QuantGrid.deserialize(self._defaults["grid"])

    @property
    def d_upp(self) -> float:
        return float(self._defaults["d_upp"])

    def epsilons(self, norm_kind: NormKind) -> List[float]:
        return list(self._defaults["epsilons"][norm_kind.value])

    def attack_epsilons(self, attack: Attacks) -> List[float]:
        norm_kind = NormKind.L2 if attack == Attacks.PGD2 else NormKind.LINF
        return self.epsilons(norm_kind)

    def attack_defaults(self, name: str) -> dict:
        return copy.deepcopy(self._defaults["attacks"][Attacks.get(name).value])

    def training_defaults(self) -> dict:
        return copy.deepcopy(self._defaults["training"])

    def quantpred_defaults(self) -> dict:
        return copy.deepcopy(self._defaults["quantpred"])

    def trace2d_defaults(self) -> dict:
        return copy.deepcopy(self._defaults["trace2d"])


def _require_seed(config: dict, section: str) -> int:
    if config.get("seed") is None:
        raise ConfigError(f"Missing seed in {section}")
    return int(config["seed"])


@dataclass
class TrainCommandConfig:
    dataset: dict
    training: dict
    seed: int
    test_fraction: Optional[float] = None
    model_file: str = "model.bin"

    def serialize(self) -> dict:
        return {
            "dataset": self.dataset,
            "training": self.training,
            "seed": self.seed,
            "test_fraction": self.test_fraction,
            "model_file": self.model_file,
        }

    @staticmethod
    def deserialize(config: dict, defaults: AdvBSConfig) -> "TrainCommandConfig":
        keys = ["dataset", "training", "seed", "test_fraction", "model_file"]
        check_keys(config, keys, "train config", required=["dataset"])
        seed = _require_seed(config, "train config")
        training = {**defaults.training_defaults(), **config.get("training", {})}
        training.setdefault("seed", seed)
        return TrainCommandConfig(
            dataset=config["dataset"],
            training=training,
            seed=seed,
            test_fraction=config.get("test_fraction"),
            model_file=config.get("model_file", "model.bin"),
        )


@dataclass
class BenchCommandConfig:
    model: str
    dataset: dict
    attack: str
    params: dict
    seed: int
    epsilons: Optional[List[float]] = None
    quantize: bool = True
    d_upp: Optional[float] = None
    jobs: int = 1

    def serialize(self) -> dict:
        return {
            "model": self.model,
            "dataset": self.dataset,
            "attack": {"name": self.attack, "params": self.params},
            "seed": self.seed,
            "epsilons": self.epsilons,
            "quantize": self.quantize,
            "d_upp": self.d_upp,
            "jobs": self.jobs,
        }

    @staticmethod
    def deserialize(config: dict, defaults: AdvBSConfig) -> "BenchCommandConfig":
        keys = ["model", "dataset", "attack", "seed", "epsilons", "quantize", "d_upp", "jobs"]
        check_keys(config, keys, "bench config", required=["model", "dataset", "attack"])
        seed = _require_seed(config, "bench config")
        attack = config["attack"]
        check_keys(attack, ["name", "params"], "attack config", required=["name"])
        name = Attacks.get(attack["name"]).value
        epsilons = config.get("epsilons")
        if epsilons is not None and not Attacks.get(name).targets_distortion():
            raise ConfigError(f"Attack {name} does not take a distortion budget")
        return BenchCommandConfig(
            model=config["model"],
            dataset=config["dataset"],
            attack=name,
            params={**defaults.attack_defaults(name), **attack.get("params", {})},
            seed=seed,
            epsilons=[float(eps) for eps in epsilons] if epsilons is not None else None,
            quantize=bool(config.get("quantize", True)),
            d_upp=config.get("d_upp"),
            jobs=int(config.get("jobs", 1)),
        )


@dataclass
class QuantPredCommandConfig:
    n: int
    delta: float
    rho: List[float]
    samples: int
    seed: int
    jobs: int = 1

    def serialize(self) -> dict:
        return {
            "n": self.n,
            "delta": self.delta,
            "rho": self.rho,
            "samples": self.samples,
            "seed": self.seed,
            "jobs": self.jobs,
        }

    @staticmethod
    def deserialize(config: dict, defaults: AdvBSConfig) -> "QuantPredCommandConfig":
        keys = ["n", "delta", "rho", "samples", "seed", "jobs"]
        check_keys(config, keys, "quantpred config", required=["n", "rho"])
        merged = {**defaults.quantpred_defaults(), **config}
        samples = int(merged["samples"])
        # the estimate is only random with Monte-Carlo samples
        seed = _require_seed(merged, "quantpred config") if samples > 0 else merged.get("seed", 0)
        return QuantPredCommandConfig(
            n=int(merged["n"]),
            delta=float(merged.get("delta", defaults.grid.delta)),
            rho=[float(rho) for rho in merged["rho"]],
            samples=samples,
            seed=int(seed),
            jobs=int(merged["jobs"]),
        )


@dataclass
class Trace2DCommandConfig:
    toy: dict
    starts: List[List[float]]
    attacks: List[str]
    params: Dict[str, dict]
    resolution: int
    quantize: bool
    seed: int = 0

    def serialize(self) -> dict:
        return {
            "toy": self.toy,
            "starts": self.starts,
            "attacks": self.attacks,
            "params": self.params,
            "resolution": self.resolution,
            "quantize": self.quantize,
            "seed": self.seed,
        }

    @staticmethod
    def deserialize(config: dict, defaults: AdvBSConfig) -> "Trace2DCommandConfig":
        keys = ["toy", "starts", "attacks", "params", "resolution", "quantize", "seed"]
        check_keys(config, keys, "trace2d config")
        base = defaults.trace2d_defaults()
        names = config.get("attacks", [attack.value for attack in Attacks])
        attacks = [Attacks.get(name).value for name in names]
        overrides = config.get("params", {})
        params = {}
        for name in attacks:
            params[name] = {
                **defaults.attack_defaults(name),
                **base["attacks"].get(name, {}),
                **overrides.get(name, {}),
            }
        resolution = int(config.get("resolution", base["resolution"]))
        if resolution < 2:
            raise ConfigError(f"Probability grid needs 2 points per axis, got {resolution}")
        return Trace2DCommandConfig(
            toy={**base["toy"], **config.get("toy", {})},
            starts=[list(map(float, start)) for start in config.get("starts", base["starts"])],
            attacks=attacks,
            params=params,
            resolution=resolution,
            quantize=bool(config.get("quantize", base["quantize"])),
            seed=int(config.get("seed", 0)),
        )


@dataclass
class DatasetConfig:
    """
    Either IDX files or a generated two-moons set.
    """

    kind: str
    options: dict = field(default_factory=dict)

    @staticmethod
    def deserialize(config: dict) -> "DatasetConfig":
        if "type" not in config:
            raise ConfigError("Dataset config requires a type")
        kind = config["type"]
        options = {key: value for key, value in config.items() if key != "type"}
        if kind == "idx":
            check_keys(options, ["images", "labels", "limit"], "idx dataset", ["images", "labels"])
        elif kind == "moons":
            check_keys(options, ["count", "noise", "seed"], "moons dataset", ["count", "seed"])
        else:
            raise ConfigError(f"Dataset type {kind} not supported!")
        return DatasetConfig(kind, options)
