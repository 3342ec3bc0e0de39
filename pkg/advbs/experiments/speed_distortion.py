import os

import pandas as pd

from advbs.eval import BenchmarkRunner
from advbs.errors import ConfigError
from advbs.experiments.config import Config as ExperimentConfig
from advbs.experiments.experiment import Experiment
from advbs.types import Attacks
from advbs.utils import check_keys

DEFAULT_BUDGETS = [20, 40, 60, 80, 100]
DEFAULT_ATTACKS = [Attacks.BP.value, Attacks.DDN.value, Attacks.CW.value]


def with_budget(name: str, params: dict, budget: int) -> dict:
    """
    Parameters of an iterative attack spending at most `budget` gradients per image.
    """
    attack = Attacks.get(name)
    params = dict(params)
    if attack == Attacks.FGSM:
        raise ConfigError("FGSM always uses a single gradient")
    if attack == Attacks.CW:
        steps = int(params.get("search_steps", 5))
        if budget < steps:
            raise ConfigError(f"Budget {budget} below the {steps} search steps of C&W")
        params["inner_iters"] = budget // steps
    else:
        params["iters"] = budget
    return params


class SpeedDistortion(Experiment):
    """
    Success and distortion of the iterative attacks against their gradient budget.
    """

    def __init__(self, config: ExperimentConfig):
        super().__init__(config)

    @staticmethod
    def name() -> str:
        return "speed-distortion"

    @staticmethod
    def typename() -> str:
        return "Experiment.SpeedDistortion"

    def run(self):

        settings = self.settings
        check_keys(settings, ["attacks", "budgets", "params"], self.name())
        overrides = settings.get("params", {})
        runner = BenchmarkRunner(self._model, self._dataset, self.config.jobs, self._d_upp)
        runner.logging_handlers = self.logging_handlers

        rows = []
        for name in settings.get("attacks", DEFAULT_ATTACKS):
            params = {**self._client.config.attack_defaults(name), **overrides.get(name, {})}
            for budget in settings.get("budgets", DEFAULT_BUDGETS):
                attack = self._client.get_attack(name, with_budget(name, params, int(budget)))
                report = runner.run(attack, self.config.seed)
                rows.append([attack.name(), int(budget), report.p_suc, report.d_bar])

        results = pd.DataFrame(rows, columns=["attack", "grads", "p_suc", "d_bar"])
        results.to_csv(os.path.join(self.out_dir, "speed_distortion.csv"), index=False)
        return results
