import os
from dataclasses import replace

import numpy as np
import pandas as pd

from advbs.attacks import BoundaryProjection, BpParams
from advbs.eval import BenchmarkRunner
from advbs.experiments.config import Config as ExperimentConfig
from advbs.experiments.experiment import Experiment
from advbs.utils import check_keys

DEFAULT_ALPHAS = [1.0, 2.0, 3.0, 4.0]
DEFAULT_GAMMA_MINS = [round(float(g), 1) for g in np.arange(0.1, 1.0, 0.1)]


class ParameterStudy(Experiment):
    """
    Success and distortion of BP over a grid of step scales and initial decay factors.
    """

    def __init__(self, config: ExperimentConfig):
        super().__init__(config)

    @staticmethod
    def name() -> str:
        return "parameter-study"

    @staticmethod
    def typename() -> str:
        return "Experiment.ParameterStudy"

    def run(self):

        settings = self.settings
        check_keys(settings, ["alphas", "gamma_mins", "iters", "mode"], self.name())
        base = BpParams.deserialize(
            {
                **self._client.config.attack_defaults("bp"),
                **{key: settings[key] for key in ["iters", "mode"] if key in settings},
            }
        )
        grid = self._client.config.grid
        runner = BenchmarkRunner(self._model, self._dataset, self.config.jobs, self._d_upp)
        runner.logging_handlers = self.logging_handlers

        rows = []
        for alpha in settings.get("alphas", DEFAULT_ALPHAS):
            for gamma_min in settings.get("gamma_mins", DEFAULT_GAMMA_MINS):
                params = replace(base, alpha=float(alpha), gamma_min=float(gamma_min))
                report = runner.run(BoundaryProjection(params, grid), self.config.seed)
                rows.append([float(alpha), float(gamma_min), report.p_suc, report.d_bar])

        results = pd.DataFrame(rows, columns=["alpha", "gamma_min", "p_suc", "d_bar"])
        results.to_csv(os.path.join(self.out_dir, "parameter_study.csv"), index=False)
        best = results.sort_values(["d_bar", "alpha", "gamma_min"]).iloc[0]
        self.logging.info(
            f"Least distortion {best['d_bar']} at alpha {best['alpha']}, "
            f"gamma_min {best['gamma_min']}"
        )
        return results
