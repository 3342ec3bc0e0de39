import os

import pandas as pd

from advbs.attacks import BpParams
from advbs.eval import quantization_ablation
from advbs.experiments.config import Config as ExperimentConfig
from advbs.experiments.experiment import Experiment
from advbs.types import QuantizationMode
from advbs.utils import check_keys


class QuantizationAblation(Experiment):
    """
    BP rounding at the end, rounding every iterate, and with the
    quantization-aware updates Q_in / Q_out.
    """

    def __init__(self, config: ExperimentConfig):
        super().__init__(config)

    @staticmethod
    def name() -> str:
        return "quantization-ablation"

    @staticmethod
    def typename() -> str:
        return "Experiment.QuantizationAblation"

    def run(self):

        settings = self.settings
        check_keys(settings, ["bp"], self.name())
        params = BpParams.deserialize(
            {**self._client.config.attack_defaults("bp"), **settings.get("bp", {})}
        )
        reports = quantization_ablation(
            self._model, self._dataset, params, self.config.seed, self.config.jobs, self._d_upp
        )

        rows = []
        for mode, report in reports.items():
            report.write_csv(os.path.join(self.out_dir, f"{mode.value}.csv"))
            report.write_json(os.path.join(self.out_dir, f"{mode.value}.json"))
            rows.append([mode.value, report.p_suc, report.d_bar, report.mean_grads])
            self.logging.info(f"Mode {mode.value}: P_suc {report.p_suc}, D_bar {report.d_bar}")
        summary = pd.DataFrame(rows, columns=["mode", "p_suc", "d_bar", "mean_grads"])
        summary.to_csv(os.path.join(self.out_dir, "summary.csv"), index=False)

        d_bars = [reports[mode].d_bar for mode in reversed(list(reports))]
        if None not in d_bars and sorted(d_bars) != d_bars:  # type: ignore
            self.logging.warning(
                f"Distortion is not ordered {QuantizationMode.ADAPTIVE.value} <= "
                f"{QuantizationMode.ROUND.value} <= {QuantizationMode.END.value}: {d_bars}"
            )
        return summary
