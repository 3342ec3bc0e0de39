import os

import pandas as pd

from advbs.eval import AdversarialTrainer, BenchmarkRunner
from advbs.experiments.config import Config as ExperimentConfig
from advbs.experiments.experiment import Experiment
from advbs.models.mlp import MlpModel, TrainConfig
from advbs.types import TrainingMode
from advbs.utils import check_keys, serialize


class AdversarialTraining(Experiment):
    """
    Defends the model with adversarial training against a fast reference attack,
    then compares clean accuracy and attack results before and after.
    """

    def __init__(self, config: ExperimentConfig):
        super().__init__(config)

    @staticmethod
    def name() -> str:
        return "adversarial-training"

    @staticmethod
    def typename() -> str:
        return "Experiment.AdversarialTraining"

    def _reference_attack(self, config: dict):
        check_keys(config, ["name", "params"], "reference attack", required=["name"])
        return self._client.get_attack(config["name"], config.get("params", {}))

    def run(self):

        settings = self.settings
        check_keys(
            settings,
            ["attack", "epochs", "mode", "training", "train_dataset", "evaluation"],
            self.name(),
            required=["attack"],
        )
        attack = self._reference_attack(settings["attack"])
        training = {
            **self._client.config.training_defaults(),
            **settings.get("training", {}),
            "seed": self.config.seed,
        }
        training["hidden_sizes"] = list(self._model.hidden_sizes)
        train_cfg = TrainConfig.deserialize(training)
        train_set = (
            self._client.get_dataset(settings["train_dataset"])
            if "train_dataset" in settings
            else self._dataset
        )
        mode = TrainingMode.get(settings.get("mode", TrainingMode.FINETUNE.value))
        epochs = int(settings.get("epochs", 5))

        trainer = AdversarialTrainer(attack, train_cfg)
        trainer.logging_handlers = self.logging_handlers
        history = []
        defended = trainer.train(self._model, train_set, epochs, mode, history)
        defended.save(os.path.join(self.out_dir, "defended.bin"))

        evaluation = settings.get("evaluation", [settings["attack"]])
        rows = []
        for label, model in [("undefended", self._model), ("defended", defended)]:
            rows.extend(self._evaluate(label, model, evaluation))
        summary = pd.DataFrame(
            rows, columns=["model", "attack", "clean_accuracy", "p_suc", "d_bar"]
        )
        summary.to_csv(os.path.join(self.out_dir, "summary.csv"), index=False)
        with open(os.path.join(self.out_dir, "training.json"), "w") as out_f:
            out_f.write(
                serialize(
                    {
                        "attack": attack.serialize(),
                        "training": train_cfg.serialize(),
                        "mode": mode.value,
                        "epochs": epochs,
                        "losses": history,
                    }
                )
            )
        return summary

    def _evaluate(self, label: str, model: MlpModel, evaluation: list) -> list:
        accuracy = model.accuracy(self._dataset)
        self.logging.info(f"Clean accuracy of the {label} model: {accuracy}")
        runner = BenchmarkRunner(model, self._dataset, self.config.jobs, self._d_upp)
        runner.logging_handlers = self.logging_handlers
        rows = []
        for attack_config in evaluation:
            attack = self._reference_attack(attack_config)
            report = runner.run(attack, self.config.seed)
            report.write_csv(os.path.join(self.out_dir, f"{label}_{attack.name()}.csv"))
            report.write_json(os.path.join(self.out_dir, f"{label}_{attack.name()}.json"))
            rows.append([label, attack.name(), accuracy, report.p_suc, report.d_bar])
        return rows
