import os
import tempfile
import unittest

import pandas as pd

import advbs
from advbs.errors import ConfigError
from advbs.experiments import ExperimentConfig
from advbs.experiments.speed_distortion import with_budget
from tests.fixtures import moons_model


class ExperimentConfigs(unittest.TestCase):
    def test_seed_required(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.deserialize({"model": "m.bin", "dataset": {"type": "moons"}})

    def test_unknown_key(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.deserialize(
                {"model": "m.bin", "dataset": {}, "seed": 1, "colour": "blue"}
            )

    def test_settings(self):
        cfg = ExperimentConfig.deserialize(
            {"model": "m.bin", "dataset": {}, "seed": 1, "parameter-study": {"iters": 5}}
        )
        self.assertEqual(cfg.experiment_settings("parameter-study"), {"iters": 5})
        self.assertEqual(cfg.experiment_settings("speed-distortion"), {})
        self.assertEqual(cfg.serialize()["seed"], 1)

    def test_with_budget(self):
        self.assertEqual(with_budget("bp", {"iters": 20}, 60)["iters"], 60)
        self.assertEqual(with_budget("cw", {"search_steps": 5}, 40)["inner_iters"], 8)
        with self.assertRaises(ConfigError):
            with_budget("fgsm", {}, 20)
        with self.assertRaises(ConfigError):
            with_budget("cw", {"search_steps": 5}, 3)


class Experiments(unittest.TestCase):
    def setUp(self):
        self.tmp_dir = tempfile.TemporaryDirectory()
        self.model_path = os.path.join(self.tmp_dir.name, "moons.bin")
        moons_model().save(self.model_path)
        self.client = advbs.AdvBS(os.path.join(self.tmp_dir.name, "out"))
        self.config = {
            "model": self.model_path,
            "dataset": {"type": "moons", "count": 40, "noise": 0.05, "seed": 11},
            "seed": 5,
            "jobs": 2,
            "quantization-ablation": {"bp": {"iters": 10}},
            "parameter-study": {"alphas": [1.0, 2.0], "gamma_mins": [0.5, 0.7], "iters": 10},
            "speed-distortion": {"attacks": ["bp", "cw"], "budgets": [10, 20]},
            "adversarial-training": {
                "attack": {"name": "fgsm", "params": {"epsilon": 0.05}},
                "epochs": 1,
                "training": {"batch_size": 16},
                "evaluation": [{"name": "bp", "params": {"iters": 10}}],
            },
        }

    def tearDown(self):
        self.tmp_dir.cleanup()

    def run_experiment(self, name: str) -> str:
        experiment = self.client.get_experiment(name, self.config)
        experiment.prepare(self.client)
        experiment.run()
        return experiment.out_dir

    def test_unknown(self):
        with self.assertRaises(ConfigError):
            self.client.get_experiment("perf-cost", self.config)

    def test_quantization_ablation(self):
        out_dir = self.run_experiment("quantization-ablation")
        summary = pd.read_csv(os.path.join(out_dir, "summary.csv"))
        self.assertEqual(list(summary["mode"]), ["end", "round", "adaptive"])
        for mode in ["end", "round", "adaptive"]:
            self.assertTrue(os.path.exists(os.path.join(out_dir, f"{mode}.json")))

    def test_parameter_study(self):
        out_dir = self.run_experiment("parameter-study")
        results = pd.read_csv(os.path.join(out_dir, "parameter_study.csv"))
        self.assertEqual(len(results), 4)
        self.assertEqual(list(results.columns), ["alpha", "gamma_min", "p_suc", "d_bar"])

    def test_speed_distortion(self):
        out_dir = self.run_experiment("speed-distortion")
        results = pd.read_csv(os.path.join(out_dir, "speed_distortion.csv"))
        self.assertEqual(list(results["attack"]), ["bp", "bp", "cw", "cw"])
        self.assertEqual(list(results["grads"]), [10, 20, 10, 20])

    def test_adversarial_training(self):
        out_dir = self.run_experiment("adversarial-training")
        summary = pd.read_csv(os.path.join(out_dir, "summary.csv"))
        self.assertEqual(list(summary["model"]), ["undefended", "defended"])
        self.assertTrue(os.path.exists(os.path.join(out_dir, "defended.bin")))
        self.assertTrue(os.path.exists(os.path.join(out_dir, "training.json")))
