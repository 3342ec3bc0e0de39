import unittest

from advbs.attacks import FGSM, BoundaryProjection, BpParams, FgsmParams
from advbs.errors import BudgetExceeded, InvalidInput
from advbs.eval import AdversarialTrainer, BenchmarkRunner, adversarial_training
from advbs.models.mlp import TrainConfig
from advbs.types import TrainingMode
from tests.fixtures import moons, moons_model, sweep

TRAIN_CFG = TrainConfig(epochs=1, batch_size=16, learning_rate=0.1, seed=0, hidden_sizes=(16, 16))


class AdversarialTraining(unittest.TestCase):
    def test_budget(self):
        with self.assertRaises(BudgetExceeded):
            AdversarialTrainer(BoundaryProjection(BpParams(iters=30)), TRAIN_CFG)

    def test_zero_epochs(self):
        model = moons_model()
        trained = adversarial_training(model, moons(40), FGSM(FgsmParams(0.1)), 0)
        self.assertEqual(trained.serialize_bytes(), model.serialize_bytes())
        self.assertIsNot(trained, model)

    def test_negative_epochs(self):
        trainer = AdversarialTrainer(FGSM(FgsmParams(0.1)), TRAIN_CFG)
        with self.assertRaises(InvalidInput):
            trainer.train(moons_model(), moons(40), -1)

    def test_forge(self):
        model = moons_model()
        dataset = moons(30)
        trainer = AdversarialTrainer(FGSM(FgsmParams(0.1)), TRAIN_CFG)
        forged = trainer.forge(model, dataset)
        self.assertEqual(len(forged), len(dataset))
        self.assertTrue((forged.labels == dataset.labels).all())

    def test_finetune(self):
        model = moons_model()
        trainer = AdversarialTrainer(BoundaryProjection(BpParams(iters=10)), TRAIN_CFG)
        history = []
        defended = trainer.train(model, moons(60), 2, TrainingMode.FINETUNE, history)
        self.assertEqual(len(history), 2)
        self.assertEqual(defended.epochs, model.epochs + 2)
        self.assertEqual(defended.hidden_sizes, model.hidden_sizes)
        self.assertNotEqual(defended.serialize_bytes(), model.serialize_bytes())

    def test_scratch(self):
        model = moons_model()
        trainer = AdversarialTrainer(FGSM(FgsmParams(0.05)), TRAIN_CFG)
        defended = trainer.train(model, moons(60), 1, TrainingMode.SCRATCH)
        self.assertEqual(defended.epochs, 1)

    def test_robustness(self):
        model = moons_model()
        trainer = AdversarialTrainer(FGSM(FgsmParams(0.04), None), TRAIN_CFG)
        defended = trainer.train(model, moons(), 5)

        test_set = moons(100, seed=11)
        epsilons = [0.01 * k for k in range(1, 31)]
        reports = [
            sweep(BenchmarkRunner(m, test_set), lambda e: FGSM(FgsmParams(e), None), epsilons)
            for m in [model, defended]
        ]
        self.assertGreaterEqual(reports[1].d_bar, reports[0].d_bar)
        self.assertGreaterEqual(defended.accuracy(test_set), 0.85)
