import os
import unittest

from advbs.attacks import (
    FGSM,
    IFGSM,
    PGD2,
    BoundaryProjection,
    BpParams,
    FgsmParams,
    IfgsmParams,
    Pgd2Params,
)
from advbs.config import AdvBSConfig
from advbs.eval import BenchmarkRunner, quantization_ablation
from advbs.models import MlpModel, load_idx, train_sgd
from advbs.models.mlp import TrainConfig
from advbs.types import NormKind, QuantizationMode
from tests.fixtures import sweep

MNIST_DIR = os.environ.get("ADVBS_MNIST_DIR")


@unittest.skipUnless(MNIST_DIR, "set ADVBS_MNIST_DIR to the directory of the MNIST IDX files")
class MnistBenchmark(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        train = load_idx(
            os.path.join(MNIST_DIR, "train-images-idx3-ubyte"),
            os.path.join(MNIST_DIR, "train-labels-idx1-ubyte"),
            limit=10000,
        )
        cls.test_set = load_idx(
            os.path.join(MNIST_DIR, "t10k-images-idx3-ubyte"),
            os.path.join(MNIST_DIR, "t10k-labels-idx1-ubyte"),
            limit=200,
        )
        cfg = TrainConfig(epochs=5, batch_size=32, learning_rate=0.1, seed=0, hidden_sizes=(128,))
        model = MlpModel.initialize(train.input_dim, cfg.hidden_sizes, 10, cfg.seed)
        cls.model = train_sgd(model, train, cfg)
        cls.accuracy = cls.model.accuracy(cls.test_set)
        cls.runner = BenchmarkRunner(cls.model, cls.test_set, jobs=4)

    def test_accuracy(self):
        self.assertGreaterEqual(self.accuracy, 0.90)

    def test_bp_success(self):
        report = self.runner.run(BoundaryProjection(BpParams(iters=20)), seed=0)
        self.assertGreaterEqual(report.p_suc, 0.95)
        self.assertLessEqual(report.mean_stage1, 10)

    def test_ranking(self):
        config = AdvBSConfig()
        l2, linf = config.epsilons(NormKind.L2), config.epsilons(NormKind.LINF)
        bp = self.runner.run(BoundaryProjection(BpParams(iters=20)), seed=0)
        pgd2 = sweep(self.runner, lambda e: PGD2(Pgd2Params(e)), l2)
        ifgsm = sweep(self.runner, lambda e: IFGSM(IfgsmParams(e, alpha=e / 4)), linf)
        fgsm = sweep(self.runner, lambda e: FGSM(FgsmParams(e)), linf)
        self.assertLessEqual(bp.d_bar, pgd2.d_bar)
        self.assertLessEqual(pgd2.d_bar, ifgsm.d_bar)
        self.assertLessEqual(ifgsm.d_bar, fgsm.d_bar)

    def test_longer_refinement(self):
        short = self.runner.run(BoundaryProjection(BpParams(iters=20)), seed=0)
        long = self.runner.run(BoundaryProjection(BpParams(iters=100)), seed=0)
        self.assertLessEqual(long.d_bar, short.d_bar)

    def test_quantization_ablation(self):
        reports = quantization_ablation(self.model, self.test_set, BpParams(iters=20), 0, jobs=4)
        for report in reports.values():
            self.assertGreaterEqual(report.p_suc, 0.95)
        adaptive, rounded, end = (
            reports[QuantizationMode.ADAPTIVE].d_bar,
            reports[QuantizationMode.ROUND].d_bar,
            reports[QuantizationMode.END].d_bar,
        )
        self.assertLessEqual(adaptive, rounded)
        self.assertLessEqual(rounded, end)
