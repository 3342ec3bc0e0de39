import math
import unittest

import numpy as np

from advbs.errors import DimensionMismatch
from advbs.models import GradientCounter, Loss, Toy2DModel, margin_loss, nll_loss, softmax
from tests.fixtures import random_mlp

FD_STEP = 1e-5


def finite_difference(model, x, label, loss):
    grad = np.zeros_like(x)
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = FD_STEP
        grad[j] = (model.loss(x + step, label, loss) - model.loss(x - step, label, loss)) / (
            2 * FD_STEP
        )
    return grad


class Losses(unittest.TestCase):
    def test_softmax(self):
        probs = softmax(np.array([1000.0, 1000.0]))
        np.testing.assert_allclose(probs, [0.5, 0.5])

    def test_nll(self):
        self.assertEqual(nll_loss(np.array([1.0, 0.0]), 0), 0.0)
        self.assertEqual(nll_loss(np.array([1.0, 0.0]), 1), -math.inf)

    def test_margin(self):
        probs = np.array([0.2, 0.8])
        self.assertEqual(margin_loss(probs, 0), 0.0)
        self.assertAlmostEqual(margin_loss(probs, 1), math.log(4.0))
        self.assertAlmostEqual(margin_loss(probs, 0, margin=2.0), 2.0 - math.log(4.0))

    def test_loss_from_logits(self):
        model = random_mlp()
        x = np.random.default_rng(0).random(model.input_dim)
        label = model.predict(x)
        self.assertAlmostEqual(
            model.loss(x, label), math.log(model.forward(x)[label]), places=10
        )
        self.assertGreaterEqual(model.loss(x, label, Loss.margin_of(0.0)), 0.0)

    def test_dimension_mismatch(self):
        model = random_mlp(input_dim=4)
        with self.assertRaises(DimensionMismatch):
            model.predict(np.zeros(5))


class GradientCheck(unittest.TestCase):
    def test_nll_gradient(self):
        rng = np.random.default_rng(3)
        model = random_mlp(input_dim=10, hidden=(8, 6), num_classes=3, seed=1)
        for _ in range(100):
            x = rng.random(10)
            label = int(rng.integers(0, 3))
            gradient = model.input_gradient(x, label)
            numeric = finite_difference(model, x, label, Loss.nll())
            error = np.linalg.norm(gradient - numeric) / max(np.linalg.norm(gradient), 1e-12)
            self.assertLessEqual(error, 1e-4)

    def test_margin_gradient(self):
        rng = np.random.default_rng(4)
        model = random_mlp(input_dim=6, hidden=(5,), num_classes=4, seed=2)
        loss = Loss.margin_of(1.0)
        for _ in range(20):
            x = rng.random(6)
            label = model.predict(x)
            gradient = model.input_gradient(x, label, loss)
            numeric = finite_difference(model, x, label, loss)
            np.testing.assert_allclose(gradient, numeric, atol=1e-6)

    def test_counter(self):
        model = random_mlp()
        counter = GradientCounter(model)
        x = np.full(model.input_dim, 0.5)
        counter.input_gradient(x, 0)
        counter.input_gradient(x, 1)
        counter.predict(x)
        self.assertEqual(counter.calls, 2)
        np.testing.assert_array_equal(counter.logits(x), model.logits(x))


class ToyModel(unittest.TestCase):
    def test_regions(self):
        model = Toy2DModel()
        self.assertEqual(model.predict(np.array([0.45, 0.5])), model.inside_label)
        self.assertNotEqual(model.predict(np.array([0.5, 0.9])), model.inside_label)
        self.assertEqual(model.forward(np.array([0.9, 0.9])).shape, (2,))

    def test_gradient(self):
        model = Toy2DModel()
        x = np.array([0.4, 0.55])
        numeric = finite_difference(model, x, 0, Loss.nll())
        np.testing.assert_allclose(model.input_gradient(x, 0), numeric, rtol=1e-5)
        np.testing.assert_array_equal(model.input_gradient(np.array([0.5, 0.5]), 0), [0, 0])

    def test_circle(self):
        model = Toy2DModel(axes=(1.0, 1.0))
        x = np.array([0.6, 0.5])
        gradient = model.input_gradient(x, 0)
        # radial: parallel to x - center
        self.assertAlmostEqual(gradient[1], 0.0)

    def test_serialization(self):
        model = Toy2DModel(radius=0.2, inside_label=1)
        self.assertEqual(Toy2DModel.deserialize(model.serialize()).serialize(), model.serialize())
