import math
import unittest

import numpy as np

from advbs.core import (
    Ball,
    QuantGrid,
    clip01,
    distortion,
    is_on_grid,
    l2_norm,
    linf_norm,
    normalize,
    project_ball,
    project_sphere,
    round_to_grid,
)
from advbs.errors import InvalidInput, ZeroVector
from advbs.types import NormKind


class Geometry(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_norms(self):
        v = np.array([3.0, -4.0])
        self.assertEqual(l2_norm(v), 5.0)
        self.assertEqual(linf_norm(v), 4.0)
        self.assertEqual(linf_norm(np.array([])), 0.0)

    def test_normalize(self):
        v = self.rng.standard_normal(7)
        self.assertAlmostEqual(l2_norm(normalize(v)), 1.0, places=12)
        with self.assertRaises(ZeroVector):
            normalize(np.zeros(3))

    def test_project_l2_ball(self):
        center = np.zeros(3)
        ball = Ball(center, 1.0)
        inside = np.array([0.1, 0.2, 0.3])
        np.testing.assert_array_equal(project_ball(inside, ball), inside)
        for _ in range(100):
            v = self.rng.standard_normal(3) * 5
            projected = project_ball(v, ball)
            self.assertLessEqual(l2_norm(projected - center), 1.0 + 1e-12)
            # idempotent
            np.testing.assert_allclose(project_ball(projected, ball), projected)

    def test_project_linf_ball(self):
        ball = Ball(np.array([0.5, 0.5]), 0.1, NormKind.LINF)
        projected = project_ball(np.array([0.9, 0.45]), ball)
        np.testing.assert_allclose(projected, [0.6, 0.45])

    def test_negative_radius(self):
        with self.assertRaises(InvalidInput):
            Ball(np.zeros(2), -1.0)

    def test_project_sphere(self):
        x = np.array([0.2, 0.4, 0.6])
        for _ in range(50):
            v = self.rng.random(3)
            self.assertAlmostEqual(distortion(x, project_sphere(v, x, 0.3)), 0.3, places=12)
        with self.assertRaises(ZeroVector):
            project_sphere(x, x, 0.3)

    def test_clip(self):
        np.testing.assert_array_equal(clip01(np.array([-0.5, 0.5, 1.5])), [0.0, 0.5, 1.0])


class Quantization(unittest.TestCase):
    def test_grid(self):
        self.assertAlmostEqual(QuantGrid().delta, 1.0 / 255.0)
        self.assertEqual(QuantGrid.deserialize({"levels": 5}), QuantGrid(5))
        with self.assertRaises(InvalidInput):
            QuantGrid(1)

    def test_round_to_grid(self):
        grid = QuantGrid(5)
        rounded = round_to_grid(np.array([0.1, 0.2, 0.9, 1.3, -0.2]), grid)
        np.testing.assert_array_equal(rounded, [0.0, 0.25, 1.0, 1.0, 0.0])

    def test_half_rounds_up(self):
        grid = QuantGrid(5)
        np.testing.assert_array_equal(round_to_grid(np.array([0.125]), grid), [0.25])

    def test_round_is_idempotent(self):
        grid = QuantGrid()
        rng = np.random.default_rng(5)
        for _ in range(20):
            v = rng.random(50) * 1.4 - 0.2
            rounded = round_to_grid(v, grid)
            self.assertTrue(is_on_grid(rounded, grid))
            np.testing.assert_array_equal(round_to_grid(rounded, grid), rounded)
            # rounding error is at most half a step inside [0, 1]
            self.assertLessEqual(
                linf_norm(rounded - clip01(v)), grid.delta / 2.0 + 1e-12
            )

    def test_is_on_grid(self):
        grid = QuantGrid(5)
        self.assertTrue(is_on_grid(np.array([0.0, 0.25, 1.0]), grid))
        self.assertFalse(is_on_grid(np.array([0.1]), grid))
        self.assertFalse(is_on_grid(np.array([1.25]), grid))
        self.assertTrue(is_on_grid(np.array([0.25 + 1e-12]), grid))

    def test_distortion(self):
        self.assertTrue(math.isclose(distortion(np.zeros(2), np.ones(2)), math.sqrt(2)))
