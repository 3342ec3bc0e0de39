import math
import unittest

import numpy as np
from scipy.special import betainc

from advbs.errors import DomainError, InvalidInput
from advbs.quantization import (
    QuantPredictorInput,
    expected_sq_distortion_exact,
    expected_sq_distortion_highres,
    incomplete_reg_beta,
    incomplete_reg_beta_pair,
    mc_quantized_distortion,
)

DELTA = 1.0 / 255.0


def sqrt_exact(n: int, rho: float) -> float:
    return math.sqrt(expected_sq_distortion_exact(QuantPredictorInput(n, DELTA, rho)))


class IncompleteBeta(unittest.TestCase):
    def test_against_scipy(self):
        for a, b in [(0.5, 0.5), (0.5, 49.5), (2.0, 3.0), (0.5, 5000.0)]:
            for x in [1e-6, 0.001, 0.1, 0.5, 0.9, 0.999]:
                self.assertAlmostEqual(
                    incomplete_reg_beta(x, a, b), float(betainc(a, b, x)), places=10
                )

    def test_pair_sums_to_one(self):
        lower, upper = incomplete_reg_beta_pair(0.3, 0.5, 10.0)
        self.assertAlmostEqual(lower + upper, 1.0, places=14)
        self.assertEqual(incomplete_reg_beta_pair(0.0, 1.0, 1.0), (0.0, 1.0))
        self.assertEqual(incomplete_reg_beta_pair(1.0, 1.0, 1.0), (1.0, 0.0))

    def test_domain(self):
        with self.assertRaises(DomainError):
            incomplete_reg_beta(1.5, 1.0, 1.0)
        with self.assertRaises(DomainError):
            incomplete_reg_beta(0.5, 0.0, 1.0)


class Predictor(unittest.TestCase):
    def test_invalid(self):
        with self.assertRaises(InvalidInput):
            QuantPredictorInput(0, DELTA, 1.0)
        with self.assertRaises(InvalidInput):
            QuantPredictorInput(10, 0.0, 1.0)
        with self.assertRaises(InvalidInput):
            QuantPredictorInput(10, DELTA, -1.0)
        with self.assertRaises(InvalidInput):
            mc_quantized_distortion(QuantPredictorInput(10, DELTA, 1.0), 0, seed=0)

    def test_zero_norm(self):
        self.assertEqual(sqrt_exact(100, 0.0), 0.0)
        self.assertEqual(sqrt_exact(100, 1e-4), 0.0)

    def test_small_norm_large_image(self):
        # rounding swallows the whole perturbation
        self.assertLess(sqrt_exact(3 * 299 * 299, 0.05), 1e-3)

    def test_highres_agreement(self):
        q = QuantPredictorInput(1000, DELTA, 5.0)
        ratio = math.sqrt(expected_sq_distortion_exact(q) / expected_sq_distortion_highres(q))
        self.assertLess(abs(ratio - 1.0), 0.01)

    def test_monotone(self):
        for n in [100, 1000]:
            values = [sqrt_exact(n, rho) for rho in np.linspace(0.0, 3.0, 31)]
            self.assertTrue(all(b >= a - 1e-12 for a, b in zip(values, values[1:])))

    def test_one_dimension(self):
        # the perturbation is +-rho exactly
        q = QuantPredictorInput(1, 0.25, 0.3)
        self.assertAlmostEqual(expected_sq_distortion_exact(q), 0.25**2)

    def test_monte_carlo(self):
        for n in [100, 1000]:
            for rho in [0.5, 2.0, 5.0]:
                q = QuantPredictorInput(n, DELTA, rho)
                estimate = math.sqrt(mc_quantized_distortion(q, 10000, seed=n))
                exact = math.sqrt(expected_sq_distortion_exact(q))
                self.assertLess(abs(estimate - exact) / exact, 0.03, f"n={n}, rho={rho}")

    def test_monte_carlo_jobs(self):
        q = QuantPredictorInput(50, DELTA, 1.0)
        self.assertEqual(
            mc_quantized_distortion(q, 1000, seed=3, jobs=1),
            mc_quantized_distortion(q, 1000, seed=3, jobs=4),
        )
