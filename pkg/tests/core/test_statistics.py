import math
import unittest

import numpy as np

from advbs.errors import InvalidInput
from advbs.statistics import basic_stats, ci_le_boudec, ci_tstudents, distortion_summary


class Statistics(unittest.TestCase):
    def test_basic_stats(self):
        stats = basic_stats([1.0, 2.0, 3.0])
        self.assertEqual(stats.mean, 2.0)
        self.assertEqual(stats.median, 2.0)
        self.assertTrue(math.isnan(basic_stats([0.0, 0.0]).cv))

    def test_tstudents(self):
        values = list(np.random.default_rng(1).normal(1.0, 0.1, 50))
        low, high = ci_tstudents(0.95, values)
        self.assertLess(low, np.mean(values))
        self.assertGreater(high, np.mean(values))
        self.assertEqual(ci_tstudents(0.95, [2.0]), (2.0, 2.0))

    def test_le_boudec(self):
        values = [float(v) for v in range(30)]
        low, high = ci_le_boudec(0.95, values)
        self.assertLessEqual(low, 14.5)
        self.assertGreaterEqual(high, 14.5)
        with self.assertRaises(InvalidInput):
            ci_le_boudec(0.9, values)

    def test_summary(self):
        self.assertEqual(distortion_summary([]), {"count": 0})
        few = distortion_summary([1.0, 2.0])
        self.assertNotIn("ci_le_boudec", few)
        many = distortion_summary([float(v) for v in range(25)])
        self.assertIn("ci_le_boudec", many)
        self.assertEqual(many["count"], 25)
