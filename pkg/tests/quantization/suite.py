import unittest

from .test_operators import QuantizedUpdates
from .test_predictor import IncompleteBeta, Predictor


def suite():
    suite = unittest.TestSuite()
    suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(QuantizedUpdates))
    suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(IncompleteBeta))
    suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(Predictor))
    return suite
