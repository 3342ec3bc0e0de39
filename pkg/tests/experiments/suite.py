import unittest

from .test_experiments import ExperimentConfigs, Experiments


def suite():
    suite = unittest.TestSuite()
    suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(ExperimentConfigs))
    suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(Experiments))
    return suite
