import unittest

from .test_commands import (
    BenchCommand,
    QuantPredCommand,
    RegressionCommand,
    Trace2DCommand,
    TrainCommand,
)


def suite():
    suite = unittest.TestSuite()
    for case in [TrainCommand, BenchCommand, QuantPredCommand, Trace2DCommand, RegressionCommand]:
        suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(case))
    return suite
