import unittest

from .test_baselines import CarliniWagnerAttack, DdnAttack, FastGradient, ProjectedGradient
from .test_bp import BoundaryGeometry, BoundaryProjectionAttack, Schedule


def suite():
    suite = unittest.TestSuite()
    for case in [
        FastGradient,
        ProjectedGradient,
        CarliniWagnerAttack,
        DdnAttack,
        Schedule,
        BoundaryGeometry,
        BoundaryProjectionAttack,
    ]:
        suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(case))
    return suite
