import logging
import math
import unittest
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple, cast

import numpy as np
import testtools

from advbs.core import as_image, distortion, is_on_grid, round_to_grid
from advbs.models import Classifier, GradientCounter, MlpModel, Toy2DModel
from advbs.types import Attacks
from advbs.utils import ColoredWrapper

if TYPE_CHECKING:
    from advbs import AdvBS

attacks_all = [attack.value for attack in Attacks]

MLP_INPUTS = 8
MLP_DIM = 16


class TestSequenceMeta(type):
    def __init__(cls, name, bases, attrs, attacks, model_name):
        type.__init__(cls, name, bases, attrs)
        cls.model_name = model_name

    def __new__(mcs, name, bases, dict, attacks, model_name):
        def gen_test(attack_name):
            def test(self):

                log_name = f"Regression-{model_name}-{attack_name}"
                logger = logging.getLogger(log_name)
                logger.setLevel(logging.INFO)
                logging_wrapper = ColoredWrapper(log_name, logger)

                model = self.get_model()
                attack = self.client.get_attack(attack_name, self.attack_params(attack_name))
                logging_wrapper.info(f"Begin regression test of {attack_name} on {model_name}.")

                failures = []
                for x, label in self.get_inputs(model):
                    counter = GradientCounter(model)
                    outcome = attack.run(counter, x, label)
                    adv = outcome.adversarial
                    if np.any(adv < 0.0) or np.any(adv > 1.0):
                        failures.append("image outside of [0, 1]")
                    if not is_on_grid(adv, attack.grid):
                        failures.append("image off the quantization grid")
                    if outcome.grads_used != counter.calls or counter.calls > attack.budget():
                        failures.append(
                            f"{counter.calls} gradients, {outcome.grads_used} reported, "
                            f"budget {attack.budget()}"
                        )
                    if outcome.success != (model.predict(adv) != label):
                        failures.append("success flag differs from the prediction")
                    if not math.isclose(outcome.distortion_l2, distortion(x, adv), abs_tol=1e-12):
                        failures.append("distortion differs from the returned image")

                if failures:
                    for failure in failures:
                        logging_wrapper.error(f"{attack_name}: {failure}")
                    raise RuntimeError(f"Test of {attack_name} on {model_name} failed!")
                logging_wrapper.info(f"{attack_name} success on {model_name}")

            return test

        for attack in attacks:
            test_name = f"test_{model_name}_{attack}"
            dict[test_name] = gen_test(attack)
        return type.__new__(mcs, name, bases, dict)


class ToyTestSequence(
    unittest.TestCase,
    metaclass=TestSequenceMeta,
    attacks=attacks_all,
    model_name="toy",
):
    def get_model(self) -> Classifier:
        return self.client.get_toy_model()

    def attack_params(self, attack_name: str) -> dict:
        return self.client.config.trace2d_defaults()["attacks"].get(attack_name, {})

    def get_inputs(self, model: Classifier) -> List[Tuple[np.ndarray, int]]:
        grid = self.client.config.grid
        starts = self.client.config.trace2d_defaults()["starts"]
        inputs = []
        for start in starts:
            x = round_to_grid(as_image(start), grid)
            inputs.append((x, cast(Toy2DModel, model).inside_label))
        return inputs


class MlpTestSequence(
    unittest.TestCase,
    metaclass=TestSequenceMeta,
    attacks=attacks_all,
    model_name="mlp",
):
    def get_model(self) -> Classifier:
        return MlpModel.initialize(MLP_DIM, (8,), 3, seed=0)

    def attack_params(self, attack_name: str) -> dict:
        return {}

    def get_inputs(self, model: Classifier) -> List[Tuple[np.ndarray, int]]:
        grid = self.client.config.grid
        rng = np.random.default_rng(0)
        images = round_to_grid(rng.random((MLP_INPUTS, MLP_DIM)), grid)
        return [(x, model.predict(x)) for x in images]


class TracingStreamResult(testtools.StreamResult):
    all_correct: bool
    output: Dict[str, bytes] = {}

    def __init__(self):
        self.all_correct = True
        self.success = set()
        self.failures = set()

    # no way to directly access test instance from here
    def status(self, *args, **kwargs):
        self.all_correct = self.all_correct and (kwargs["test_status"] in ["inprogress", "success"])
        test_name = kwargs["test_id"].split(".")[-1]
        if not kwargs["test_status"]:
            test_id = kwargs["test_id"]
            if test_id not in self.output:
                self.output[test_id] = b""
            self.output[test_id] += kwargs["file_bytes"]
        elif kwargs["test_status"] == "fail":
            print("\n-------------\n")
            print("{0[test_id]}: {0[test_status]}".format(kwargs))
            output = self.output.get(kwargs["test_id"], b"").decode()
            print("{0[test_id]}: {1}".format(kwargs, output))
            print("\n-------------\n")
            self.failures.add(test_name)
        elif kwargs["test_status"] == "success":
            self.success.add(test_name)


def regression_suite(advbs_client: "AdvBS", attack_name: Optional[str] = None) -> bool:
    """
    Integrity checks of every attack on the 2D toy and a small random MLP.

    :return: True when any test failed
    """
    suite = unittest.TestSuite()
    suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(ToyTestSequence))
    suite.addTest(unittest.defaultTestLoader.loadTestsFromTestCase(MlpTestSequence))

    tests = []
    # mypy is confused here
    for case in suite:
        for test in case:  # type: ignore
            test_name = cast(unittest.TestCase, test)._testMethodName
            if not attack_name or test_name.endswith(f"_{attack_name}"):
                test.client = advbs_client  # type: ignore
                tests.append(test)
            else:
                print(f"Skip test {test_name}")

    concurrent_suite = testtools.ConcurrentStreamTestSuite(lambda: ((test, None) for test in tests))
    result = TracingStreamResult()
    result.startTestRun()
    concurrent_suite.run(result)
    result.stopTestRun()
    print(f"Succesfully executed {len(result.success)} out of {len(tests)} attack tests")
    for suc in result.success:
        print(f"- {suc}")
    if len(result.failures):
        print(f"Failures when executing {len(result.failures)} out of {len(tests)} attack tests")
        for failure in result.failures:
            print(f"- {failure}")
    return not result.all_correct
