"""
    Benchmark protocol: attacks run on the images the clean model classifies
    correctly; success and distortions are recomputed from the returned images.
"""

from dataclasses import replace
from multiprocessing.pool import ThreadPool
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from advbs.attacks import Attack, BoundaryProjection, BpParams, TraceEntry
from advbs.core import distortion, linf_norm
from advbs.errors import EmptyEvaluationSet, MismatchedImageSets
from advbs.eval.records import DEFAULT_D_UPP, BenchmarkReport, EvalRecord, OperatingCharacteristic
from advbs.models.classifier import Classifier
from advbs.models.dataset import Dataset
from advbs.types import QuantizationMode
from advbs.utils import LoggingBase


def correctly_classified(model: Classifier, dataset: Dataset) -> List[int]:
    return [
        idx
        for idx in range(len(dataset))
        if model.predict(dataset.images[idx]) == int(dataset.labels[idx])
    ]


class BenchmarkRunner(LoggingBase):
    def __init__(
        self,
        model: Classifier,
        dataset: Dataset,
        jobs: int = 1,
        d_upp: float = DEFAULT_D_UPP,
    ):
        super().__init__()
        self._model = model
        self._dataset = dataset
        self._jobs = jobs
        self._d_upp = d_upp
        self._image_ids: Optional[List[int]] = None

    @staticmethod
    def typename() -> str:
        return "Eval.Benchmark"

    @property
    def image_ids(self) -> List[int]:
        if self._image_ids is None:
            self._image_ids = correctly_classified(self._model, self._dataset)
            self.logging.info(
                f"{len(self._image_ids)} of {len(self._dataset)} images classified correctly"
            )
        return self._image_ids

    def _attack_image(self, attack: Attack, image_id: int) -> EvalRecord:
        x = self._dataset.images[image_id]
        label = int(self._dataset.labels[image_id])
        outcome = attack.run(self._model, x, label)
        success = self._model.predict(outcome.adversarial) != label
        return EvalRecord(
            image_id=image_id,
            true_label=label,
            attack_name=attack.name(),
            grads_used=outcome.grads_used,
            success=success,
            distortion_l2=distortion(x, outcome.adversarial) if success else None,
            distortion_linf=linf_norm(outcome.adversarial - x) if success else None,
            stage1_iterations=outcome.stage1_iterations,
        )

    def run(self, attack: Attack, seed: int, config: Optional[dict] = None) -> BenchmarkReport:
        image_ids = self.image_ids
        if not image_ids:
            raise EmptyEvaluationSet("No image of the evaluation set is classified correctly")

        self.logging.info(f"Attack {attack.name()} on {len(image_ids)} images")
        if self._jobs > 1:
            with ThreadPool(self._jobs) as pool:
                records = pool.map(lambda idx: self._attack_image(attack, idx), image_ids)
        else:
            records = [self._attack_image(attack, idx) for idx in image_ids]

        report = BenchmarkReport(
            attack_name=attack.name(),
            records=records,
            config=config if config is not None else attack.serialize(),
            seed=seed,
            d_upp=self._d_upp,
            quantized=attack.grid is not None,
        )
        self.logging.info(
            f"Attack {attack.name()}: P_suc {report.p_suc}, D_bar {report.d_bar}, "
            f"{report.mean_grads} gradients per image"
        )
        return report


def run_benchmark(
    model: Classifier,
    dataset: Dataset,
    attack: Attack,
    seed: int,
    jobs: int = 1,
    d_upp: float = DEFAULT_D_UPP,
) -> BenchmarkReport:
    return BenchmarkRunner(model, dataset, jobs, d_upp).run(attack, seed)


def operating_characteristic(records: Sequence[EvalRecord]) -> OperatingCharacteristic:
    if not records:
        raise EmptyEvaluationSet("Operating characteristic of an empty record set")
    n = len(records)
    distortions = sorted(r.distortion_l2 for r in records if r.success)  # type: ignore
    thresholds: List[float] = []
    probabilities: List[float] = []
    for count, d in enumerate(distortions, start=1):
        if thresholds and thresholds[-1] == d:
            probabilities[-1] = count / n
        else:
            thresholds.append(d)
            probabilities.append(count / n)
    return OperatingCharacteristic(
        thresholds=thresholds,
        probabilities=probabilities,
        d_max=thresholds[-1] if thresholds else 0.0,
        p_suc=len(distortions) / n,
    )


def aggregate_multi_epsilon(
    reports: Sequence[BenchmarkReport], epsilons: Optional[Sequence[float]] = None
) -> BenchmarkReport:
    """
    Per image, the least distortion over the successful runs of a distortion-targeting
    attack swept over several budgets. Gradient counts add up over the runs.
    """
    if not reports:
        raise MismatchedImageSets("Nothing to aggregate")
    first = reports[0]
    if len(reports) == 1:
        return first
    for report in reports[1:]:
        if report.image_ids() != first.image_ids():
            raise MismatchedImageSets("Reports were computed on different image sets")
        if report.attack_name != first.attack_name:
            raise MismatchedImageSets(
                f"Cannot aggregate {report.attack_name} with {first.attack_name}"
            )

    records = []
    for runs in zip(*(report.records for report in reports)):
        grads = sum(run.grads_used for run in runs)
        successes = [run for run in runs if run.success]
        if successes:
            best = min(successes, key=lambda run: run.distortion_l2)  # type: ignore
            records.append(replace(best, grads_used=grads))
        else:
            records.append(replace(runs[0], grads_used=grads))
    return BenchmarkReport(
        attack_name=first.attack_name,
        records=records,
        config={"runs": [report.config for report in reports]},
        seed=first.seed,
        d_upp=first.d_upp,
        quantized=first.quantized,
        multi_epsilon=True,
        epsilons=list(epsilons) if epsilons is not None else [],
    )


ABLATION_MODES = [QuantizationMode.END, QuantizationMode.ROUND, QuantizationMode.ADAPTIVE]


def quantization_ablation(
    model: Classifier,
    dataset: Dataset,
    params: BpParams,
    seed: int,
    jobs: int = 1,
    d_upp: float = DEFAULT_D_UPP,
) -> Dict[QuantizationMode, BenchmarkReport]:
    """
    BP rounding only its output, rounding every iterate, and with the
    quantization-aware updates, on the same images.
    """
    runner = BenchmarkRunner(model, dataset, jobs, d_upp)
    return {
        mode: runner.run(BoundaryProjection(replace(params, mode=mode)), seed)
        for mode in ABLATION_MODES
    }


def boundary_crossing_stats(trace: Sequence[TraceEntry]) -> Tuple[int, Optional[float]]:
    """
    Number of changes of the adversarial flag along the trace, and the fraction of
    adversarial iterates from the first success on.
    """
    flags = [entry.adversarial for entry in trace]
    crossings = int(np.count_nonzero(np.diff(np.asarray(flags, dtype=np.int8)))) if flags else 0
    if True not in flags:
        return crossings, None
    after = flags[flags.index(True) :]
    return crossings, sum(after) / len(after)
