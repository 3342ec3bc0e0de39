import csv
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from advbs.statistics import distortion_summary
from advbs.utils import format_float, serialize

DEFAULT_D_UPP = 2.0

RECORD_COLUMNS = [
    "image_id",
    "true_label",
    "attack",
    "grads_used",
    "success",
    "distortion_l2",
    "distortion_linf",
]


@dataclass(frozen=True)
class EvalRecord:
    """
    Result of one attack on one correctly classified image.
    Distortions are absent for failures.
    """

    image_id: int
    true_label: int
    attack_name: str
    grads_used: int
    success: bool
    distortion_l2: Optional[float]
    distortion_linf: Optional[float]
    stage1_iterations: Optional[int] = None

    def row(self) -> List[str]:
        return [
            str(self.image_id),
            str(self.true_label),
            self.attack_name,
            str(self.grads_used),
            "true" if self.success else "false",
            format_float(self.distortion_l2),
            format_float(self.distortion_linf),
        ]

    def serialize(self) -> dict:
        return {
            "image_id": self.image_id,
            "true_label": self.true_label,
            "attack": self.attack_name,
            "grads_used": self.grads_used,
            "success": self.success,
            "distortion_l2": self.distortion_l2,
            "distortion_linf": self.distortion_linf,
            "stage1_iterations": self.stage1_iterations,
        }


@dataclass(frozen=True)
class OperatingCharacteristic:
    """
    Success probability among attacks of distortion at most D, sampled at
    every distinct successful distortion.
    """

    thresholds: List[float]
    probabilities: List[float]
    d_max: float
    p_suc: float

    def value(self, d: float) -> float:
        pos = bisect_right(self.thresholds, d)
        return self.probabilities[pos - 1] if pos > 0 else 0.0

    def write_csv(self, path: str):
        with open(path, "w", newline="") as out_f:
            writer = csv.writer(out_f, delimiter=",", lineterminator="\n")
            writer.writerow(["D", "P"])
            for d, p in zip(self.thresholds, self.probabilities):
                writer.writerow([format_float(d), format_float(p)])

    def serialize(self) -> dict:
        return {
            "thresholds": self.thresholds,
            "probabilities": self.probabilities,
            "d_max": self.d_max,
            "p_suc": self.p_suc,
        }


@dataclass
class BenchmarkReport:
    attack_name: str
    records: List[EvalRecord]
    config: dict
    seed: int
    d_upp: float = DEFAULT_D_UPP
    quantized: bool = True
    multi_epsilon: bool = False
    epsilons: List[float] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def successes(self) -> List[EvalRecord]:
        return [record for record in self.records if record.success]

    @property
    def distortions(self) -> List[float]:
        return [record.distortion_l2 for record in self.successes]  # type: ignore

    @property
    def p_suc(self) -> float:
        return len(self.successes) / self.n if self.n else 0.0

    @property
    def d_bar(self) -> Optional[float]:
        distortions = self.distortions
        if not distortions:
            return None
        return float(np.mean(distortions))

    @property
    def p_upp(self) -> float:
        if not self.n:
            return 0.0
        return sum(1 for d in self.distortions if d <= self.d_upp) / self.n

    @property
    def mean_grads(self) -> float:
        return float(np.mean([record.grads_used for record in self.records])) if self.n else 0.0

    @property
    def mean_stage1(self) -> Optional[float]:
        lengths = [r.stage1_iterations for r in self.records if r.stage1_iterations is not None]
        return float(np.mean(lengths)) if lengths else None

    def image_ids(self) -> List[int]:
        return [record.image_id for record in self.records]

    def aggregates(self) -> Dict[str, Optional[float]]:
        return {
            "n": self.n,
            "n_suc": len(self.successes),
            "p_suc": self.p_suc,
            "d_bar": self.d_bar,
            "p_upp": self.p_upp,
            "d_upp": self.d_upp,
            "mean_grads": self.mean_grads,
            "mean_stage1_iterations": self.mean_stage1,
        }

    def serialize(self) -> dict:
        return {
            "attack": self.attack_name,
            "aggregates": self.aggregates(),
            "statistics": distortion_summary(self.distortions),
            "config": self.config,
            "seed": self.seed,
            "quantized": self.quantized,
            "multi_epsilon": self.multi_epsilon,
            "epsilons": self.epsilons,
        }

    def write_csv(self, path: str):
        with open(path, "w", newline="") as out_f:
            writer = csv.writer(out_f, delimiter=",", lineterminator="\n")
            writer.writerow(RECORD_COLUMNS)
            for record in self.records:
                writer.writerow(record.row())

    def write_json(self, path: str):
        with open(path, "w") as out_f:
            out_f.write(serialize(self))
            out_f.write("\n")
