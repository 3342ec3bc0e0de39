import math
from collections import namedtuple
from typing import List, Tuple

import numpy as np
import scipy.stats as st

from advbs.errors import InvalidInput

BasicStats = namedtuple("BasicStats", "mean median std cv")

# z(alpha / 2) of the normal distribution
Z_VALUES = {0.95: 1.96, 0.99: 2.576}


def basic_stats(values: List[float]) -> BasicStats:
    mean = np.mean(values)
    median = np.median(values)
    std = np.std(values)
    cv = std / mean * 100 if mean != 0 else math.nan
    return BasicStats(float(mean), float(median), float(std), float(cv))


def ci_tstudents(alpha: float, values: List[float]) -> Tuple[float, float]:
    mean = np.mean(values)
    if len(values) < 2:
        return float(mean), float(mean)
    low, high = st.t.interval(alpha, len(values) - 1, loc=mean, scale=st.sem(values))
    return float(low), float(high)


def ci_le_boudec(alpha: float, values: List[float]) -> Tuple[float, float]:
    """
    Distribution-free confidence interval of the median.
    """
    z_value = Z_VALUES.get(alpha)
    if z_value is None:
        raise InvalidInput(f"No normal quantile tabulated for confidence level {alpha}")

    sorted_values = sorted(values)
    n = len(values)
    low_pos = max(math.floor((n - z_value * math.sqrt(n)) / 2), 0)
    high_pos = min(math.ceil(1 + (n + z_value * math.sqrt(n)) / 2), n - 1)
    return (sorted_values[low_pos], sorted_values[high_pos])


def distortion_summary(distortions: List[float], alpha: float = 0.95) -> dict:
    """
    Statistics of the distortions of successful attacks; the non-parametric
    interval needs more than 20 samples.
    """
    if not distortions:
        return {"count": 0}
    stats = basic_stats(distortions)
    summary = {"count": len(distortions), **stats._asdict()}
    summary["ci_tstudents"] = list(ci_tstudents(alpha, distortions))
    if len(distortions) > 20:
        summary["ci_le_boudec"] = list(ci_le_boudec(alpha, distortions))
    return summary
