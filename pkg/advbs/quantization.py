"""
    Quantization-aware update operators and the model of the distortion
    added by rounding a perturbation onto the pixel lattice.
"""

import math
from dataclasses import dataclass
from multiprocessing.pool import ThreadPool
from typing import List, Tuple

import numpy as np
from scipy.special import betaln

from advbs.core import QuantGrid, distortion, l2_norm, round_to_grid
from advbs.errors import DomainError, InvalidInput

Q_OUT_BRACKET = 2.0
Q_OUT_STEPS = 24
Q_IN_BETA_MIN = 0.1

CF_MAX_ITERATIONS = 20000
CF_EPSILON = 1e-15
CF_TINY = 1e-300

MC_SHARDS = 8
MC_BATCH_ELEMENTS = 1 << 20


def q_out(
    x: np.ndarray,
    z: np.ndarray,
    y: np.ndarray,
    grid: QuantGrid,
    bracket: float = Q_OUT_BRACKET,
    steps: int = Q_OUT_STEPS,
) -> np.ndarray:
    """
    Round y + beta (z - y) with the scale beta in [0, bracket] whose quantized
    distortion from x is nearest to the real-valued distortion of z.
    The nominal beta = 1 wins ties.
    """
    target = distortion(x, z)
    direction = z - y

    def gap(beta: float) -> Tuple[float, np.ndarray]:
        image = round_to_grid(y + beta * direction, grid)
        return distortion(x, image) - target, image

    best_gap, best = gap(1.0)
    start_gap, start = gap(0.0)
    if abs(start_gap) < abs(best_gap):
        best_gap, best = start_gap, start
    # orientation of the distortion along the segment
    decreasing = start_gap > 0

    low, high = 0.0, bracket
    for _ in range(steps):
        mid = 0.5 * (low + high)
        mid_gap, image = gap(mid)
        if abs(mid_gap) < abs(best_gap):
            best_gap, best = mid_gap, image
        if (mid_gap > 0) == decreasing:
            low = mid
        else:
            high = mid
    return best


def q_in(
    z: np.ndarray, y: np.ndarray, grid: QuantGrid, beta_min: float = Q_IN_BETA_MIN
) -> np.ndarray:
    """
    Stretch short updates to at least beta_min before rounding so that the
    rounded iterate does not fall back onto y.
    """
    step = z - y
    length = l2_norm(step)
    if length == 0.0:
        return y.copy()
    beta = max(1.0, beta_min / length)
    return round_to_grid(y + beta * step, grid)


@dataclass(frozen=True)
class QuantPredictorInput:
    n: int
    delta: float
    rho: float

    def __post_init__(self):
        if self.n < 1 or self.delta <= 0 or self.rho < 0 or not math.isfinite(self.rho):
            raise InvalidInput(
                f"Invalid predictor input n={self.n}, delta={self.delta}, rho={self.rho}"
            )


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """
    Continued fraction of the incomplete beta function, modified Lentz evaluation.
    Converges quickly for x < (a + 1) / (a + b + 2).
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < CF_TINY:
        d = CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAX_ITERATIONS + 1):
        m2 = 2 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < CF_TINY:
            d = CF_TINY
        c = 1.0 + aa / c
        if abs(c) < CF_TINY:
            c = CF_TINY
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < CF_TINY:
            d = CF_TINY
        c = 1.0 + aa / c
        if abs(c) < CF_TINY:
            c = CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_EPSILON:
            return h
    raise DomainError(
        f"Incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}"
    )


def incomplete_reg_beta_pair(x: float, a: float, b: float) -> Tuple[float, float]:
    """
    Returns (I_x(a, b), 1 - I_x(a, b)), each evaluated on the side where it is
    accurate, so that tiny upper tails do not vanish in a subtraction.
    """
    if not (0.0 <= x <= 1.0) or a <= 0 or b <= 0:
        raise DomainError(f"Incomplete beta undefined for x={x}, a={a}, b={b}")
    if x == 0.0:
        return 0.0, 1.0
    if x == 1.0:
        return 1.0, 0.0
    log_front = a * math.log(x) + b * math.log1p(-x) - float(betaln(a, b))
    if x < (a + 1.0) / (a + b + 2.0):
        lower = math.exp(log_front) * _beta_continued_fraction(a, b, x) / a
        return lower, 1.0 - lower
    upper = math.exp(log_front) * _beta_continued_fraction(b, a, 1.0 - x) / b
    return 1.0 - upper, upper


def incomplete_reg_beta(x: float, a: float, b: float) -> float:
    return incomplete_reg_beta_pair(x, a, b)[0]


def _tail_probability(n: int, level_bound: float) -> float:
    """
    P(|U_j| >= s rho) for U uniform on the radius-rho sphere in n dimensions,
    with s = level_bound; (U_j / rho)^2 follows Beta(1/2, (n - 1) / 2).
    """
    if level_bound > 1.0:
        return 0.0
    if n == 1:
        # the sphere degenerates to the two points {-rho, rho}
        return 1.0
    return incomplete_reg_beta_pair(level_bound**2, 0.5, 0.5 * (n - 1))[1]


def expected_sq_distortion_exact(q: QuantPredictorInput) -> float:
    """
    E(D^2) after rounding each coordinate of a uniformly oriented perturbation
    of norm rho to the Delta-lattice, with border effects neglected.

    E(D^2) = n sum_l (l Delta)^2 P(|E_j| = l Delta)
           = n Delta^2 sum_{l >= 1} (2l - 1) P(|E_j| >= l Delta)
    """
    if q.rho == 0.0:
        return 0.0
    total = 0.0
    level = 1
    while True:
        bound = (2 * level - 1) * q.delta / (2.0 * q.rho)
        tail = _tail_probability(q.n, bound)
        term = (2 * level - 1) * tail
        if tail == 0.0 or term < total * 1e-18:
            break
        total += term
        level += 1
    return q.n * q.delta**2 * total


def expected_sq_distortion_highres(q: QuantPredictorInput) -> float:
    return q.rho**2 + q.n * q.delta**2 / 12.0


def _shard_sizes(samples: int, shards: int) -> List[int]:
    base, extra = divmod(samples, shards)
    return [base + (1 if idx < extra else 0) for idx in range(shards)]


def mc_quantized_distortion(
    q: QuantPredictorInput,
    samples: int,
    seed: int,
    jobs: int = 1,
    shards: int = MC_SHARDS,
) -> float:
    """
    Monte-Carlo estimate of E(D^2): uniform directions from normalized Gaussians,
    scaled to rho and rounded on the unbounded lattice.

    Samples are split over a fixed number of shards with spawned generators, so
    the estimate does not depend on the number of jobs.
    """
    if samples < 1:
        raise InvalidInput(f"Monte-Carlo estimate needs at least one sample, got {samples}")
    seeds = np.random.SeedSequence(seed).spawn(shards)
    sizes = _shard_sizes(samples, shards)
    batch = max(1, MC_BATCH_ELEMENTS // q.n)

    def shard(idx: int) -> float:
        rng = np.random.default_rng(seeds[idx])
        remaining = sizes[idx]
        total = 0.0
        while remaining > 0:
            count = min(batch, remaining)
            gauss = rng.standard_normal((count, q.n))
            points = q.rho * gauss / np.linalg.norm(gauss, axis=1, keepdims=True)
            rounded = q.delta * np.floor(np.abs(points) / q.delta + 0.5)
            total += float(np.sum(rounded * rounded))
            remaining -= count
        return total

    if jobs > 1:
        with ThreadPool(jobs) as pool:
            totals = pool.map(shard, range(shards))
    else:
        totals = [shard(idx) for idx in range(shards)]
    return sum(totals) / samples
