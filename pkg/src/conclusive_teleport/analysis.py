"""Branch reports, closed-form comparison, parameter sweeps and Monte-Carlo estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .measurement import make_rng
from .protocols import (
    BranchRecord,
    ChannelParams,
    InputParams,
    ParameterError,
    TrajectorySampler,
    build_scheme,
    enumerate_leaves,
    success_probability,
)

DEFAULT_GRID = tuple(round(0.50 + 0.05 * i, 2) for i in range(11))


def closed_form_success(scheme: int, p: ChannelParams) -> float:
    """2 alpha^2 beta^2 for scheme 1, 2 beta^2 for scheme 2."""
    if scheme == 1:
        return 2.0 * p.alpha_sq * p.beta_sq
    if scheme == 2:
        return 2.0 * p.beta_sq
    raise ParameterError(f"scheme must be 1 or 2, got {scheme!r}")


@dataclass(frozen=True, eq=False)
class BranchReport:
    scheme: int
    channel: ChannelParams
    inputs: InputParams
    leaves: list[BranchRecord]
    total_success_probability: float
    closed_form_probability: float

    @property
    def max_abs_deviation(self) -> float:
        return abs(self.total_success_probability - self.closed_form_probability)

    @property
    def total_probability(self) -> float:
        return math.fsum(leaf.probability for leaf in self.leaves)


def report(scheme: int, ch: ChannelParams, inp: InputParams) -> BranchReport:
    leaves = enumerate_leaves(build_scheme(scheme, ch, inp))
    return BranchReport(
        scheme=scheme,
        channel=ch,
        inputs=inp,
        leaves=leaves,
        total_success_probability=success_probability(leaves),
        closed_form_probability=closed_form_success(scheme, ch),
    )


@dataclass(frozen=True)
class SweepRow:
    alpha_sq: float
    scheme1_prob: float
    scheme2_prob: float
    ratio: float


def make_grid(start: float, end: float, step: float) -> list[float]:
    """Inclusive arithmetic grid, rounded to 12 decimals to absorb float drift."""
    vals = (start, end, step)
    if not all(math.isfinite(v) for v in vals):
        raise ParameterError("grid bounds and step must be finite")
    if step <= 0:
        raise ParameterError(f"grid step must be positive, got {step!r}")
    if end < start:
        raise ParameterError(f"grid end {end!r} is below start {start!r}")
    n = int(math.floor((end - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def sweep(grid: Sequence[float], inp: InputParams) -> list[SweepRow]:
    """Enumerated success probabilities of both schemes along an alpha^2 grid.

    ``ratio`` is scheme1/scheme2; where both vanish (alpha^2 = 1) it takes its
    limiting value alpha^2.
    """
    rows = []
    for alpha_sq in grid:
        if not 0.5 <= alpha_sq <= 1.0:
            raise ParameterError(f"grid value alpha^2={alpha_sq!r} outside [0.5, 1]")
        ch = ChannelParams.from_alpha_sq(alpha_sq)
        p1 = report(1, ch, inp).total_success_probability
        p2 = report(2, ch, inp).total_success_probability
        ratio = p1 / p2 if p2 > 1e-12 else ch.alpha_sq
        rows.append(SweepRow(float(alpha_sq), p1, p2, ratio))
    return rows


@dataclass(frozen=True)
class McEstimate:
    trials: int
    successes: int

    @property
    def estimate(self) -> float:
        return self.successes / self.trials

    @property
    def std_error(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1.0 - p) / self.trials)

    def z_score(self, expected: float) -> Optional[float]:
        diff = self.estimate - expected
        if self.std_error == 0.0:
            return 0.0 if abs(diff) < 1e-12 else None
        return diff / self.std_error


def monte_carlo(
    scheme: int,
    ch: ChannelParams,
    inp: InputParams,
    trials: int,
    seed: int,
) -> McEstimate:
    """Count successes over ``trials`` sampled trajectories from one seeded stream."""
    if isinstance(trials, bool) or not isinstance(trials, (int, np.integer)) or trials < 1:
        raise ParameterError(f"trials must be a positive integer, got {trials!r}")
    rng = make_rng(seed)
    sampler = TrajectorySampler(build_scheme(scheme, ch, inp))
    successes = sum(sampler.play(rng).success for _ in range(int(trials)))
    return McEstimate(int(trials), successes)
