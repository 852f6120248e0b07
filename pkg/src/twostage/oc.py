"""Exact operating characteristics of a two-stage design.

Stage-1 successes ``X1 ~ Bin(n1, p1)``; of those, ``X12 | X1 ~ Bin(X1, p2/p1)``
are still successes at the long follow-up; Stage-2 successes
``X2 ~ Bin(n2, p2)``. The trial continues when ``X1 >= r1`` and rejects when
it continues and ``X12 + X2 >= r2``.
"""

from dataclasses import dataclass

import numpy as np

from .design import DesignError, OperatingCharacteristics, Rates, validate, validate_rates
from .probability import binom_cdf_lt, binom_pmf_vector, binom_tail_vector


def early_stop_prob(design, p1):
    """Pr[X1 < r1]: the trial terminates after Stage 1."""
    validate(design)
    return binom_cdf_lt(design.n1, design.r1, p1)


def reject_prob(design, rates):
    """Probability of rejecting the null at ``rates``.

    This is the exact significance level when ``rates`` is the null point and
    the power anywhere else. Summation limits skip every term that cannot
    contribute: ``x1`` starts at ``max(r1, r2 - n2)`` and ``x12`` at
    ``max(0, r2 - n2)``.
    """
    validate(design)
    validate_rates(rates)
    n1, n2, r1, r2 = design.n1, design.n2, design.r1, design.r2
    pmf1 = binom_pmf_vector(n1, rates.p1)
    # tail2[m] = Pr[X2 >= m]; indices below 0 clamp to m = 0
    tail2 = binom_tail_vector(n2, rates.p2)
    q = rates.ratio
    lo12 = max(0, r2 - n2)
    total = 0.0
    for x1 in range(max(r1, r2 - n2), n1 + 1):
        if pmf1[x1] == 0.0:
            continue
        x12 = np.arange(lo12, x1 + 1)
        cond = binom_pmf_vector(x1, q)[lo12:]
        need = np.maximum(r2 - x12, 0)
        total += pmf1[x1] * float(np.dot(cond, tail2[need]))
    return min(max(total, 0.0), 1.0)


def ess_bound(design, p1):
    """Upper bound n1 + n2 (1 - Pr[early stop]) on the expected enrollment."""
    return design.n1 + design.n2 * (1.0 - early_stop_prob(design, p1))


def power_bound(design, p1):
    """Largest attainable rejection probability at Stage-1 rate ``p1``.

    Rejection needs the trial to continue, so power never exceeds
    ``1 - Pr[early stop]``.
    """
    return 1.0 - early_stop_prob(design, p1)


def operating_characteristics(design, rates):
    pet = early_stop_prob(design, rates.p1)
    return OperatingCharacteristics(
        reject_prob=reject_prob(design, rates),
        early_stop_prob=pet,
        ess_bound=design.n1 + design.n2 * (1.0 - pet),
        power_bound=1.0 - pet,
    )


def rejection_table(n1, n2, rates):
    """Rejection probabilities for every threshold pair at once.

    Returns an array ``R`` of shape ``(n1 + 2, n1 + n2 + 2)`` with
    ``R[r1, r2]`` the rejection probability of design ``(n1, n2, r1, r2)``.
    The extra row and column (``r1 = n1 + 1``, ``r2 = n1 + n2 + 1``) are
    zero and only simplify slicing.
    """
    validate_rates(rates)
    n = n1 + n2
    pmf1 = binom_pmf_vector(n1, rates.p1)
    pmf2 = binom_pmf_vector(n2, rates.p2)
    q = rates.ratio
    # cond[x1, k] = Pr[X12 = k | x1]
    cond = np.zeros((n1 + 1, n1 + 1))
    for x1 in range(n1 + 1):
        cond[x1, : x1 + 1] = binom_pmf_vector(x1, q)
    # shift[k, t] = Pr[X2 = t - k]
    shift = np.zeros((n1 + 1, n + 1))
    for k in range(n1 + 1):
        shift[k, k : k + n2 + 1] = pmf2
    joint = pmf1[:, None] * (cond @ shift)  # Pr[X1 = x1, X12 + X2 = t]
    # restrict to X1 >= r1 by summing rows from the bottom
    by_r1 = np.zeros((n1 + 2, n + 1))
    by_r1[: n1 + 1] = np.cumsum(joint[::-1], axis=0)[::-1]
    table = np.zeros((n1 + 2, n + 2))
    table[:, : n + 1] = np.cumsum(by_r1[:, ::-1], axis=1)[:, ::-1]
    np.clip(table, 0.0, 1.0, out=table)
    return table


@dataclass(frozen=True)
class PowerCurve:
    fixed_p1: float
    grid: tuple  # of (p2, reject_prob)


@dataclass(frozen=True)
class PowerSurface:
    p1_grid: tuple
    p2_grid: tuple
    grid: np.ndarray  # [i, j] at (p1_grid[i], p2_grid[j]); NaN where p2 > p1

    def cells(self):
        """Yield ``(p1, p2, reject_prob)`` for every defined cell, row-major."""
        for i, p1 in enumerate(self.p1_grid):
            for j, p2 in enumerate(self.p2_grid):
                if not np.isnan(self.grid[i, j]):
                    yield p1, p2, float(self.grid[i, j])


def power_curve(design, p1, p2_grid):
    """Rejection probability along ``p2_grid`` with the Stage-1 rate held at ``p1``."""
    points = []
    previous = None
    for p2 in p2_grid:
        if p2 > p1:
            raise DesignError(f"grid point p2={p2} exceeds p1={p1}")
        if previous is not None and p2 <= previous:
            raise DesignError("p2 grid must be strictly increasing")
        previous = p2
        points.append((p2, reject_prob(design, Rates(p1, p2))))
    return PowerCurve(p1, tuple(points))


def early_stop_curve(design, p1_grid):
    return [(p1, early_stop_prob(design, p1)) for p1 in p1_grid]


def power_surface(design, p1_grid, p2_grid):
    values = np.full((len(p1_grid), len(p2_grid)), np.nan)
    for i, p1 in enumerate(p1_grid):
        for j, p2 in enumerate(p2_grid):
            if p2 <= p1:
                values[i, j] = reject_prob(design, Rates(p1, p2))
    return PowerSurface(tuple(p1_grid), tuple(p2_grid), values)


def probability_grid(stop, step=0.01, start=0.0):
    """Evenly spaced points from ``start`` to ``stop`` inclusive, rounded to the step."""
    count = int(round((stop - start) / step))
    digits = max(0, -int(np.floor(np.log10(step)))) + 2
    points = [round(start + i * step, digits) for i in range(count + 1)]
    if points[-1] > stop:
        points[-1] = stop
    return points
