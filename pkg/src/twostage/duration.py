"""How many Stage-1 patients are needed before the continue/stop decision is known.

Patients are observed one at a time. The decision is settled as soon as
``s = r1`` successes (continue) or ``t = n1 - r1 + 1`` failures (stop) have
accrued, whichever comes first. The index of that patient follows a minimum
negative binomial law; with ``s == t`` it is the riff-shuffle distribution.
"""

import math
from dataclasses import dataclass, field

from .design import DesignError, validate
from .probability import _check_count, _check_prob, nbinom_term


@dataclass(frozen=True)
class Stage1DurationDistribution:
    s: int
    t: int
    p: float
    pmf: dict = field(repr=False)

    @property
    def support(self):
        return min(self.s, self.t), self.s + self.t - 1

    @property
    def mean(self):
        return math.fsum(y * w for y, w in self.pmf.items())

    @property
    def sd(self):
        m = self.mean
        var = math.fsum((y - m) ** 2 * w for y, w in self.pmf.items())
        return math.sqrt(max(var, 0.0))


def branch_probabilities(s, t, p, y):
    """Split Pr[Y = y] into (ends on the s-th success, ends on the t-th failure)."""
    top = s + t - 1
    win = nbinom_term(s, y - s, p) if s <= y <= top else 0.0
    # failure branch: same kernel with the roles of success and failure swapped
    lose = nbinom_term(t, y - t, 1.0 - p) if t <= y <= top else 0.0
    return win, lose


def duration_pmf(s, t, p):
    """Distribution of the first index with ``s`` successes or ``t`` failures.

    Args:
        s: Successes that settle the decision (at least 1).
        t: Failures that settle the decision (at least 1).
        p: Per-patient success probability.

    Returns:
        A :class:`Stage1DurationDistribution` whose pmf is dense over
        ``min(s, t) .. s + t - 1``. At ``p = 1`` (``p = 0``) the law is a point
        mass at ``s`` (``t``).
    """
    s = _check_count("s", s)
    t = _check_count("t", t)
    _check_prob(p)
    if s < 1 or t < 1:
        raise ValueError("s and t must both be at least 1")
    lo, hi = min(s, t), s + t - 1
    pmf = {y: 0.0 for y in range(lo, hi + 1)}
    if p == 1.0:
        pmf[s] = 1.0
    elif p == 0.0:
        pmf[t] = 1.0
    else:
        for y in pmf:
            win, lose = branch_probabilities(s, t, p, y)
            pmf[y] = win + lose
    return Stage1DurationDistribution(s, t, p, pmf)


def duration_moments(s, t, p):
    dist = duration_pmf(s, t, p)
    return dist.mean, dist.sd


def design_parameters(design):
    """Map a design onto ``(s, t)``; requires ``r1 >= 1``."""
    validate(design)
    if design.r1 < 1:
        raise DesignError("not applicable: r1 = 0 means Stage 1 never stops the trial")
    return design.r1, design.n1 - design.r1 + 1


def design_duration(design, p1):
    """Mean and standard deviation of the Stage-1 decision index at rate ``p1``."""
    s, t = design_parameters(design)
    return duration_moments(s, t, p1)
