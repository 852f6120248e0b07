"""Monte Carlo replay of whole trials, used to cross-check the exact engine.

Randomness comes from numpy's Philox counter-based generator. Replicates are
processed in fixed blocks of ``BLOCK`` trials; block ``i`` draws from the
``i``-th child of ``SeedSequence(seed)``, so a report depends only on the
seed and the configuration, never on how blocks are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .design import Design, DesignError, Rates, TrialOutcome, validate, validate_rates

GENERATOR = "numpy.random.Philox"
STREAM_VERSION = 1
BLOCK = 1 << 16


@dataclass(frozen=True)
class SimConfig:
    design: Design
    rates: Rates
    replicates: int = 100_000
    seed: int = 0

    def __post_init__(self):
        validate(self.design)
        validate_rates(self.rates)
        if self.replicates < 1:
            raise DesignError("replicates must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise DesignError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Estimate:
    mean: float
    se: float


@dataclass(frozen=True)
class SimReport:
    replicates: int
    seed: int
    est_reject_prob: Estimate
    est_early_stop_prob: Estimate
    est_ess: Estimate
    # None when r1 == 0: no decision is ever pending
    est_stage1_decision_mean: Estimate | None
    stage1_decision_sd: float | None

    def to_record(self):
        record = asdict(self)
        record["generator"] = GENERATOR
        record["stream_version"] = STREAM_VERSION
        return record


def _block_rng(seed, index):
    child = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(child))


def _run_block(args):
    """Sufficient statistics for one block of replicates."""
    design, rates, seed, index, size = args
    n1, n2, r1, r2 = design.n1, design.n2, design.r1, design.r2
    rng = _block_rng(seed, index)
    # Bernoulli draws by inversion, patient by patient
    z1 = rng.random((size, n1)) < rates.p1
    keep = rng.random((size, n1)) < rates.ratio
    z2 = rng.random((size, n2)) < rates.p2
    x1 = z1.sum(axis=1)
    x12 = (z1 & keep).sum(axis=1)
    x2 = z2.sum(axis=1)
    continued = x1 >= r1
    rejected = continued & (x12 + x2 >= r2)
    enrolled = np.where(continued, n1 + n2, n1)

    stats = {
        "reject": int(rejected.sum()),
        "stop": int((~continued).sum()),
        "enrolled": int(enrolled.sum()),
        "enrolled_sq": int((enrolled.astype(np.int64) ** 2).sum()),
    }
    if r1 >= 1:
        s, t = r1, n1 - r1 + 1
        wins = np.cumsum(z1, axis=1)
        losses = np.arange(1, n1 + 1) - wins
        settled = (wins >= s) | (losses >= t)
        first = settled.argmax(axis=1) + 1  # always settled by patient s + t - 1 <= n1
        stats["decide"] = int(first.sum())
        stats["decide_sq"] = int((first.astype(np.int64) ** 2).sum())
    return stats


def _proportion(count, n):
    m = count / n
    se = math.sqrt(m * (1 - m) / (n - 1)) if n > 1 else 0.0
    return Estimate(m, se)


def _mean(total, total_sq, n):
    m = total / n
    var = (total_sq - n * m * m) / (n - 1) if n > 1 else 0.0
    var = max(var, 0.0)
    return Estimate(m, math.sqrt(var / n)), math.sqrt(var)


def simulate(config, workers=1):
    """Simulate ``config.replicates`` complete trials.

    Each trial draws Stage-1 outcomes at ``p1``; surviving Stage-1 successes
    stay successes at the long follow-up with probability ``p2 / p1``;
    Stage 2 draws at ``p2``. The Stage-1 sequence is also replayed in order
    to find the first patient at which the continue/stop decision is settled.
    """
    design, rates = config.design, config.rates
    jobs = []
    left, index = config.replicates, 0
    while left > 0:
        size = min(BLOCK, left)
        jobs.append((design, rates, config.seed, index, size))
        left -= size
        index += 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_run_block, jobs))
    else:
        blocks = [_run_block(job) for job in jobs]

    n = config.replicates
    total = {key: sum(b[key] for b in blocks) for key in blocks[0]}
    ess, _ = _mean(total["enrolled"], total["enrolled_sq"], n)
    decide, decide_sd = (None, None)
    if "decide" in total:
        decide, decide_sd = _mean(total["decide"], total["decide_sq"], n)
    return SimReport(
        replicates=n,
        seed=config.seed,
        est_reject_prob=_proportion(total["reject"], n),
        est_early_stop_prob=_proportion(total["stop"], n),
        est_ess=ess,
        est_stage1_decision_mean=decide,
        stage1_decision_sd=decide_sd,
    )


def simulate_trial(design, rates, rng):
    """Draw one trial with ``rng`` (a numpy Generator)."""
    x1 = int(rng.binomial(design.n1, rates.p1))
    x12 = int(rng.binomial(x1, rates.ratio))
    x2 = int(rng.binomial(design.n2, rates.p2))
    return TrialOutcome.from_counts(design, x1, x12, x2)
