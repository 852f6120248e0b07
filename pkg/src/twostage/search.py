"""Exhaustive enumeration of two-stage designs and selection among them."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .design import Design, DesignError, OperatingCharacteristics, Rates
from .oc import rejection_table
from .probability import binom_cdf_lt

CRITERIA = ("highest-alpha", "optimal", "minimax-early-stop", "balanced", "suggested")
BUDGET_MODES = ("exact-total", "up-to-total")

# feasibility guard: alpha may exceed the target by rounding noise only
ALPHA_GUARD = 1e-12


class InfeasibleError(Exception):
    """No design satisfies the requested constraints."""


@dataclass(frozen=True)
class SuggestedFilter:
    """Windowed filter for designs that keep early stopping rare under the null.

    ``alpha_window`` is closed and defaults to ``[0.85 * alpha, alpha]``;
    ``early_stop_window`` is open; ``stage1_ratio`` caps ``n1 <= ratio * n2``.
    """

    alpha_window: Optional[Tuple[float, float]] = None
    early_stop_window: Tuple[float, float] = (0.05, 0.2)
    stage1_ratio: float = 0.5


@dataclass(frozen=True)
class SearchSpec:
    total_n: int
    alpha_target: float = 0.1
    null_rates: Rates = Rates(0.8, 0.2)
    alt_rates: Rates = Rates(0.8, 0.4)
    criterion: str = "suggested"
    budget_mode: str = "exact-total"
    suggested_filter: SuggestedFilter = field(default_factory=SuggestedFilter)

    def __post_init__(self):
        if self.total_n < 0:
            raise DesignError("total_n is negative")
        if not 0 < self.alpha_target < 1:
            raise DesignError("alpha_target must lie in (0, 1)")
        if self.alt_rates.p1 < self.null_rates.p1 or self.alt_rates.p2 < self.null_rates.p2:
            raise DesignError("alternative rates must dominate the null rates")
        if self.criterion not in CRITERIA:
            raise DesignError(f"unknown criterion {self.criterion!r}")
        if self.budget_mode not in BUDGET_MODES:
            raise DesignError(f"unknown budget mode {self.budget_mode!r}")
        lo, hi = self.alpha_window
        if not (0 < lo <= hi <= self.alpha_target):
            raise DesignError("alpha window must lie inside (0, alpha_target]")

    @property
    def alpha_window(self):
        window = self.suggested_filter.alpha_window
        if window is None:
            return 0.85 * self.alpha_target, self.alpha_target
        return window


@dataclass(frozen=True)
class RankedDesign:
    design: Design
    oc_null: OperatingCharacteristics
    oc_alt: OperatingCharacteristics
    criterion_value: float

    @property
    def sort_key(self):
        d = self.design
        return d.n1, d.r1, d.r2, d.n2


def _oc(n1, n2, pet, reject):
    return OperatingCharacteristics(
        reject_prob=float(reject),
        early_stop_prob=pet,
        ess_bound=n1 + n2 * (1.0 - pet),
        power_bound=1.0 - pet,
    )


def _split_candidates(args):
    n1, n2, alpha_target, null_rates, alt_rates = args
    null_table = rejection_table(n1, n2, null_rates)
    alt_table = rejection_table(n1, n2, alt_rates)
    out = []
    for r1 in range(n1 + 1):
        pet0 = binom_cdf_lt(n1, r1, null_rates.p1)
        pet1 = binom_cdf_lt(n1, r1, alt_rates.p1)
        alphas = null_table[r1, : n1 + n2 + 1]
        for r2 in np.flatnonzero(alphas <= alpha_target + ALPHA_GUARD):
            r2 = int(r2)
            out.append(
                RankedDesign(
                    Design(n1, n2, r1, r2),
                    _oc(n1, n2, pet0, alphas[r2]),
                    _oc(n1, n2, pet1, alt_table[r1, r2]),
                    float(alphas[r2]),
                )
            )
    return out


def enumerate_feasible(spec, workers=1):
    """Every design within budget whose exact alpha does not exceed the target.

    Each design carries its operating characteristics under the null and the
    alternative. Output is ordered by ``(n1, r1, r2, n2)`` whatever the
    number of worker processes.
    """
    totals = [spec.total_n] if spec.budget_mode == "exact-total" else range(spec.total_n + 1)
    jobs = [
        (n1, n - n1, spec.alpha_target, spec.null_rates, spec.alt_rates)
        for n in totals
        for n1 in range(n + 1)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_split_candidates, jobs, chunksize=4))
    else:
        chunks = [_split_candidates(job) for job in jobs]
    found = [rd for chunk in chunks for rd in chunk]
    found.sort(key=lambda rd: rd.sort_key)
    return found


def _best(candidates, value, maximize):
    """All candidates attaining the best ``value``, in input order."""
    scored = [(value(rd), rd) for rd in candidates]
    target = max(v for v, _ in scored) if maximize else min(v for v, _ in scored)
    return [
        replace(rd, criterion_value=v)
        for v, rd in scored
        if math.isclose(v, target, rel_tol=1e-12, abs_tol=1e-15)
    ]


def _alpha_frontier(candidates):
    """Keep, for each (n1, n2) split, the designs with the largest exact alpha."""
    groups = {}
    for rd in candidates:
        groups.setdefault((rd.design.n1, rd.design.n2), []).append(rd)
    keep = []
    for group in groups.values():
        keep.extend(_best(group, lambda rd: rd.oc_null.reject_prob, maximize=True))
    keep.sort(key=lambda rd: rd.sort_key)
    return keep


def select(spec, candidates):
    """Apply ``spec.criterion`` to ``candidates``.

    Returns all tied designs; the first one is the selection. The criteria:

    * ``highest-alpha``: largest exact alpha.
    * ``optimal``: smallest expected-sample-size bound under the null.
    * ``minimax-early-stop``: largest early-stopping probability under the
      null, among the alpha-maximizing design of each (n1, n2) split.
      Without that restriction the winner is the degenerate design that
      almost never continues.
    * ``balanced``: ``n1 == n2``, then largest exact alpha.
    * ``suggested``: every design inside the alpha window, inside the
      early-stopping window and with ``n1 <= ratio * n2``.

    Raises:
        InfeasibleError: if nothing qualifies.
    """
    candidates = list(candidates)
    if not candidates:
        raise InfeasibleError("no feasible designs to select from")
    crit = spec.criterion
    if crit == "highest-alpha":
        chosen = _best(candidates, lambda rd: rd.oc_null.reject_prob, maximize=True)
    elif crit == "optimal":
        chosen = _best(candidates, lambda rd: rd.oc_null.ess_bound, maximize=False)
    elif crit == "minimax-early-stop":
        frontier = _alpha_frontier(candidates)
        chosen = _best(frontier, lambda rd: rd.oc_null.early_stop_prob, maximize=True)
    elif crit == "balanced":
        pool = [rd for rd in candidates if rd.design.n1 == rd.design.n2]
        if not pool:
            raise InfeasibleError("no feasible balanced design")
        chosen = _best(pool, lambda rd: rd.oc_null.reject_prob, maximize=True)
    else:
        a_lo, a_hi = spec.alpha_window
        e_lo, e_hi = spec.suggested_filter.early_stop_window
        ratio = spec.suggested_filter.stage1_ratio
        chosen = [
            rd
            for rd in candidates
            if a_lo <= rd.oc_null.reject_prob <= a_hi + ALPHA_GUARD
            and e_lo < rd.oc_null.early_stop_prob < e_hi
            and rd.design.n1 <= ratio * rd.design.n2
        ]
    if not chosen:
        raise InfeasibleError(f"no design meets the {crit} criterion")
    return chosen


def search(spec, workers=1):
    return select(spec, enumerate_feasible(spec, workers=workers))


def simon_bounds(design):
    """The design's thresholds in the classical stop-if-at-most / reject-if-more form."""
    return design.r1 - 1, design.r2 - 1


@dataclass(frozen=True)
class SimonResult:
    optimal: RankedDesign
    minimax: RankedDesign
    candidates: List[RankedDesign]


def simon_designs(p0, pa, alpha_target, power_target, n_max):
    """Classical two-stage designs where both looks count the same successes.

    This is the ``p1 == p2`` case of the general engine: every Stage-1
    success is also a success at the final analysis. For each total ``n``
    and Stage-1 size ``n1 >= 1`` and each stopping threshold, the smallest
    final threshold meeting the alpha constraint is kept when it also meets
    the power constraint.

    Returns:
        A :class:`SimonResult`. ``optimal`` minimizes the expected sample
        size under ``p0``; ``minimax`` minimizes the total sample size and
        then the expected sample size.

    Raises:
        InfeasibleError: if no design up to ``n_max`` qualifies.
    """
    if not p0 < pa:
        raise DesignError("p0 must be smaller than pa")
    null, alt = Rates(p0, p0), Rates(pa, pa)
    found = []
    for n in range(1, n_max + 1):
        for n1 in range(1, n + 1):
            n2 = n - n1
            null_table = rejection_table(n1, n2, null)
            alt_table = rejection_table(n1, n2, alt)
            for r1 in range(1, n1 + 1):
                ok = np.flatnonzero(null_table[r1, : n + 1] <= alpha_target + ALPHA_GUARD)
                if ok.size == 0:
                    continue
                r2 = int(ok[0])
                if alt_table[r1, r2] < power_target - ALPHA_GUARD:
                    continue
                pet0 = binom_cdf_lt(n1, r1, p0)
                oc_null = _oc(n1, n2, pet0, null_table[r1, r2])
                oc_alt = _oc(n1, n2, binom_cdf_lt(n1, r1, pa), alt_table[r1, r2])
                found.append(RankedDesign(Design(n1, n2, r1, r2), oc_null, oc_alt, oc_null.ess_bound))
    if not found:
        raise InfeasibleError(f"no design with n <= {n_max} meets alpha and power")
    optimal = min(found, key=lambda rd: (rd.oc_null.ess_bound, rd.design.n, rd.sort_key))
    minimax = min(found, key=lambda rd: (rd.design.n, rd.oc_null.ess_bound, rd.sort_key))
    return SimonResult(optimal, minimax, found)
