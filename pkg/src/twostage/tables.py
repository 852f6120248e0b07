"""Regenerate the reference design table and Stage-1 duration table.

The reference configuration: at most 36 patients, alpha 0.1, Stage-1 rate
0.8, null long-term rate 0.2, alternative long-term rate 0.4.
"""

from dataclasses import dataclass, replace
from typing import Optional

from .design import Design, Rates
from .duration import design_duration
from .oc import operating_characteristics
from .search import SearchSpec, enumerate_feasible, select, simon_bounds, simon_designs

TOTAL_N = 36
ALPHA = 0.1
NULL = Rates(0.8, 0.2)
ALT = Rates(0.8, 0.4)
SIMON_P0, SIMON_PA, SIMON_POWER, SIMON_N_MAX = 0.2, 0.4, 0.9, 50

CLASSICAL = (
    ("A", "highest-alpha", "Highest alpha"),
    ("B", "optimal", "Lowest expected sample size"),
    ("C", "minimax-early-stop", "Highest probability of early termination"),
    ("D", "balanced", "Balanced: n1 = n2"),
)

TABLE2_HEADER = (
    "label", "n1", "n2", "r1", "r2", "exact_alpha", "ess_bound",
    "early_stop_prob", "power_alt", "simon_r1", "simon_r2",
)
TABLE3_HEADER = ("label", "n1", "r1", "mean", "sd")


@dataclass(frozen=True)
class DesignRow:
    label: str
    description: str
    design: Design
    exact_alpha: float
    ess_bound: float
    early_stop_prob: float
    power_alt: float
    simon: Optional[tuple] = None

    def values(self):
        d = self.design
        simon = self.simon or ("", "")
        return (self.label, d.n1, d.n2, d.r1, d.r2, self.exact_alpha, self.ess_bound,
                self.early_stop_prob, self.power_alt, *simon)


def _row(label, description, ranked, simon=False):
    return DesignRow(
        label,
        description,
        ranked.design,
        ranked.oc_null.reject_prob,
        ranked.oc_null.ess_bound,
        ranked.oc_null.early_stop_prob,
        ranked.oc_alt.reject_prob,
        simon_bounds(ranked.design) if simon else None,
    )


def design_table(workers=1):
    """Rows A-H, X, Y and Z of the reference design table."""
    spec = SearchSpec(TOTAL_N, ALPHA, NULL, ALT)
    candidates = enumerate_feasible(spec, workers=workers)
    rows = []
    for label, criterion, description in CLASSICAL:
        best = select(replace(spec, criterion=criterion), candidates)[0]
        rows.append(_row(label, description, best))
    for label, ranked in zip("EFGH", select(spec, candidates)):
        rows.append(_row(label, "Suggested", ranked))

    # single-stage binomial: no Stage-1 look at all
    x = Design(0, TOTAL_N, 0, 11)
    oc0 = operating_characteristics(x, Rates(SIMON_P0, SIMON_P0))
    oc1 = operating_characteristics(x, Rates(SIMON_PA, SIMON_PA))
    rows.append(DesignRow("X", "Binomial", x, oc0.reject_prob, oc0.ess_bound,
                          oc0.early_stop_prob, oc1.reject_prob))

    simon = simon_designs(SIMON_P0, SIMON_PA, ALPHA, SIMON_POWER, SIMON_N_MAX)
    rows.append(_row("Y", "Simon optimal", simon.optimal, simon=True))
    rows.append(_row("Z", "Simon minimax", simon.minimax, simon=True))
    return rows


def duration_table(rows=None):
    """Mean and SD of the Stage-1 decision index for the suggested designs."""
    rows = rows if rows is not None else design_table()
    out = []
    for row in rows:
        if row.label in "EFGH":
            mean, sd = design_duration(row.design, NULL.p1)
            out.append((row.label, row.design.n1, row.design.r1, mean, sd))
    return out
