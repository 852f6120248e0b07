"""Exact design and evaluation of two-stage trials with nested stopping and efficacy criteria."""

from .design import Design, DesignError, OperatingCharacteristics, Rates, TrialOutcome
from .duration import design_duration, duration_moments, duration_pmf
from .oc import (
    early_stop_curve,
    early_stop_prob,
    ess_bound,
    operating_characteristics,
    power_bound,
    power_curve,
    power_surface,
    reject_prob,
)
from .search import InfeasibleError, SearchSpec, enumerate_feasible, select, simon_designs
from .simulate import SimConfig, simulate

__version__ = "0.1.0"
