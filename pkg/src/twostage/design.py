"""Value types for designs, hypothesis rates and their operating characteristics."""

from __future__ import annotations

import json
import operator
from dataclasses import asdict, dataclass
from typing import Optional

DESIGN_KEYS = ("n1", "n2", "r1", "r2", "t1", "t2")
RATE_KEYS = ("p1", "p2")


class DesignError(ValueError):
    """A design or rate pair violates its allowed ranges."""


def _as_count(name, value):
    if isinstance(value, bool):
        raise DesignError(f"{name} must be an integer")
    try:
        return operator.index(value)
    except TypeError:
        raise DesignError(f"{name} must be an integer, got {value!r}") from None


@dataclass(frozen=True)
class Design:
    """A two-stage design.

    Stage 1 enrolls ``n1`` patients and continues when at least ``r1`` of them
    are successes at the short follow-up ``t1``. Stage 2 enrolls ``n2`` more
    and the null is rejected when at least ``r2`` patients (Stage-1 patients
    still succeeding plus Stage-2 successes) are successes at ``t2``. The
    follow-up times are carried as labels only.
    """

    n1: int
    n2: int
    r1: int
    r2: int
    t1: Optional[float] = None
    t2: Optional[float] = None

    def __post_init__(self):
        validate(self)

    @property
    def n(self):
        return self.n1 + self.n2

    def to_record(self):
        return {k: getattr(self, k) for k in DESIGN_KEYS}

    @classmethod
    def from_record(cls, record):
        kwargs = {}
        for k in ("n1", "n2", "r1", "r2"):
            v = record[k]
            kwargs[k] = int(v) if isinstance(v, str) else v
        for k in ("t1", "t2"):
            if record.get(k) not in (None, ""):
                kwargs[k] = float(record[k])
        return cls(**kwargs)


@dataclass(frozen=True)
class Rates:
    """Success rates ``p1`` at the short follow-up and ``p2`` at the long one."""

    p1: float
    p2: float

    def __post_init__(self):
        validate_rates(self)

    @property
    def ratio(self):
        """Conditional rate of success at t2 given success at t1 (0 when p1 is 0)."""
        return self.p2 / self.p1 if self.p1 > 0 else 0.0

    def to_record(self):
        return {"p1": self.p1, "p2": self.p2}

    @classmethod
    def from_record(cls, record):
        return cls(float(record["p1"]), float(record["p2"]))


def validate(design):
    """Check every range constraint of ``design`` and return it unchanged.

    Raises:
        DesignError: naming the first violated constraint.
    """
    n1 = _as_count("n1", design.n1)
    n2 = _as_count("n2", design.n2)
    r1 = _as_count("r1", design.r1)
    r2 = _as_count("r2", design.r2)
    if n1 < 0:
        raise DesignError("n1 is negative")
    if n2 < 0:
        raise DesignError("n2 is negative")
    if r1 < 0:
        raise DesignError("r1 is negative")
    if r1 > n1:
        raise DesignError("r1 exceeds n1")
    if r2 < 0:
        raise DesignError("r2 is negative")
    if r2 > n1 + n2:
        raise DesignError("r2 exceeds n1 + n2")
    t1, t2 = design.t1, design.t2
    if t1 is not None and t1 < 0:
        raise DesignError("t1 is negative")
    if t2 is not None and t2 < 0:
        raise DesignError("t2 is negative")
    if t1 is not None and t2 is not None and t1 > t2:
        raise DesignError("t1 exceeds t2")
    return design


def validate_rates(rates):
    """Check ``0 <= p2 <= p1 <= 1`` and return ``rates`` unchanged."""
    for name, p in (("p1", rates.p1), ("p2", rates.p2)):
        try:
            p = float(p)
        except (TypeError, ValueError):
            raise DesignError(f"{name} must be a real number") from None
        if not (0.0 <= p <= 1.0):
            raise DesignError(f"{name} outside [0, 1]")
    if rates.p2 > rates.p1:
        raise DesignError("p2 exceeds p1")
    return rates


@dataclass(frozen=True)
class OperatingCharacteristics:
    reject_prob: float
    early_stop_prob: float
    ess_bound: float
    power_bound: float

    def to_record(self):
        return asdict(self)


@dataclass(frozen=True)
class TrialOutcome:
    """Counts from one realized trial."""

    x1: int
    x12: int
    x2: int
    continued: bool
    rejected: bool

    @classmethod
    def from_counts(cls, design, x1, x12, x2):
        if not (0 <= x12 <= x1 <= design.n1 and 0 <= x2 <= design.n2):
            raise DesignError("outcome counts outside their ranges")
        continued = x1 >= design.r1
        if not continued:
            # Stage 2 never runs after an early stop
            x12, x2 = 0, 0
        rejected = continued and x12 + x2 >= design.r2
        return cls(x1, x12, x2, continued, rejected)


def format_real(x):
    """17 significant digits, enough for an exact round trip of a double."""
    return format(float(x), ".17g")


def to_json(design, rates=None):
    record = design.to_record()
    if rates is not None:
        record.update(rates.to_record())
    return json.dumps(record)


def from_json(text):
    """Parse a record produced by :func:`to_json` into ``(design, rates or None)``."""
    record = json.loads(text)
    rates = Rates.from_record(record) if "p1" in record else None
    return Design.from_record(record), rates


def to_csv_row(design, rates=None):
    """A header line and a value line using the shared record keys."""
    record = design.to_record()
    if rates is not None:
        record.update(rates.to_record())
    values = []
    for value in record.values():
        if value is None:
            values.append("")
        elif isinstance(value, float):
            values.append(format_real(value))
        else:
            values.append(str(value))
    return ",".join(record), ",".join(values)


def from_csv_row(header, row):
    record = dict(zip(header.split(","), row.split(",")))
    rates = Rates.from_record(record) if record.get("p1", "") != "" else None
    return Design.from_record(record), rates
