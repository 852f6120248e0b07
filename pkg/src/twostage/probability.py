"""Binomial and negative-binomial kernels.

Coefficients go through ``lgamma`` so large ``n`` never overflows; the
degenerate rates ``p = 0`` and ``p = 1`` are handled exactly.
"""

import math

import numpy as np
from scipy.special import gammaln


def _check_prob(p):
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"probability must lie in [0, 1], got {p!r}")


def _check_count(name, value):
    if isinstance(value, bool) or int(value) != value or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


def _log_comb(n, k):
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def binom_pmf(n, k, p):
    """Pr[X = k] for X ~ Binomial(n, p)."""
    n = _check_count("n", n)
    k = _check_count("k", k)
    _check_prob(p)
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == n else 0.0
    if k == 0:
        return math.exp(n * math.log1p(-p))
    if k == n:
        return math.exp(n * math.log(p))
    return math.exp(_log_comb(n, k) + k * math.log(p) + (n - k) * math.log1p(-p))


def binom_pmf_vector(n, p):
    """The full pmf of Binomial(n, p) as an array indexed by k = 0..n."""
    n = _check_count("n", n)
    _check_prob(p)
    out = np.zeros(n + 1)
    if p == 0.0:
        out[0] = 1.0
        return out
    if p == 1.0:
        out[n] = 1.0
        return out
    k = np.arange(n + 1)
    logc = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    out[:] = np.exp(logc + k * math.log(p) + (n - k) * math.log1p(-p))
    # coefficients at the ends are exactly 1
    out[0] = math.exp(n * math.log1p(-p))
    out[n] = math.exp(n * math.log(p))
    return out


def _split_tails(n, r, p):
    """Return (Pr[X < r], Pr[X >= r]), summing the smaller side directly."""
    if r <= 0:
        return 0.0, 1.0
    if r > n:
        return 1.0, 0.0
    pmf = binom_pmf_vector(n, p)
    if r <= n * p:
        lower = math.fsum(pmf[:r])
        lower = min(max(lower, 0.0), 1.0)
        return lower, 1.0 - lower
    upper = math.fsum(pmf[r:])
    upper = min(max(upper, 0.0), 1.0)
    return 1.0 - upper, upper


def binom_cdf_lt(n, r, p):
    """Strict lower tail Pr[X < r] of Binomial(n, p).

    ``r`` may run from 0 (empty sum) to ``n + 1`` (whole support).
    """
    n = _check_count("n", n)
    _check_prob(p)
    if r < 0 or r > n + 1:
        raise ValueError(f"r={r} outside 0..{n + 1}")
    return _split_tails(n, int(r), p)[0]


def binom_tail_ge(n, r, p):
    """Upper tail Pr[X >= r] of Binomial(n, p); any ``r <= 0`` gives 1."""
    n = _check_count("n", n)
    _check_prob(p)
    return _split_tails(n, int(r), p)[1]


def binom_tail_vector(n, p):
    """Array ``t`` with ``t[m] = Pr[X >= m]`` for m = 0..n+1."""
    pmf = binom_pmf_vector(n, p)
    tail = np.empty(n + 2)
    tail[n + 1] = 0.0
    tail[: n + 1] = np.cumsum(pmf[::-1])[::-1]
    np.clip(tail, 0.0, 1.0, out=tail)
    tail[0] = 1.0
    return tail


def nbinom_term(s, j, p):
    """Probability that the s-th success of a Bernoulli(p) sequence lands on trial s + j.

    Args:
        s: Required number of successes, at least 1.
        j: Number of failures before the s-th success.
        p: Success probability.

    Returns:
        C(s+j-1, s-1) p^s (1-p)^j.
    """
    s = _check_count("s", s)
    j = _check_count("j", j)
    _check_prob(p)
    if s < 1:
        raise ValueError("s must be at least 1")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0 if j == 0 else 0.0
    logc = _log_comb(s + j - 1, s - 1)
    return math.exp(logc + s * math.log(p) + j * math.log1p(-p))
