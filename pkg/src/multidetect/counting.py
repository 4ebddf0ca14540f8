"""Binomial counting law shared by the outcome scenarios and the transport model."""

from __future__ import annotations

import math

from .errors import OutOfRangeError

#: Largest n evaluated with exact integer coefficients; above this, log-space.
EXACT_LIMIT = 60


def count_log_pmf(n: int, k: int, p: float) -> float:
    """log C(n,k) + k log p + (n-k) log(1-p), with 0*log(0) = 0 conventions."""
    if not 0 <= k <= n:
        raise OutOfRangeError(f"count {k} outside 0..{n}")
    if p == 0.0:
        return 0.0 if k == 0 else -math.inf
    if p == 1.0:
        return 0.0 if k == n else -math.inf
    return (
        math.lgamma(n + 1)
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )


def count_pmf(n: int, k: int, p: float) -> float:
    """Probability of k successes in n independent attempts at success rate p.

    Exact integer binomial coefficients up to n = EXACT_LIMIT; log-space
    evaluation beyond that to avoid overflow.
    """
    if not 0 <= k <= n:
        raise OutOfRangeError(f"count {k} outside 0..{n}")
    if p in (0.0, 1.0) or n <= EXACT_LIMIT:
        if p == 0.0:
            return 1.0 if k == 0 else 0.0
        if p == 1.0:
            return 1.0 if k == n else 0.0
        return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)
    return math.exp(count_log_pmf(n, k, p))
