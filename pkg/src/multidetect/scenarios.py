"""Per-trial outcome patterns under the competing readout laws.

Three generators are provided for N detectors watching one prepared
two-level system:

* unanimous trials: one collective bit per trial, shared by every detector;
* binomial trials: one independent bit per detector, so the number of
  detectors reading 0 follows the binomial counting law;
* custom trials: the count of detectors reading 0 is drawn from a
  user-supplied pmf constrained to the same mean, and the identities of
  the detectors reading 0 are uniform over subsets.

A categorical variant extends the binomial law to d-valued observables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import counting
from .errors import InvalidPmfError, OutOfRangeError
from .state import MultiOutcomeProbabilities, OutcomeProbabilities

#: |sum(pmf) - 1| above this is rejected outright.
PMF_SUM_TOLERANCE = 1e-12
#: |mean(pmf) - p0*N| above this violates the mean constraint.
PMF_MEAN_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Unanimous:
    """All detectors latch the same collective bit each trial."""

    kind = "unanimous"


@dataclass(frozen=True)
class Binomial:
    """Each detector latches its own independent bit each trial."""

    kind = "binomial"


@dataclass(frozen=True)
class Custom:
    """Zero-count pmf over {0..N} with the standard mean, free otherwise.

    Generation only; the inference engine does not score this law.
    """

    pmf: tuple[float, ...]
    kind = "custom"

    def __init__(self, pmf):
        object.__setattr__(self, "pmf", tuple(float(p) for p in pmf))

    def validate(self, probs: OutcomeProbabilities, n_detectors: int) -> None:
        """Raise InvalidPmfError unless the pmf is admissible for (probs, N)."""
        if len(self.pmf) != n_detectors + 1:
            raise InvalidPmfError(
                f"pmf has {len(self.pmf)} entries, need {n_detectors + 1} for N={n_detectors}"
            )
        if any(p < 0.0 for p in self.pmf):
            raise InvalidPmfError("pmf entries must be non-negative")
        total = sum(self.pmf)
        if abs(total - 1.0) > PMF_SUM_TOLERANCE:
            raise InvalidPmfError(f"pmf sums to {total!r}, not 1")
        mean = sum(k * p for k, p in enumerate(self.pmf))
        target = probs.p0 * n_detectors
        if abs(mean - target) > PMF_MEAN_TOLERANCE:
            raise InvalidPmfError(
                f"pmf mean {mean!r} violates the mean constraint p0*N = {target!r}"
            )


ScenarioKind = Unanimous | Binomial | Custom


@dataclass(frozen=True)
class TrialOutcome:
    """Readings of all N detectors in one trial, plus the latent collective bit.

    ``latent_sigma`` is set only for unanimous trials, where a single value
    of the measured observable is shared by every detector.
    """

    outcomes: tuple[int, ...]
    latent_sigma: Optional[int] = None

    def n_zero(self) -> int:
        return sum(1 for o in self.outcomes if o == 0)


def binomial_pmf(n_detectors: int, n_zero: int, probs: OutcomeProbabilities) -> float:
    """Probability that exactly n_zero of n_detectors read 0 under the binomial law."""
    if n_detectors < 1:
        raise OutOfRangeError("need at least one detector")
    return counting.count_pmf(n_detectors, n_zero, probs.p0)


def sample_unanimous(
    probs: OutcomeProbabilities, n_detectors: int, rng: np.random.Generator
) -> TrialOutcome:
    """Draw one collective bit and copy it onto every detector."""
    if n_detectors < 1:
        raise OutOfRangeError("need at least one detector")
    sigma = 0 if rng.random() < probs.p0 else 1
    return TrialOutcome(outcomes=(sigma,) * n_detectors, latent_sigma=sigma)


def sample_binomial_trial(
    probs: OutcomeProbabilities, n_detectors: int, rng: np.random.Generator
) -> TrialOutcome:
    """Draw one independent bit per detector (0 with probability p0)."""
    if n_detectors < 1:
        raise OutOfRangeError("need at least one detector")
    bits = (rng.random(n_detectors) >= probs.p0).astype(int)
    return TrialOutcome(outcomes=tuple(int(b) for b in bits))


def sample_custom_trial(
    scenario: Custom,
    probs: OutcomeProbabilities,
    n_detectors: int,
    rng: np.random.Generator,
) -> TrialOutcome:
    """Draw the zero-count from the custom pmf, then place it uniformly.

    The pmf fixes only how many detectors read 0; which ones do is uniform
    over the C(N, N0) subsets, the maximum-entropy completion.
    """
    scenario.validate(probs, n_detectors)
    pmf = np.asarray(scenario.pmf)
    cdf = np.cumsum(pmf / pmf.sum())
    n_zero = int(np.searchsorted(cdf, rng.random(), side="right"))
    n_zero = min(n_zero, n_detectors)
    outcomes = np.ones(n_detectors, dtype=int)
    zero_slots = rng.permutation(n_detectors)[:n_zero]
    outcomes[zero_slots] = 0
    return TrialOutcome(outcomes=tuple(int(b) for b in outcomes))


def sample_multinomial_trial(
    probs: MultiOutcomeProbabilities, n_detectors: int, rng: np.random.Generator
) -> TrialOutcome:
    """Independent categorical draw per detector; counts are jointly multinomial."""
    if n_detectors < 1:
        raise OutOfRangeError("need at least one detector")
    draws = rng.choice(probs.d, size=n_detectors, p=np.asarray(probs.probs))
    return TrialOutcome(outcomes=tuple(int(v) for v in draws))
