"""Prepared two-level state and its outcome probabilities.

All downstream generators consume only the squared moduli of the two
amplitudes; relative and global phases are carried but never affect any
prediction made here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .errors import NormalizationWarning, ZeroStateError

#: Renormalization above this deviation from unit norm is recorded on the state.
NORM_TOLERANCE = 1e-9
#: Deviations above this additionally emit a NormalizationWarning.
NORM_WARN_THRESHOLD = 1e-6


@dataclass(frozen=True)
class Amplitudes:
    """Normalized amplitude pair (c0, c1) of the prepared superposition.

    The constructor rescales any nonzero input vector onto the unit sphere;
    ``renormalized`` records whether the input norm was off by more than
    ``NORM_TOLERANCE``.  Inputs off by more than ``NORM_WARN_THRESHOLD``
    also raise a :class:`NormalizationWarning`.
    """

    c0: complex
    c1: complex
    renormalized: bool = field(init=False, default=False, compare=False)

    def __post_init__(self):
        norm = math.sqrt(abs(self.c0) ** 2 + abs(self.c1) ** 2)
        if norm == 0.0:
            raise ZeroStateError("both amplitudes are zero")
        deviation = abs(norm - 1.0)
        if deviation > NORM_WARN_THRESHOLD:
            warnings.warn(
                f"input norm {norm:.6g} deviates from 1 by {deviation:.3g}; renormalizing",
                NormalizationWarning,
                stacklevel=2,
            )
        if deviation > NORM_TOLERANCE:
            object.__setattr__(self, "c0", self.c0 / norm)
            object.__setattr__(self, "c1", self.c1 / norm)
            object.__setattr__(self, "renormalized", True)


@dataclass(frozen=True)
class OutcomeProbabilities:
    """Binary outcome probabilities with p1 stored as 1 - p0 exactly."""

    p0: float
    p1: float = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.p0 <= 1.0:
            raise ValueError(f"p0 must lie in [0, 1], got {self.p0}")
        object.__setattr__(self, "p1", 1.0 - self.p0)


@dataclass(frozen=True)
class MultiOutcomeProbabilities:
    """Probabilities over d >= 2 outcomes, renormalized at construction."""

    probs: tuple[float, ...]

    def __init__(self, probs):
        probs = tuple(float(p) for p in probs)
        if len(probs) < 2:
            raise ValueError("need at least two outcomes")
        if any(p < 0.0 for p in probs):
            raise ValueError("probabilities must be non-negative")
        total = sum(probs)
        if total <= 0.0:
            raise ValueError("probabilities sum to zero")
        object.__setattr__(self, "probs", tuple(p / total for p in probs))

    @property
    def d(self) -> int:
        return len(self.probs)


def make_amplitudes(re0: float, im0: float, re1: float, im1: float) -> Amplitudes:
    """Build a normalized state from four real components."""
    return Amplitudes(complex(re0, im0), complex(re1, im1))


def born_probabilities(state: Amplitudes) -> OutcomeProbabilities:
    """Outcome probabilities (|c0|^2, 1 - |c0|^2) of the prepared state."""
    p0 = abs(state.c0) ** 2
    return OutcomeProbabilities(p0=min(1.0, max(0.0, p0)))
