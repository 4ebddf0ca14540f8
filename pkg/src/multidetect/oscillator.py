"""Thermal harmonic-oscillator pointer model.

Each detector is a damped oscillator pointer coupled linearly to the
measured two-valued observable.  Long after relaxation the pointer sits in
a thermal state whose position distribution is, in the high-temperature
regime, a classical Gaussian:

    outcome 0:  x ~ Normal(0,  dx^2)
    outcome 1:  x ~ Normal(X,  dx^2)

with the displaced equilibrium X = lambda / (m omega^2) and the thermal
spread dx^2 = 1 / (beta m omega^2).  Readout thresholds the pointer at
X/2, which is the maximum-likelihood boundary for equal-variance
Gaussians, and is meaningful only when X exceeds dx.

Two joint position laws for a detector pair are exposed:

* ``joint_density_qm`` — the relaxed mixture with one shared latent
  outcome, mixture weights (p0, p1);
* ``joint_density_counterfactual`` — the law detectors would follow if
  each latched independently, weights (p0^2, p1^2) on the agreeing peaks
  and p0*p1 on each of the two disagreeing cross peaks.  The quadratic
  weights are what a linear evolution of the density matrix cannot
  produce, so the quadrant masses of the two laws are the experimental
  signature separating them.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import SI, PhysicalConstants
from .errors import NotDistinguishableError, QuantumRegimeWarning, RelaxationWarning
from .state import OutcomeProbabilities

#: X/dx at or above which readout is flagged reliable (misread ~ 6e-3 at 5).
RELIABLE_RATIO = 5.0
#: gamma*tau at or above which the relaxed-mixture law is trusted (<1% residual).
RELAXATION_FLOOR = 5.0


@dataclass(frozen=True)
class OscillatorParams:
    """Physical configuration of one oscillator pointer.

    Parameters
    ----------
    mass, omega : float
        Oscillator mass and angular frequency.
    beta : float
        Inverse temperature 1/(k_B T), in inverse energy units.
    coupling_lambda : float
        Linear coupling force; zero means the pointer never displaces.
    relaxation_rate, measurement_time : float
        Environment relaxation rate gamma and observation window tau.
        The relaxed-mixture law needs gamma*tau >= RELAXATION_FLOOR.
    constants : PhysicalConstants
        Unit system; only hbar enters (the classical-regime check).

    Construction warns (never fails) when beta*hbar*omega >= 1, where the
    classical Gaussian spread no longer dominates quantum fluctuations,
    and when gamma*tau < RELAXATION_FLOOR.
    """

    mass: float
    omega: float
    beta: float
    coupling_lambda: float
    relaxation_rate: float
    measurement_time: float
    constants: PhysicalConstants = field(default=SI, compare=False)

    def __post_init__(self):
        for name in ("mass", "omega", "beta", "relaxation_rate", "measurement_time"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.coupling_lambda < 0:
            raise ValueError("coupling_lambda must be non-negative")
        b_hw = self.beta * self.constants.hbar * self.omega
        if b_hw >= 1.0:
            warnings.warn(
                f"beta*hbar*omega = {b_hw:.3g} >= 1: thermal spread does not dominate "
                "quantum fluctuations; classical pointer statistics are unreliable",
                QuantumRegimeWarning,
                stacklevel=2,
            )
        g_t = self.relaxation_rate * self.measurement_time
        if g_t < RELAXATION_FLOOR:
            warnings.warn(
                f"gamma*tau = {g_t:.3g} < {RELAXATION_FLOOR}: pointer may not have relaxed "
                "to its displaced equilibrium within the measurement window",
                RelaxationWarning,
                stacklevel=2,
            )

    @property
    def thermal_variance(self) -> float:
        """Classical equilibrium position variance 1/(beta m omega^2)."""
        return 1.0 / (self.beta * self.mass * self.omega**2)

    @property
    def quantum_variance(self) -> float:
        """Zero-point position variance hbar/(m omega), for the regime check only."""
        return self.constants.hbar / (self.mass * self.omega)


@dataclass(frozen=True)
class PointerReading:
    """One sampled pointer position."""

    x: float

    def __post_init__(self):
        if not math.isfinite(self.x):
            raise ValueError("pointer reading must be finite")


def displacement(params: OscillatorParams) -> float:
    """Equilibrium position X = lambda/(m omega^2) for outcome 1."""
    return params.coupling_lambda / (params.mass * params.omega**2)


def thermal_std(params: OscillatorParams) -> float:
    """Thermal position spread dx = sqrt(1/(beta m omega^2))."""
    return math.sqrt(params.thermal_variance)


def distinguishability_ratio(params: OscillatorParams) -> float:
    """X/dx; outcomes are macroscopically distinguishable when this is large."""
    return displacement(params) / thermal_std(params)


def is_reliable(params: OscillatorParams, ratio_threshold: float = RELIABLE_RATIO) -> bool:
    """Whether readout misreads are negligible at the configured threshold."""
    return distinguishability_ratio(params) >= ratio_threshold


def sample_pointer(
    params: OscillatorParams,
    sigma: int,
    rng: np.random.Generator,
    size: int | None = None,
):
    """Sample relaxed pointer position(s) given the latched outcome.

    Classical-regime thermal state: Normal(sigma*X, dx^2).  Returns a
    :class:`PointerReading` for ``size=None``, else an ndarray of positions.
    """
    if sigma not in (0, 1):
        raise ValueError("sigma must be 0 or 1")
    mean = sigma * displacement(params)
    std = thermal_std(params)
    if size is None:
        return PointerReading(x=float(rng.normal(mean, std)))
    return rng.normal(mean, std, size=size)


def _gauss(x, mean: float, std: float):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * ((x - mean) / std) ** 2) / (std * math.sqrt(2.0 * math.pi))


def _conditional(params: OscillatorParams, sigma: int, x):
    return _gauss(x, sigma * displacement(params), thermal_std(params))


def joint_density_qm(
    paramsA: OscillatorParams,
    paramsB: OscillatorParams,
    probs: OutcomeProbabilities,
    xA,
    xB,
):
    """Joint relaxed position density with one shared latent outcome.

    p0 * gA(xA|0) gB(xB|0) + p1 * gA(xA|1) gB(xB|1); accepts scalars or
    broadcastable arrays.
    """
    out = probs.p0 * _conditional(paramsA, 0, xA) * _conditional(paramsB, 0, xB) + (
        probs.p1 * _conditional(paramsA, 1, xA) * _conditional(paramsB, 1, xB)
    )
    return float(out) if np.ndim(out) == 0 else out


def joint_density_counterfactual(
    paramsA: OscillatorParams,
    paramsB: OscillatorParams,
    probs: OutcomeProbabilities,
    xA,
    xB,
):
    """Joint density if each detector latched its own independent outcome.

    Weights p0^2 and p1^2 on the agreeing peaks plus p0*p1 on each cross
    peak; total disagreeing mass 2 p0 p1.
    """
    gA0, gA1 = _conditional(paramsA, 0, xA), _conditional(paramsA, 1, xA)
    gB0, gB1 = _conditional(paramsB, 0, xB), _conditional(paramsB, 1, xB)
    p0, p1 = probs.p0, probs.p1
    out = p0**2 * gA0 * gB0 + p1**2 * gA1 * gB1 + p0 * p1 * (gA0 * gB1 + gA1 * gB0)
    return float(out) if np.ndim(out) == 0 else out


def readout(x, params: OscillatorParams):
    """Threshold a pointer reading at X/2; ties resolve to 0.

    Raises NotDistinguishableError when X/dx < 1, where the two outcome
    distributions overlap too much for any threshold to mean anything.
    Accepts a PointerReading, a float, or an array of positions.
    """
    if distinguishability_ratio(params) < 1.0:
        raise NotDistinguishableError(
            f"X/dx = {distinguishability_ratio(params):.3g} < 1; readout is meaningless"
        )
    threshold = 0.5 * displacement(params)
    if isinstance(x, PointerReading):
        x = x.x
    out = np.asarray(x, dtype=float) > threshold
    if np.ndim(out) == 0:
        return int(out)
    return out.astype(int)


def misread_probability(params: OscillatorParams) -> float:
    """Closed-form P(readout != sigma): Gaussian tail beyond X/(2 dx)."""
    half_sep = 0.5 * distinguishability_ratio(params)
    return 0.5 * math.erfc(half_sep / math.sqrt(2.0))


def export_density_csv(
    path,
    paramsA: OscillatorParams,
    paramsB: OscillatorParams,
    probs: OutcomeProbabilities,
    which: str = "qm",
    n_points: int = 101,
    span_sigmas: float = 6.0,
) -> None:
    """Write a gridded joint density as CSV rows (x_A, x_B, density).

    The grid covers both conditional peaks of each detector plus
    ``span_sigmas`` thermal spreads on either side.
    """
    density = {"qm": joint_density_qm, "counterfactual": joint_density_counterfactual}[which]

    def axis(params):
        x_peak = displacement(params)
        pad = span_sigmas * thermal_std(params)
        return np.linspace(min(0.0, x_peak) - pad, max(0.0, x_peak) + pad, n_points)

    xa, xb = axis(paramsA), axis(paramsB)
    grid_a, grid_b = np.meshgrid(xa, xb, indexing="ij")
    values = density(paramsA, paramsB, probs, grid_a, grid_b)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x_A", "x_B", "density"])
        for i in range(n_points):
            for j in range(n_points):
                writer.writerow([repr(float(xa[i])), repr(float(xb[j])), repr(float(values[i, j]))])
