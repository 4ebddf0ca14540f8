"""Monte Carlo trial runner combining an outcome law with a detector layer.

One experiment repeats the same prepared measurement over many trials.
Each trial draws an outcome pattern from the configured scenario; a
physical detector layer, when present, then produces raw readings
(pointer positions or currents) for those outcomes and thresholds them
back to bits.  Unanimous trials feed one shared latent bit to every
detector sampler; binomial and custom trials feed each detector its own
bit, which is exactly the distinction between the one-latent mixture law
and the independent-detector law at the physical level.

Trials use independent counter-based random streams keyed by
(seed, trial index), so results are identical no matter how the trial
loop is scheduled or chunked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from . import oscillator as osc
from . import qpc as qpcmod
from .errors import EmptyInputError, RaggedRecordsError
from .rng import TrialStreams
from .scenarios import (
    Binomial,
    Custom,
    ScenarioKind,
    Unanimous,
    sample_binomial_trial,
    sample_custom_trial,
    sample_unanimous,
)
from .state import Amplitudes, born_probabilities


@dataclass(frozen=True)
class IdealModel:
    """No physical layer; outcomes are read off losslessly."""

    model = "ideal"


@dataclass(frozen=True)
class OscillatorModel:
    """One thermal oscillator pointer per detector."""

    detectors: tuple[osc.OscillatorParams, ...]
    model = "oscillator"

    def __init__(self, detectors):
        object.__setattr__(self, "detectors", tuple(detectors))


@dataclass(frozen=True)
class QpcModel:
    """One biased point contact per detector; sampling mode exact or gaussian."""

    detectors: tuple[qpcmod.QpcParams, ...]
    sampling: str = "exact"
    model = "qpc"

    def __init__(self, detectors, sampling: str = "exact"):
        if sampling not in ("exact", "gaussian"):
            raise ValueError(f"unknown sampling mode {sampling!r}")
        object.__setattr__(self, "detectors", tuple(detectors))
        object.__setattr__(self, "sampling", sampling)


DetectorModel = IdealModel | OscillatorModel | QpcModel


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment bit-for-bit."""

    state: Amplitudes
    scenario: ScenarioKind
    detector_model: DetectorModel
    n_trials: int
    n_detectors: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        if self.n_detectors < 2:
            raise ValueError("agreement statistics need at least two detectors")
        if not isinstance(self.detector_model, IdealModel):
            n = len(self.detector_model.detectors)
            if n != self.n_detectors:
                raise ValueError(
                    f"detector_model has {n} parameter sets but n_detectors = {self.n_detectors}"
                )
        if isinstance(self.scenario, Custom):
            self.scenario.validate(born_probabilities(self.state), self.n_detectors)


@dataclass(frozen=True)
class TrialRecord:
    """One trial: latent bit (unanimous only), raw readings, latched outcomes."""

    index: int
    latent: Optional[int]
    raw_readings: tuple[float, ...]
    outcomes: tuple[int, ...]


@dataclass(frozen=True)
class ExperimentSummary:
    """Agreement statistics over a full run; M0 + M1 + m = M."""

    n_trials: int
    n_detectors: int
    m0_unanimous_zero: int
    m1_unanimous_one: int
    disagreements: int
    histogram_n0: tuple[int, ...]
    agreement_fraction: float


class _Accumulator:
    def __init__(self, n_detectors: int):
        self.n_detectors = n_detectors
        self.m0 = 0
        self.m1 = 0
        self.m = 0
        self.hist = [0] * (n_detectors + 1)

    def add(self, outcomes: Sequence[int]) -> None:
        n0 = sum(1 for o in outcomes if o == 0)
        self.hist[n0] += 1
        if n0 == self.n_detectors:
            self.m0 += 1
        elif n0 == 0:
            self.m1 += 1
        else:
            self.m += 1

    def summary(self) -> ExperimentSummary:
        total = self.m0 + self.m1 + self.m
        return ExperimentSummary(
            n_trials=total,
            n_detectors=self.n_detectors,
            m0_unanimous_zero=self.m0,
            m1_unanimous_one=self.m1,
            disagreements=self.m,
            histogram_n0=tuple(self.hist),
            agreement_fraction=(self.m0 + self.m1) / total,
        )


def model_misreads(model: DetectorModel, n_detectors: int) -> tuple[float, ...]:
    """Per-detector misread probability estimates implied by the model."""
    if isinstance(model, IdealModel):
        return (0.0,) * n_detectors
    if isinstance(model, OscillatorModel):
        return tuple(osc.misread_probability(p) for p in model.detectors)
    return tuple(qpcmod.misread_probability(p) for p in model.detectors)


def _physical_layer(model: DetectorModel) -> Callable:
    if isinstance(model, IdealModel):

        def ideal(bits, rng):
            return tuple(float(b) for b in bits), tuple(bits)

        return ideal

    if isinstance(model, OscillatorModel):
        detectors = model.detectors

        def pointer(bits, rng):
            readings = tuple(
                osc.sample_pointer(params, bit, rng).x
                for params, bit in zip(detectors, bits)
            )
            outs = tuple(osc.readout(x, params) for params, x in zip(detectors, readings))
            return readings, outs

        return pointer

    detectors = model.detectors
    mode = model.sampling

    def contact(bits, rng):
        readings = tuple(
            qpcmod.sample_current(params, bit, rng, mode=mode).current
            for params, bit in zip(detectors, bits)
        )
        outs = tuple(
            qpcmod.current_readout(i, params) for params, i in zip(detectors, readings)
        )
        return readings, outs

    return contact


def run_experiment(
    config: ExperimentConfig,
    on_record: Callable[[TrialRecord], None] | None = None,
    keep_records: bool = True,
) -> tuple[list[TrialRecord], ExperimentSummary]:
    """Run all trials and aggregate agreement statistics.

    ``on_record`` is called with each record as it is produced (in trial
    order), which lets callers stream large runs to disk; pass
    ``keep_records=False`` to drop records after the callback and keep
    memory bounded.  Output is a pure function of the config.
    """
    probs = born_probabilities(config.state)
    n = config.n_detectors
    scenario = config.scenario

    if isinstance(scenario, Unanimous):
        draw = lambda rng: sample_unanimous(probs, n, rng)
    elif isinstance(scenario, Binomial):
        draw = lambda rng: sample_binomial_trial(probs, n, rng)
    else:
        draw = lambda rng: sample_custom_trial(scenario, probs, n, rng)

    physical = _physical_layer(config.detector_model)
    streams = TrialStreams(config.seed)
    acc = _Accumulator(n)
    records: list[TrialRecord] = []

    for i in range(config.n_trials):
        rng = streams.stream(i)
        pattern = draw(rng)
        readings, outcomes = physical(pattern.outcomes, rng)
        record = TrialRecord(
            index=i,
            latent=pattern.latent_sigma,
            raw_readings=readings,
            outcomes=outcomes,
        )
        acc.add(outcomes)
        if on_record is not None:
            on_record(record)
        if keep_records:
            records.append(record)

    return records, acc.summary()


def summarize(records: Sequence[TrialRecord]) -> ExperimentSummary:
    """Aggregate agreement statistics from existing trial records."""
    if len(records) == 0:
        raise EmptyInputError("no trial records to summarize")
    n = len(records[0].outcomes)
    acc = _Accumulator(n)
    for rec in records:
        if len(rec.outcomes) != n:
            raise RaggedRecordsError(
                f"trial {rec.index} has {len(rec.outcomes)} outcomes, expected {n}"
            )
        acc.add(rec.outcomes)
    return acc.summary()
