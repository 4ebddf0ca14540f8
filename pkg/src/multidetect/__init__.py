"""Simultaneous multi-detector measurement: simulation and scenario inference.

Simulates repeated measurements of a prepared two-level system watched by
several detectors at once, under two competing outcome laws (all detectors
unanimous per trial, or each detector latching independently), through two
physical detector models (thermal oscillator pointers and biased quantum
point contacts).  A likelihood engine decides from trial data which law
the data supports and how many trials such a decision needs.
"""

from .constants import NATURAL, SI, PhysicalConstants
from .experiment import (
    ExperimentConfig,
    ExperimentSummary,
    IdealModel,
    OscillatorModel,
    QpcModel,
    TrialRecord,
    model_misreads,
    run_experiment,
    summarize,
)
from .inference import (
    ErrorModel,
    ScenarioVerdict,
    decide,
    loglik_binomial,
    loglik_unanimous,
    required_trials,
)
from .oscillator import OscillatorParams, PointerReading
from .qpc import CurrentSample, CurrentStats, QpcParams
from .rng import TrialStreams, trial_rng
from .scenarios import (
    Binomial,
    Custom,
    TrialOutcome,
    Unanimous,
    binomial_pmf,
    sample_binomial_trial,
    sample_custom_trial,
    sample_multinomial_trial,
    sample_unanimous,
)
from .state import (
    Amplitudes,
    MultiOutcomeProbabilities,
    OutcomeProbabilities,
    born_probabilities,
    make_amplitudes,
)

__version__ = "0.1.0"

__all__ = [
    "Amplitudes",
    "Binomial",
    "Custom",
    "CurrentSample",
    "CurrentStats",
    "ErrorModel",
    "ExperimentConfig",
    "ExperimentSummary",
    "IdealModel",
    "MultiOutcomeProbabilities",
    "NATURAL",
    "OscillatorModel",
    "OscillatorParams",
    "OutcomeProbabilities",
    "PhysicalConstants",
    "PointerReading",
    "QpcModel",
    "QpcParams",
    "SI",
    "ScenarioVerdict",
    "TrialOutcome",
    "TrialRecord",
    "TrialStreams",
    "Unanimous",
    "binomial_pmf",
    "born_probabilities",
    "decide",
    "loglik_binomial",
    "loglik_unanimous",
    "make_amplitudes",
    "model_misreads",
    "required_trials",
    "run_experiment",
    "sample_binomial_trial",
    "sample_custom_trial",
    "sample_multinomial_trial",
    "sample_unanimous",
    "summarize",
    "trial_rng",
]
