"""JSON experiment configuration: parsing, validation, canonical echo.

Field names carry explicit units (bias_voltage_uV, observation_time_ns);
values are converted to SI once, here, and never again downstream.  Every
output file embeds the resolved configuration returned by ``resolve``, and
re-running from that echo reproduces the run byte-for-byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

from .constants import NATURAL, SI
from .errors import ConfigError, InvalidPmfError, ZeroStateError
from .experiment import (
    DetectorModel,
    ExperimentConfig,
    IdealModel,
    OscillatorModel,
    QpcModel,
    model_misreads,
)
from .inference import DEFAULT_LOG_ODDS_THRESHOLD, ErrorModel
from .oscillator import OscillatorParams
from .qpc import QpcParams
from .scenarios import Binomial, Custom, ScenarioKind, Unanimous
from .state import Amplitudes, make_amplitudes

DEFAULT_ALPHA = 0.01

# a non-discriminating detector saturates at a coin flip; cap the derived
# misread just below the anti-correlation boundary so the likelihood stays defined
_DERIVED_EPS_CAP = 0.5 - 1e-9

_OSC_FIELDS = ("mass", "omega", "beta", "coupling_lambda", "relaxation_rate", "measurement_time")
_QPC_FIELDS = ("bias_voltage_uV", "observation_time_ns", "t0", "t1")


@dataclass(frozen=True)
class ResolvedConfig:
    """Validated experiment plus inference settings and the canonical echo."""

    experiment: ExperimentConfig
    error_model: ErrorModel
    log_odds_threshold: float
    prior_log_odds: float
    alpha: float
    echo: dict


def _require(raw: dict, field: str, path: str):
    if field not in raw:
        raise ConfigError(f"{path}.{field}" if path else field, "missing required field")
    return raw[field]


def _number(value, path: str, minimum=None, maximum=None, strict_min=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(path, "must be finite")
    if minimum is not None and (v < minimum or (strict_min and v == minimum)):
        raise ConfigError(path, f"must be {'>' if strict_min else '>='} {minimum}, got {v}")
    if maximum is not None and v > maximum:
        raise ConfigError(path, f"must be <= {maximum}, got {v}")
    return v


def _integer(value, path: str, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value}")
    return value


def _parse_state(raw) -> Amplitudes:
    if isinstance(raw, dict):
        if set(raw.keys()) != {"p0"}:
            raise ConfigError("state", "shorthand form must be exactly {\"p0\": x}")
        p0 = _number(raw["p0"], "state.p0", minimum=0.0, maximum=1.0)
        return make_amplitudes(math.sqrt(p0), 0.0, math.sqrt(1.0 - p0), 0.0)
    if isinstance(raw, list) and len(raw) == 4:
        comps = [_number(v, f"state[{i}]") for i, v in enumerate(raw)]
        try:
            return make_amplitudes(*comps)
        except ZeroStateError as exc:
            raise ConfigError("state", str(exc)) from exc
    raise ConfigError("state", "expected [re0, im0, re1, im1] or {\"p0\": x}")


def _parse_scenario(raw) -> ScenarioKind:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("scenario", "expected an object with a \"kind\" field")
    kind = raw["kind"]
    if kind == "unanimous":
        return Unanimous()
    if kind == "binomial":
        return Binomial()
    if kind == "custom":
        pmf = raw.get("pmf")
        if not isinstance(pmf, list) or not pmf:
            raise ConfigError("scenario.pmf", "custom scenario needs a non-empty pmf list")
        return Custom([_number(p, f"scenario.pmf[{i}]", minimum=0.0) for i, p in enumerate(pmf)])
    raise ConfigError("scenario.kind", f"unknown scenario kind {kind!r}")


def _parse_oscillator_detector(raw: dict, path: str, constants) -> OscillatorParams:
    for f in _OSC_FIELDS:
        _require(raw, f, path)
    unknown = set(raw) - set(_OSC_FIELDS)
    if unknown:
        raise ConfigError(path, f"unknown fields {sorted(unknown)}")
    kwargs = {}
    for f in _OSC_FIELDS:
        strict = f != "coupling_lambda"
        kwargs[f] = _number(raw[f], f"{path}.{f}", minimum=0.0, strict_min=strict)
    return OscillatorParams(constants=constants, **kwargs)


def _parse_qpc_detector(raw: dict, path: str) -> QpcParams:
    for f in _QPC_FIELDS:
        _require(raw, f, path)
    unknown = set(raw) - set(_QPC_FIELDS)
    if unknown:
        raise ConfigError(path, f"unknown fields {sorted(unknown)}")
    return QpcParams(
        bias_voltage=_number(raw["bias_voltage_uV"], f"{path}.bias_voltage_uV", 0.0, strict_min=True) * 1e-6,
        observation_time=_number(raw["observation_time_ns"], f"{path}.observation_time_ns", 0.0, strict_min=True) * 1e-9,
        t_given_0=_number(raw["t0"], f"{path}.t0", minimum=0.0, maximum=1.0),
        t_given_1=_number(raw["t1"], f"{path}.t1", minimum=0.0, maximum=1.0),
        constants=SI,
    )


def _parse_detector_model(raw) -> tuple[DetectorModel, dict]:
    if not isinstance(raw, dict) or "model" not in raw:
        raise ConfigError("detector_model", "expected an object with a \"model\" field")
    model = raw["model"]
    if model == "ideal":
        return IdealModel(), {"model": "ideal"}
    if model == "oscillator":
        unit_system = raw.get("unit_system", "si")
        if unit_system not in ("si", "natural"):
            raise ConfigError("detector_model.unit_system", f"must be \"si\" or \"natural\", got {unit_system!r}")
        constants = SI if unit_system == "si" else NATURAL
        detectors_raw = raw.get("detectors")
        if not isinstance(detectors_raw, list) or not detectors_raw:
            raise ConfigError("detector_model.detectors", "need a non-empty list of detectors")
        detectors = []
        for i, det in enumerate(detectors_raw):
            path = f"detector_model.detectors[{i}]"
            if not isinstance(det, dict):
                raise ConfigError(path, "expected an object")
            try:
                detectors.append(_parse_oscillator_detector(det, path, constants))
            except ValueError as exc:
                raise ConfigError(path, str(exc)) from exc
        echo = {
            "model": "oscillator",
            "unit_system": unit_system,
            "detectors": [{f: getattr(p, f) for f in _OSC_FIELDS} for p in detectors],
        }
        return OscillatorModel(detectors), echo
    if model == "qpc":
        sampling = raw.get("sampling", "exact")
        if sampling not in ("exact", "gaussian"):
            raise ConfigError("detector_model.sampling", f"must be \"exact\" or \"gaussian\", got {sampling!r}")
        detectors_raw = raw.get("detectors")
        if not isinstance(detectors_raw, list) or not detectors_raw:
            raise ConfigError("detector_model.detectors", "need a non-empty list of detectors")
        detectors = []
        detector_echoes = []
        for i, det in enumerate(detectors_raw):
            path = f"detector_model.detectors[{i}]"
            if not isinstance(det, dict):
                raise ConfigError(path, "expected an object")
            try:
                detectors.append(_parse_qpc_detector(det, path))
            except ValueError as exc:
                raise ConfigError(path, str(exc)) from exc
            # echo the values as given: a back-conversion from SI would not
            # round-trip bit-exactly, breaking rerun-from-echo reproducibility
            detector_echoes.append({f: float(det[f]) for f in _QPC_FIELDS})
        echo = {
            "model": "qpc",
            "sampling": sampling,
            "detectors": detector_echoes,
        }
        return QpcModel(detectors, sampling=sampling), echo
    raise ConfigError("detector_model.model", f"unknown model {model!r}")


def resolve(raw: dict, seed_override: int | None = None) -> ResolvedConfig:
    """Validate a raw config dict and build the runnable objects plus echo."""
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a JSON object")

    state = _parse_state(_require(raw, "state", ""))
    scenario = _parse_scenario(_require(raw, "scenario", ""))
    model, model_echo = _parse_detector_model(_require(raw, "detector_model", ""))
    n_trials = _integer(_require(raw, "n_trials", ""), "n_trials", minimum=1)
    if isinstance(model, IdealModel):
        n_detectors = _integer(raw.get("n_detectors", 2), "n_detectors", minimum=2)
    else:
        n_detectors = _integer(
            raw.get("n_detectors", len(model.detectors)), "n_detectors", minimum=2
        )
    seed = _integer(raw.get("seed", 0), "seed")
    if seed_override is not None:
        seed = seed_override

    try:
        experiment = ExperimentConfig(
            state=state,
            scenario=scenario,
            detector_model=model,
            n_trials=n_trials,
            n_detectors=n_detectors,
            seed=seed,
        )
    except (ValueError, InvalidPmfError) as exc:
        field = "scenario.pmf" if isinstance(exc, InvalidPmfError) else "n_detectors"
        raise ConfigError(field, str(exc)) from exc

    if "error_model" in raw:
        em_raw = raw["error_model"]
        if not isinstance(em_raw, dict) or "eps" not in em_raw or not isinstance(em_raw["eps"], list):
            raise ConfigError("error_model", "expected {\"eps\": [..]}")
        eps = [
            _number(e, f"error_model.eps[{i}]", minimum=0.0) for i, e in enumerate(em_raw["eps"])
        ]
        if len(eps) != n_detectors:
            raise ConfigError("error_model.eps", f"need {n_detectors} entries, got {len(eps)}")
        try:
            error_model = ErrorModel(eps)
        except ValueError as exc:
            raise ConfigError("error_model.eps", str(exc)) from exc
    else:
        error_model = ErrorModel(
            min(e, _DERIVED_EPS_CAP) for e in model_misreads(model, n_detectors)
        )

    inf_raw = raw.get("inference", {})
    if not isinstance(inf_raw, dict):
        raise ConfigError("inference", "expected an object")
    threshold = _number(
        inf_raw.get("log_odds_threshold", DEFAULT_LOG_ODDS_THRESHOLD),
        "inference.log_odds_threshold",
        minimum=0.0,
        strict_min=True,
    )
    prior = _number(inf_raw.get("prior_log_odds", 0.0), "inference.prior_log_odds")
    alpha = _number(inf_raw.get("alpha", DEFAULT_ALPHA), "inference.alpha", 0.0, 1.0, strict_min=True)

    scenario_echo: dict[str, Any] = {"kind": scenario.kind}
    if isinstance(scenario, Custom):
        scenario_echo["pmf"] = list(scenario.pmf)

    echo = {
        "state": [state.c0.real, state.c0.imag, state.c1.real, state.c1.imag],
        "scenario": scenario_echo,
        "detector_model": model_echo,
        "n_detectors": n_detectors,
        "n_trials": n_trials,
        "seed": seed,
        "error_model": {"eps": list(error_model.eps)},
        "inference": {
            "log_odds_threshold": threshold,
            "prior_log_odds": prior,
            "alpha": alpha,
        },
    }

    return ResolvedConfig(
        experiment=experiment,
        error_model=error_model,
        log_odds_threshold=threshold,
        prior_log_odds=prior,
        alpha=alpha,
        echo=echo,
    )


def load(path, seed_override: int | None = None) -> ResolvedConfig:
    """Read and resolve a JSON config file."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON in {path}: {exc}") from exc
    return resolve(raw, seed_override=seed_override)


def canonical_json(obj, compact: bool = False) -> str:
    """Deterministic JSON serialization used for all embedded config echoes."""
    if compact:
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
