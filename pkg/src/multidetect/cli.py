"""Command-line interface: simulate, infer, discriminability, sweep.

All file outputs embed the resolved configuration and seed, so any run can
be reproduced byte-for-byte from its own artifacts.  Verdicts and
diagnostics go to stdout as JSON (schemas in docs/); status chatter goes
to stderr only.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import config as cfg
from . import oscillator as osc
from . import qpc as qpcmod
from .errors import ConfigError, ModelError, NoDiscriminationError
from .experiment import (
    IdealModel,
    OscillatorModel,
    QpcModel,
    TrialRecord,
    run_experiment,
)
from .inference import DECISION_INCONCLUSIVE, decide, required_trials
from .state import born_probabilities

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_MODEL = 2
EXIT_INCONCLUSIVE = 3

CONFIG_COMMENT = "# multidetect-config: "
SWEEP_COMMENT = "# multidetect-sweep: "

REQUIRED_TRIALS_ALPHAS = (0.05, 0.01, 0.001)


@dataclass(frozen=True)
class RunManifest:
    """Where to read the config and put the outputs."""

    config_path: Path
    output_dir: Path
    formats: frozenset[str] = frozenset({"csv", "json"})
    verbosity: int = 0


def _say(manifest_or_level, message: str) -> None:
    level = manifest_or_level.verbosity if hasattr(manifest_or_level, "verbosity") else manifest_or_level
    if level > 0:
        print(message, file=sys.stderr)


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        if math.isnan(value):
            return "NaN"
        return "Infinity" if value > 0 else "-Infinity"
    return value


def _reading_scale(model) -> float:
    # currents are reported in nA; pointer positions and ideal bits verbatim
    return 1e9 if isinstance(model, QpcModel) else 1.0


def _records_header(n_detectors: int) -> str:
    readings = ",".join(f"reading_{i + 1}" for i in range(n_detectors))
    outcomes = ",".join(f"outcome_{i + 1}" for i in range(n_detectors))
    return f"trial,latent,{readings},{outcomes}"


def _record_row(record: TrialRecord, scale: float) -> str:
    latent = "" if record.latent is None else str(record.latent)
    readings = ",".join(repr(float(x) * scale) for x in record.raw_readings)
    outcomes = ",".join(str(o) for o in record.outcomes)
    return f"{record.index},{latent},{readings},{outcomes}"


def cmd_simulate(manifest: RunManifest, seed_override: int | None = None, threads: int = 1) -> int:
    """Run the configured experiment; write records CSV and summary JSON."""
    if threads < 1:
        raise ConfigError("threads", "must be at least 1")
    resolved = cfg.load(manifest.config_path, seed_override=seed_override)
    try:
        manifest.output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError("output_dir", f"not writable: {exc}") from exc

    experiment = resolved.experiment
    echo_line = cfg.canonical_json(resolved.echo, compact=True)
    scale = _reading_scale(experiment.detector_model)

    csv_path = manifest.output_dir / "records.csv"
    json_path = manifest.output_dir / "summary.json"

    writer = None
    fh = None
    if "csv" in manifest.formats:
        try:
            fh = open(csv_path, "w", newline="")
        except OSError as exc:
            raise ConfigError("output_dir", f"not writable: {exc}") from exc
        fh.write(CONFIG_COMMENT + echo_line + "\n")
        fh.write(_records_header(experiment.n_detectors) + "\n")

        def writer(record, _fh=fh, _scale=scale):
            _fh.write(_record_row(record, _scale) + "\n")

    try:
        _, summary = run_experiment(experiment, on_record=writer, keep_records=False)
    finally:
        if fh is not None:
            fh.close()

    if "json" in manifest.formats:
        payload = {
            "M": summary.n_trials,
            "M0": summary.m0_unanimous_zero,
            "M1": summary.m1_unanimous_one,
            "m": summary.disagreements,
            "histogram_n0": list(summary.histogram_n0),
            "agreement_fraction": summary.agreement_fraction,
            "config_echo": resolved.echo,
            "seed": experiment.seed,
        }
        try:
            json_path.write_text(cfg.canonical_json(payload))
        except OSError as exc:
            raise ConfigError("output_dir", f"not writable: {exc}") from exc
    _say(manifest, f"simulated {summary.n_trials} trials into {manifest.output_dir}")
    return EXIT_OK


def _parse_records_csv(path) -> tuple[int, list[TrialRecord]]:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError("records", f"cannot read {path}: {exc}") from exc

    header = None
    header_line = 0
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
            header_line = lineno
            continue
        rows.append((lineno, line))
    if header is None:
        raise ConfigError("records", "no header row found")

    n = sum(1 for col in header if col.startswith("outcome_"))
    expected = ["trial", "latent"]
    expected += [f"reading_{i + 1}" for i in range(n)]
    expected += [f"outcome_{i + 1}" for i in range(n)]
    if n < 1 or header != expected:
        raise ConfigError("records", f"line {header_line}: malformed header {header!r}")

    records = []
    for lineno, line in rows:
        parts = line.split(",")
        if len(parts) != len(header):
            raise ConfigError(
                "records", f"line {lineno}: expected {len(header)} fields, got {len(parts)}"
            )
        try:
            index = int(parts[0])
            latent = None if parts[1] == "" else int(parts[1])
            readings = tuple(float(v) for v in parts[2 : 2 + n])
            outcomes = tuple(int(v) for v in parts[2 + n :])
        except ValueError as exc:
            raise ConfigError("records", f"line {lineno}: {exc}") from exc
        if any(o not in (0, 1) for o in outcomes):
            raise ConfigError("records", f"line {lineno}: outcomes must be 0 or 1")
        records.append(
            TrialRecord(index=index, latent=latent, raw_readings=readings, outcomes=outcomes)
        )
    if not records:
        raise ConfigError("records", "no trial rows found")
    return n, records


def cmd_infer(records_path, config_path) -> int:
    """Score the recorded trials under both laws and print the verdict JSON."""
    resolved = cfg.load(config_path)
    n, records = _parse_records_csv(records_path)
    if n != resolved.experiment.n_detectors:
        raise ConfigError(
            "records",
            f"records have {n} detectors but config says {resolved.experiment.n_detectors}",
        )
    probs = born_probabilities(resolved.experiment.state)
    verdict = decide(
        records,
        probs,
        resolved.error_model,
        log_odds_threshold=resolved.log_odds_threshold,
        prior_log_odds=resolved.prior_log_odds,
    )
    try:
        m_required = required_trials(probs, resolved.alpha, _pair_error_model(resolved))
    except NoDiscriminationError:
        m_required = None
    payload = {
        "loglik_H1": _json_safe(verdict.loglik_unanimous),
        "loglik_H2": _json_safe(verdict.loglik_binomial),
        "log_odds": _json_safe(verdict.log_odds),
        "decision": verdict.decision,
        "confidence": verdict.confidence,
        "M_used": len(records),
        "M_required_alpha": m_required,
    }
    print(cfg.canonical_json(payload), end="")
    return EXIT_INCONCLUSIVE if verdict.decision == DECISION_INCONCLUSIVE else EXIT_OK


def _pair_error_model(resolved):
    from .inference import ErrorModel

    return ErrorModel(resolved.error_model.eps[:2])


def cmd_discriminability(config_path) -> int:
    """Print per-detector separation diagnostics and the required-trials table."""
    resolved = cfg.load(config_path)
    model = resolved.experiment.detector_model
    if isinstance(model, IdealModel):
        raise ConfigError("detector_model", "discriminability requires a physical detector model")

    detectors = []
    if isinstance(model, OscillatorModel):
        for i, params in enumerate(model.detectors):
            ratio = osc.distinguishability_ratio(params)
            detectors.append(
                {
                    "index": i,
                    "metric": "position_ratio",
                    "value": ratio,
                    "reliable": osc.is_reliable(params),
                    "misread": osc.misread_probability(params),
                }
            )
    else:
        for i, params in enumerate(model.detectors):
            detectors.append(
                {
                    "index": i,
                    "metric": "current_discriminability",
                    "value": qpcmod.discriminability(params),
                    "reliable": qpcmod.is_reliable(params),
                    "misread": qpcmod.misread_probability(params),
                }
            )

    probs = born_probabilities(resolved.experiment.state)
    table = {}
    for alpha in REQUIRED_TRIALS_ALPHAS:
        try:
            table[str(alpha)] = required_trials(probs, alpha, _pair_error_model(resolved))
        except NoDiscriminationError:
            table[str(alpha)] = None

    payload = {
        "model": model.model,
        "detectors": detectors,
        "required_trials": table,
    }
    print(cfg.canonical_json(payload), end="")
    return EXIT_OK


def _apply_field(raw, dotted: str, value: float) -> None:
    parts = dotted.split(".")
    node = raw
    for part in parts[:-1]:
        if isinstance(node, list) and part.isdigit() and int(part) < len(node):
            node = node[int(part)]
        elif isinstance(node, dict) and part in node:
            node = node[part]
        else:
            raise ConfigError(dotted, "unknown config field")
    last = parts[-1]
    if isinstance(node, list) and last.isdigit() and int(last) < len(node):
        current = node[int(last)]
        if isinstance(current, bool) or not isinstance(current, (int, float)):
            raise ConfigError(dotted, "field is not numeric")
        node[int(last)] = value
    elif isinstance(node, dict) and last in node:
        current = node[last]
        if isinstance(current, bool) or not isinstance(current, (int, float)):
            raise ConfigError(dotted, "field is not numeric")
        node[last] = value
    else:
        raise ConfigError(dotted, "unknown config field")


def _detector_diagnostics(model) -> list[float]:
    if isinstance(model, OscillatorModel):
        return [osc.distinguishability_ratio(p) for p in model.detectors]
    if isinstance(model, QpcModel):
        return [qpcmod.discriminability(p) for p in model.detectors]
    return []


def cmd_sweep(config_path, field: str, start: float, stop: float, steps: int, out_path, seed_override=None) -> int:
    """Run one experiment per grid point of a numeric config field; emit tidy CSV."""
    if steps < 1:
        raise ConfigError("steps", "sweep needs at least one grid point")
    try:
        raw = json.loads(Path(config_path).read_text())
    except OSError as exc:
        raise ConfigError("config", f"cannot read {config_path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from exc

    base = cfg.resolve(raw, seed_override=seed_override)
    # fail fast on unknown fields before running anything
    probe = copy.deepcopy(raw)
    _apply_field(probe, field, float(start))

    physical = not isinstance(base.experiment.detector_model, IdealModel)
    n_det = base.experiment.n_detectors
    header = ["value", "m_over_M", "M0_over_M", "M1_over_M", "log_odds"]
    if physical:
        header += [f"disc_{i + 1}" for i in range(n_det)]

    sweep_echo = {
        "config_echo": base.echo,
        "field": field,
        "start": float(start),
        "stop": float(stop),
        "steps": int(steps),
    }

    out_path = Path(out_path)
    try:
        if out_path.parent != Path(""):
            out_path.parent.mkdir(parents=True, exist_ok=True)
        fh = open(out_path, "w", newline="")
    except OSError as exc:
        raise ConfigError("out", f"not writable: {exc}") from exc
    with fh:
        fh.write(SWEEP_COMMENT + cfg.canonical_json(sweep_echo, compact=True) + "\n")
        fh.write(",".join(header) + "\n")
        for value in np.linspace(start, stop, steps):
            point_raw = copy.deepcopy(raw)
            _apply_field(point_raw, field, float(value))
            point = cfg.resolve(point_raw, seed_override=seed_override)
            records, summary = run_experiment(point.experiment)
            probs = born_probabilities(point.experiment.state)
            verdict = decide(
                records,
                probs,
                point.error_model,
                log_odds_threshold=point.log_odds_threshold,
                prior_log_odds=point.prior_log_odds,
            )
            m_total = summary.n_trials
            row = [
                repr(float(value)),
                repr(summary.disagreements / m_total),
                repr(summary.m0_unanimous_zero / m_total),
                repr(summary.m1_unanimous_one / m_total),
                repr(float(verdict.log_odds)),
            ]
            if physical:
                row += [repr(float(d)) for d in _detector_diagnostics(point.experiment.detector_model)]
            fh.write(",".join(row) + "\n")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multidetect",
        description="Simulate simultaneous multi-detector measurements and decide which outcome law the data supports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an experiment; write records CSV and summary JSON")
    sim.add_argument("--config", required=True, type=Path)
    sim.add_argument("--out", required=True, type=Path)
    sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    sim.add_argument("--format", default="csv,json", help="comma-separated subset of {csv,json}")
    sim.add_argument("--threads", type=int, default=1, help="scheduling hint; never changes output")
    sim.add_argument("-v", "--verbose", action="count", default=0)

    inf = sub.add_parser("infer", help="score recorded trials under both laws")
    inf.add_argument("--records", required=True, type=Path)
    inf.add_argument("--config", required=True, type=Path)

    disc = sub.add_parser("discriminability", help="per-detector separation diagnostics")
    disc.add_argument("--config", required=True, type=Path)

    swp = sub.add_parser("sweep", help="grid-sweep one numeric config field")
    swp.add_argument("--config", required=True, type=Path)
    swp.add_argument("--field", required=True, help="dotted path, e.g. state.p0")
    swp.add_argument("--start", required=True, type=float)
    swp.add_argument("--stop", required=True, type=float)
    swp.add_argument("--steps", required=True, type=int)
    swp.add_argument("--out", required=True, type=Path)
    swp.add_argument("--seed", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            formats = frozenset(f.strip() for f in args.format.split(",") if f.strip())
            if not formats or not formats <= {"csv", "json"}:
                raise ConfigError("format", f"must be a subset of {{csv,json}}, got {args.format!r}")
            manifest = RunManifest(
                config_path=args.config,
                output_dir=args.out,
                formats=formats,
                verbosity=args.verbose,
            )
            return cmd_simulate(manifest, seed_override=args.seed, threads=args.threads)
        if args.command == "infer":
            return cmd_infer(args.records, args.config)
        if args.command == "discriminability":
            return cmd_discriminability(args.config)
        if args.command == "sweep":
            return cmd_sweep(
                args.config, args.field, args.start, args.stop, args.steps, args.out,
                seed_override=args.seed,
            )
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ModelError as exc:
        print(f"model error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
