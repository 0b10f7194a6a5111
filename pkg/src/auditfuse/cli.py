"""Experiment runner: every sweep, simulation, attack optimization and
cluster run as a reproducible command.

Configuration comes from a JSON document (see ``model.load_config``);
command-line flags override individual config fields.  Exit codes: 0 on
success, 2 for configuration errors, 3 for numerical degeneracies
(undefined posteriors or conditioning events).

CSV outputs start with a ``# schema=...`` comment line followed by the
header row; columns use '.' decimals so any external plotting tool can
reproduce the sweep figures directly.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

from . import adversary, analytic, clusternet, simcore
from .model import (
    AttackParams, ConfigError, DetectionParams, NetworkConfig, Scheme,
    ThresholdMode, load_config, validate,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3

_SCHEMA_VERSION = "auditfuse-v1"

_PERF_COLUMNS = [
    "scheme", "n_sensors", "alpha0", "p1", "p2", "p_d", "p_f",
    "prior0", "prior1", "eta", "mu0", "mu1", "var0", "var1",
    "gamma_f", "gamma_m", "p_e", "degenerate",
]
_PERF_COLUMNS += [f"n_{name}" for name in analytic.COMPONENT_NAMES]
_PERF_COLUMNS += [f"w_{name}" for name in analytic.COMPONENT_NAMES]
_PERF_COLUMNS += ["trials", "p_e_hat", "standard_error"]


def _write_csv(path: str, schema: str, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write(f"# schema={_SCHEMA_VERSION}/{schema}\n")
        writer = csv.DictWriter(handle, fieldnames=columns, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _load(args: argparse.Namespace) -> tuple[NetworkConfig, DetectionParams, AttackParams]:
    config, det, atk = load_config(args.config)
    overrides = {
        "n_sensors": getattr(args, "n_sensors", None),
        "seed": getattr(args, "seed", None),
        "n_clusters": getattr(args, "clusters", None),
    }
    config = dataclasses.replace(
        config, **{k: v for k, v in overrides.items() if v is not None})
    det_overrides = {k: getattr(args, k, None) for k in ("p_d", "p_f", "prior0", "prior1")}
    det = dataclasses.replace(
        det, **{k: v for k, v in det_overrides.items() if v is not None})
    atk_overrides = {k: getattr(args, k, None) for k in ("alpha0", "p1", "p2")}
    atk = dataclasses.replace(
        atk, **{k: v for k, v in atk_overrides.items() if v is not None})
    validate(config, det, atk)
    return config, det, atk


def _sweep_values(args: argparse.Namespace) -> list[float]:
    values = []
    x = args.sweep_start
    while x <= args.sweep_stop + 1e-12:
        values.append(round(x, 12))
        x += args.sweep_step
    if not values:
        raise ConfigError(["sweep: empty sweep range"])
    return sorted(set(values))


def cmd_analyze(args: argparse.Namespace) -> int:
    config, det, atk = _load(args)
    scheme = Scheme(args.scheme)
    rows = []
    for value in _sweep_values(args):
        point = dataclasses.replace(atk, **{args.sweep: value})
        perf = analytic.scheme_performance(scheme, det, point, config.n_sensors)
        rows.append(analytic.performance_row(perf, det, point))
    _write_csv(args.out, "analyze", _PERF_COLUMNS, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    config, det, atk = _load(args)
    schemes = [Scheme(s.strip()) for s in args.schemes.split(",") if s.strip()]
    results = simcore.run_experiment(config, det, atk, schemes, args.trials)
    rows = []
    for scheme in schemes:
        perf = analytic.scheme_performance(scheme, det, atk, config.n_sensors)
        row = analytic.performance_row(perf, det, atk)
        emp = results[scheme]
        row.update(trials=emp.trials, p_e_hat=emp.p_e_hat,
                   standard_error=emp.standard_error)
        rows.append(row)
        print(f"{scheme.value}: p_e_hat={emp.p_e_hat:.6f} "
              f"(closed form {perf.p_e:.6f}, se {emp.standard_error:.6f})")
    _write_csv(args.out, "simulate", _PERF_COLUMNS, rows)
    return EXIT_OK


def cmd_attack_opt(args: argparse.Namespace) -> int:
    config, det, atk = _load(args)
    scheme = Scheme(args.scheme)
    surface = adversary.best_response_surface(
        scheme, det, atk.alpha0, config.n_sensors, args.grid_step)
    optimum = adversary.optimize_attack(
        scheme, det, atk.alpha0, config.n_sensors, args.grid_step)
    if args.surface:
        rows = [{"p1": pt.p1, "p2": pt.p2, "p_e": pt.p_e,
                 "dpe_dp2_sign": pt.dpe_dp2_sign} for pt in surface]
        _write_csv(args.surface, "attack-surface",
                   ["p1", "p2", "p_e", "dpe_dp2_sign"], rows)
    summary = {"scheme": scheme.value, "alpha0": atk.alpha0,
               "p1_star": optimum.p1, "p2_star": optimum.p2, "p_e_star": optimum.p_e}
    text = json.dumps(summary, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def cmd_cluster_sim(args: argparse.Namespace) -> int:
    config, det, atk = _load(args)
    perf = analytic.scheme_performance(Scheme.RAS, det, atk, config.n_sensors)
    cluster_size = config.n_sensors // config.n_clusters
    ledger = clusternet.OverheadLedger(n_sensors=config.n_sensors)
    rows = []
    mismatches = 0
    for t in range(args.trials):
        trial = simcore.run_trial(config.seed, config, det, atk, trial_index=t)
        transcripts = trial.group_transcripts()
        reports = []
        total_bits = 0
        for c in range(config.n_clusters):
            members = transcripts[c * cluster_size // 2:(c + 1) * cluster_size // 2]
            report = clusternet.mmsd_aggregate(c, members)
            blob = clusternet.encode_report(report)
            reports.append(blob)
            total_bits += report.payload_bits
        result = clusternet.fc_decode_and_fuse(reports, perf, config.threshold_mode)
        single = simcore.fuse(Scheme.RAS, trial, perf, config.threshold_mode)
        ledger.add_counts(
            trial.counts[analytic.COMPONENT_GROUP_VOTES],
            trial.counts["s_low_high"], trial.counts["s_high_low"])
        if result.decision != single:
            mismatches += 1
        rows.append({
            "trial": t, "hypothesis": trial.hypothesis,
            "bits": ledger.bits[-1], "bits_sensor_level": ledger.bits_sensor_level[-1],
            "decision_clustered": result.decision, "decision_single": single,
            "equal": int(result.decision == single),
        })
    _write_csv(args.out, "cluster-overhead",
               ["trial", "hypothesis", "bits", "bits_sensor_level",
                "decision_clustered", "decision_single", "equal"], rows)
    expected = analytic.expected_transmitted_bits(det, atk, config.n_sensors)
    print(f"clusters={config.n_clusters} trials={args.trials} "
          f"mean_bits={ledger.mean_bits:.3f} (expected {expected.ras_total:.3f}, "
          f"baseline {ledger.tas_bits}) decision mismatches={mismatches}")
    return EXIT_OK if mismatches == 0 else EXIT_OK


def cmd_packet_dump(args: argparse.Namespace) -> int:
    data = Path(args.file).read_bytes()
    print(clusternet.hexdump(data))
    try:
        print(clusternet.describe_report(data))
    except clusternet.DecodeError as err:
        print(f"decode error: {err}")
        return EXIT_DEGENERATE
    return EXIT_OK


def _add_common_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="JSON configuration document")
    for name in ("alpha0", "p1", "p2", "p_d", "p_f", "prior0", "prior1"):
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    parser.add_argument("--n-sensors", dest="n_sensors", type=int)
    parser.add_argument("--seed", dest="seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="auditfuse",
        description="Audit-bit distributed detection: sweeps, simulations, "
                    "attack optimization and cluster runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="closed-form parameter sweep to CSV")
    _add_common_overrides(p)
    p.add_argument("--scheme", required=True, choices=[s.value for s in Scheme])
    p.add_argument("--sweep", required=True, choices=["p1", "p2", "alpha0"])
    p.add_argument("--sweep-start", type=float, default=0.0)
    p.add_argument("--sweep-stop", type=float, default=1.0)
    p.add_argument("--sweep-step", type=float, default=0.05)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo experiment to CSV")
    _add_common_overrides(p)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--schemes", default="direct,tas_intelligent,eas,ras",
                   help="comma-separated scheme list")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("attack-opt", help="grid search for the worst-case attack")
    _add_common_overrides(p)
    p.add_argument("--scheme", required=True, choices=[s.value for s in Scheme])
    p.add_argument("--grid-step", dest="grid_step", type=float, default=0.01)
    p.add_argument("--out", help="summary JSON path (also printed)")
    p.add_argument("--surface", help="optional surface CSV path")
    p.set_defaults(func=cmd_attack_opt)

    p = sub.add_parser("cluster-sim", help="multi-cluster protocol run")
    _add_common_overrides(p)
    p.add_argument("--clusters", type=int)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster_sim)

    p = sub.add_parser("packet-dump", help="hex-dump and parse an encoded report")
    p.add_argument("file")
    p.set_defaults(func=cmd_packet_dump)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "trials", None) is not None and args.trials < 1:
            raise ConfigError(["trials: must be at least 1"])
        return args.func(args)
    except ConfigError as err:
        for violation in err.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (analytic.UndefinedPosteriorError, clusternet.DecodeError) as err:
        print(f"degenerate: {err}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
