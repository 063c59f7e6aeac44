"""Command-line harness.

Subcommands:

    satett simulate --config cfg.json [--out-dir DIR] [--seed N] [--reps N]
    satett validate --data data.csv --schema sidecar.json
    satett analyze  --config cfg.json

Exit codes: 0 success, 2 configuration or validation error, 3 data
generation error. Config files are validated against the JSON schemas
published under docs/schemas/ before anything runs. Output files are a
deterministic, byte-for-byte function of (config, seed).
"""

import argparse
import csv
import json
import os
import sys

import jsonschema
import numpy as np

from satett import schemas
from satett.data import SubgroupTarget, load_csv, validate
from satett.errors import ConfigError, GenerationError, SatettError, SchemaError
from satett.estimators import OUT_OF_SCOPE_IDS, run_method
from satett.learners.logistic import fit_logistic_irls
from satett.metrics import aggregate_metrics
from satett.simulation import (
    RESULT_COLUMNS,
    ScenarioConfig,
    run_replications,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GENERATION = 3


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def _check_schema(payload, schema, what):
    try:
        jsonschema.validate(payload, schema)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid {what}: {exc.message}") from exc


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in columns])


def _check_methods(methods):
    for m in methods:
        if m in OUT_OF_SCOPE_IDS:
            raise ConfigError(
                f"method '{m}' uses Bayesian nuisance learners and is out of "
                "scope for this implementation"
            )


def cmd_simulate(args):
    cfg_json = _load_json(args.config)
    _check_schema(cfg_json, schemas.SIMULATE_SCHEMA, "simulate config")
    methods = cfg_json["methods"]
    _check_methods(methods)
    scenario = cfg_json["scenario"]
    seed = args.seed if args.seed is not None else cfg_json.get("seed", 0)
    reps = args.reps if args.reps is not None else cfg_json.get("reps", 100)
    out_dir = args.out_dir or cfg_json.get("out_dir", ".")
    options = dict(cfg_json.get("options", {}))

    # each study cell is one ScenarioConfig: the external-size grid for
    # scenario 1, the misspecification grid for scenario 3, one cell
    # otherwise
    cells = []
    if scenario == 1:
        grid = cfg_json.get("n_ext_grid") or [cfg_json.get("n_ext", 100)]
        for n_ext in grid:
            cfg = ScenarioConfig(scenario=1, n_trial=100, n_ext=n_ext,
                                 reps=reps, seed=seed)
            cells.append((f"n_ext={n_ext}", cfg))
    elif scenario == 2:
        cfg = ScenarioConfig(scenario=2, n_trial=50, n_ext=500,
                             reps=reps, seed=seed)
        cells.append(("ppv", cfg))
    else:
        grid = cfg_json.get("misspec_grid") or [[]]
        for flags in grid:
            cfg = ScenarioConfig(scenario=3, n_trial=250, n_ext=250,
                                 reps=reps, seed=seed, misspec=tuple(flags))
            label = "+".join(flags) if flags else "none"
            cells.append((label, cfg))

    all_rows = []
    for label, cfg in cells:
        result = run_replications(cfg, methods, options=options)
        for row in result.rows:
            row["cell"] = label
        all_rows.extend(result.rows)

    os.makedirs(out_dir, exist_ok=True)
    rep_path = os.path.join(out_dir, "replications.csv")
    _write_csv(rep_path, RESULT_COLUMNS + ("cell",), all_rows)

    table = aggregate_metrics(all_rows)
    metric_cols = ("scenario", "method", "subgroup", "cell", "power",
                   "mean_abs_bias", "variance", "mse", "coverage",
                   "mean_se", "reps_used", "failures")
    _write_csv(os.path.join(out_dir, "metrics.csv"), metric_cols, table.rows)
    with open(os.path.join(out_dir, "metrics.json"), "w") as fh:
        json.dump(table.rows, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {rep_path} and metrics.{{csv,json}} in {out_dir}")
    return EXIT_OK


def cmd_validate(args):
    sidecar = _load_json(args.schema)
    _check_schema(sidecar, schemas.DATA_SIDECAR_SCHEMA, "data sidecar")
    data = load_csv(args.data, sidecar)
    violations = validate(data)
    if violations:
        for msg in violations:
            print(f"violation: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{args.data}: {data.n} rows, {data.p} covariates, no violations")
    return EXIT_OK


def _positivity_report(data):
    design = np.column_stack([data.xtilde, data.v.astype(float)])
    eta_fit = fit_logistic_irls(design, data.s.astype(float))
    pi_fit = fit_logistic_irls(design, data.a.astype(float))
    eta_hat = eta_fit.predict_proba(design)
    pi_hat = pi_fit.predict_proba(design)
    return {
        "min_pi": float(np.min(pi_hat)),
        "max_eta_pi_ratio": float(np.max(eta_hat / pi_hat)),
        "max_eta_one_minus_pi_ratio": float(np.max(eta_hat / (1.0 - pi_hat))),
    }


def cmd_analyze(args):
    cfg_json = _load_json(args.config)
    _check_schema(cfg_json, schemas.ANALYZE_SCHEMA, "analyze config")
    methods = cfg_json["methods"]
    _check_methods(methods)
    sidecar = cfg_json["schema"]
    if isinstance(sidecar, str):
        sidecar = _load_json(sidecar)
        _check_schema(sidecar, schemas.DATA_SIDECAR_SCHEMA, "data sidecar")
    data = load_csv(cfg_json["data"], sidecar)
    violations = validate(data)
    if violations:
        for msg in violations:
            print(f"violation: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    subgroups = cfg_json.get("subgroups", [0, 1])
    seed = cfg_json.get("seed", 0)
    options = dict(cfg_json.get("options", {}))

    report = {
        "n": data.n,
        "n_trial": int(np.sum(data.s == 1)),
        "n_external": int(np.sum(data.s == 0)),
        "positivity": _positivity_report(data),
        "cells": [],
    }
    naive_se = {}
    for v in subgroups:
        rep = run_method("naive", data, SubgroupTarget(v=v))
        naive_se[v] = rep.se
    for method in methods:
        for v in subgroups:
            cell = {"method": method, "subgroup": v}
            try:
                rep = run_method(method, data, SubgroupTarget(v=v),
                                 seed=seed, options=options)
                cell.update(
                    estimate=rep.estimate, se=rep.se, ci_low=rep.ci_low,
                    ci_high=rep.ci_high, p_value=rep.p_value,
                    max_weight=rep.max_weight,
                    se_ratio_vs_naive=(
                        naive_se[v] / rep.se if rep.se > 0 else None
                    ),
                )
            except SatettError as exc:
                cell["error"] = f"{type(exc).__name__}: {exc}"
            report["cells"].append(cell)

    out = cfg_json.get("out")
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        print(f"wrote {out}")
    else:
        print(text, end="")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="satett",
        description="Subgroup treatment effect estimation in a target "
                    "trial with optional external data borrowing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a simulation study")
    p_sim.add_argument("--config", required=True, help="JSON config path")
    p_sim.add_argument("--out-dir", default=None, help="output directory")
    p_sim.add_argument("--seed", type=int, default=None, help="base seed")
    p_sim.add_argument("--reps", type=int, default=None,
                       help="replication count override")
    p_sim.set_defaults(func=cmd_simulate)

    p_val = sub.add_parser("validate", help="validate a trial CSV")
    p_val.add_argument("--data", required=True, help="CSV path")
    p_val.add_argument("--schema", required=True,
                       help="column-mapping sidecar JSON path")
    p_val.set_defaults(func=cmd_validate)

    p_ana = sub.add_parser("analyze", help="analyze a user-supplied CSV")
    p_ana.add_argument("--config", required=True, help="JSON config path")
    p_ana.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SatettError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
