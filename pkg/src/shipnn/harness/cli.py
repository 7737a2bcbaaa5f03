"""Command-line entry point: ``shipnn <subcommand>``.

Exit status is 0 on success, 1 when an acceptance check fails, 2 on invalid
input (bad config, missing files).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from shipnn.dynamics import DivergenceError
from shipnn.harness import pipeline
from shipnn.harness.config import CONFIG_ENV_VAR, ConfigError, dump_config, load_config, load_scenario
from shipnn.harness.metrics import evaluate
from shipnn.harness.records import read_dataset, write_dataset, write_loss_history, write_record, write_tidy
from shipnn.harness.simulate import ScenarioError, run_scenario
from shipnn.neurocontrol.training import NonConvergenceError
from shipnn.neurocontrol.weights import WeightFileError, load_weights, save_weights
from shipnn.teacher.tuning import SearchFailure, write_results_csv

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


def _common(p: argparse.ArgumentParser, timestep=False, controller=False) -> None:
    p.add_argument("--config", help=f"YAML config (default: ${CONFIG_ENV_VAR}, else built-in defaults)")
    p.add_argument("--out-dir", default="out", help="output directory (default: out)")
    p.add_argument("--seed", type=int, help="override the config seed")
    if timestep:
        p.add_argument("--timestep", type=float, help="integration step in seconds")
    if controller:
        p.add_argument("--controller", choices=("teacher", "neural", "none"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shipnn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario file, write its record CSV and metrics")
    p.add_argument("scenario", help="scenario YAML file")
    p.add_argument("--weights", help="weight file for the neural controller")
    _common(p, timestep=True, controller=True)

    p = sub.add_parser("tune-teacher", help="search sliding-mode gains on the course-change step")
    _common(p, timestep=True)

    p = sub.add_parser("gen-data", help="roll out the teacher and write the training set CSV")
    _common(p, timestep=True)

    p = sub.add_parser("train", help="train the neural controller on a dataset CSV")
    p.add_argument("--dataset", help="dataset CSV (default: <out-dir>/dataset.csv)")
    _common(p)

    p = sub.add_parser("reproduce-paper", help="course-change battery with a pass/fail table")
    p.add_argument("--weights", help="use this weight file instead of training")
    _common(p, timestep=True)

    p = sub.add_parser("plot-data", help="turn run CSVs into one long-format CSV")
    p.add_argument("runs", nargs="+", help="run record CSV files")
    p.add_argument("--out", help="output CSV (default: <out-dir>/plot_data.csv)")
    p.add_argument("--out-dir", default="out")
    return parser


def _config(args):
    cfg = load_config(args.config)
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "timestep", None) is not None:
        if not args.timestep > 0:
            raise ConfigError(f"--timestep must be positive, got {args.timestep}")
        updates["simulation"] = cfg.simulation.model_copy(update={"timestep_s": args.timestep})
    return cfg.model_copy(update=updates) if updates else cfg


def cmd_simulate(args) -> int:
    cfg = _config(args)
    sc_cfg = load_scenario(args.scenario)
    scenario = sc_cfg.build()
    changes = {}
    if args.controller:
        changes["controller"] = args.controller
    if args.timestep:
        changes["timestep"] = args.timestep
    if args.seed is not None:
        changes["seed"] = args.seed
    if changes:
        scenario = replace(scenario, **changes)
    net = None
    if scenario.controller == "neural":
        wpath = args.weights or sc_cfg.weights_file
        if wpath is None:
            raise ScenarioError("neural controller selected but no --weights or weights_file given")
        net = load_weights(wpath)
    record = run_scenario(scenario, gains=cfg.teacher.gains(), net=net, **cfg.run_kwargs())
    out = Path(args.out_dir)
    path = write_record(record, out / f"{scenario.name}.csv")
    metrics = evaluate(record)
    pipeline.write_metrics({scenario.name: metrics}, out / f"{scenario.name}_metrics.csv")
    print(f"wrote {path}")
    for k, v in metrics.as_dict().items():
        print(f"  {k:32s} {v:.6g}")
    return EXIT_OK


def cmd_tune(args) -> int:
    cfg = _config(args)
    result = pipeline.tune_teacher(cfg)
    out = Path(args.out_dir)
    write_results_csv(result, out / "tuning.csv")
    g = result.gains
    best = cfg.teacher.model_copy(
        update={"lambda_per_s": g.Lambda, "k_n_n_nm": g.K, "phi_m_s_m_s_rad_s": g.phi}
    )
    tuned = cfg.model_copy(update={"teacher": best})
    (out / "tuned_config.yaml").write_text(dump_config(tuned))
    print(f"best cost {result.cost:.6g}: Lambda={g.Lambda} K={g.K} phi={g.phi}")
    print(f"wrote {out / 'tuning.csv'} and {out / 'tuned_config.yaml'}")
    return EXIT_OK


def cmd_gen_data(args) -> int:
    cfg = _config(args)
    X, Y = pipeline.make_dataset(cfg)
    path = write_dataset(X, Y, Path(args.out_dir) / "dataset.csv")
    print(f"wrote {len(X)} samples to {path}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _config(args)
    out = Path(args.out_dir)
    dataset = Path(args.dataset) if args.dataset else out / "dataset.csv"
    if not dataset.exists():
        raise ConfigError(f"dataset not found: {dataset} (run gen-data first)")
    X, Y = read_dataset(dataset)
    try:
        result = pipeline.train_network(cfg, X, Y)
    except NonConvergenceError as exc:
        if exc.result is not None:
            write_loss_history(exc.result.train_loss, exc.result.val_loss, out / "training_loss.csv")
        print(f"training failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    save_weights(result.net, out / "mlp_weights.txt")
    write_loss_history(result.train_loss, result.val_loss, out / "training_loss.csv")
    ratio = ", ".join(f"{r:.4f}" for r in result.val_rmse_ratio)
    print(f"best epoch {result.best_epoch}, validation RMSE/std per output: {ratio}")
    print(f"wrote {out / 'mlp_weights.txt'}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    cfg = _config(args)
    result = pipeline.reproduce(cfg, args.out_dir, weights=args.weights)
    checks = list(result.checks)
    runtime = result.runtimes["step_+20_neural"]
    checks.insert(1, pipeline.Check("nn_run_time_s", runtime, pipeline.RUNTIME_S, runtime < pipeline.RUNTIME_S))
    print(pipeline.format_table(checks))
    ok = all(c.passed for c in checks)
    print("ALL CHECKS PASSED" if ok else "ACCEPTANCE FAILED")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_plot_data(args) -> int:
    out = Path(args.out) if args.out else Path(args.out_dir) / "plot_data.csv"
    for p in args.runs:
        if not Path(p).exists():
            raise ConfigError(f"run file not found: {p}")
    path = write_tidy(args.runs, out)
    print(f"wrote {path}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "tune-teacher": cmd_tune,
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "reproduce-paper": cmd_reproduce,
    "plot-data": cmd_plot_data,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ScenarioError, WeightFileError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SearchFailure, DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
