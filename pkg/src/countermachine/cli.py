"""Command-line front door: generate data, train, evaluate, query, serve.

Machine-readable JSON goes to stdout; human-readable notes go to stderr.
Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import data as data_mod
from .annealing import AnnealConfig
from .counterfactual import CounterfactualQuery, find_counterfactual
from .data import FEATURE_NAMES
from .errors import CountermachineError
from .fuzzy import PEACE, WAR, classify, evaluate, load_model, save_model
from .training import TrainConfig, fit

# preset for callers who treat geography and great-power status as immutable
REALISTIC_LOCKS = ("distance", "contiguity", "major_power")

SEED_ENV_VAR = "COUNTERMACHINE_SEED"


def _resolve_seed(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            parser.error(f"{SEED_ENV_VAR} must be an integer, got {env!r}")
    return 0


def _parse_features(text: str, parser: argparse.ArgumentParser) -> list[float]:
    parts = text.split(",")
    if len(parts) != len(FEATURE_NAMES):
        parser.error(
            f"--features needs {len(FEATURE_NAMES)} comma-separated values "
            f"({', '.join(FEATURE_NAMES)}), got {len(parts)}"
        )
    try:
        values = [float(p) for p in parts]
    except ValueError:
        parser.error(f"--features values must be numbers, got {text!r}")
    for name, v in zip(FEATURE_NAMES, values):
        if not 0.0 <= v <= 1.0:
            parser.error(f"feature {name} must lie in [0, 1], got {v}")
    return values


def _parse_free(args: argparse.Namespace, parser: argparse.ArgumentParser) -> list[bool]:
    if args.realistic_locks and args.free is not None:
        parser.error("--free and --realistic-locks are mutually exclusive")
    if args.realistic_locks:
        return [name not in REALISTIC_LOCKS for name in FEATURE_NAMES]
    if args.free is None:
        return [True] * len(FEATURE_NAMES)
    text = args.free.strip()
    if not text:
        return [False] * len(FEATURE_NAMES)
    names = [n.strip() for n in text.split(",")]
    unknown = [n for n in names if n not in FEATURE_NAMES]
    if unknown:
        parser.error(
            f"unknown feature name(s) in --free: {', '.join(unknown)}; "
            f"valid names: {', '.join(FEATURE_NAMES)}"
        )
    return [name in names for name in FEATURE_NAMES]


def _anneal_config(args: argparse.Namespace, seed: int) -> AnnealConfig:
    return AnnealConfig(
        initial_temperature=args.t0,
        cooling_factor=args.cooling,
        steps_per_temperature=args.steps_per_temp,
        min_temperature=args.min_temp,
        proposal_scale=args.proposal_scale,
        target_error=args.target_error,
        max_evaluations=args.max_evals,
        restarts=args.restarts,
        seed=seed,
    )


def _add_anneal_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t0", type=float, default=1.0, help="initial temperature")
    p.add_argument("--cooling", type=float, default=0.95, help="geometric cooling factor")
    p.add_argument("--steps-per-temp", type=int, default=50)
    p.add_argument("--min-temp", type=float, default=1e-5)
    p.add_argument("--proposal-scale", type=float, default=1.0)
    p.add_argument("--target-error", type=float, default=1e-4)
    p.add_argument("--max-evals", type=int, default=200_000)
    p.add_argument("--restarts", type=int, default=4)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="countermachine",
        description="Train fuzzy war/peace models and search them for counterfactuals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a synthetic dyad CSV")
    p_gen.add_argument("--rows", type=int, required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--noise", type=float, default=0.05, help="label flip rate")
    p_gen.add_argument("--seed", type=int, default=None)

    p_train = sub.add_parser("train", help="fit a model from a dyad CSV")
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--out", required=True, help="model JSON path")
    p_train.add_argument("--train-per-class", type=int, default=500)
    p_train.add_argument("--test-per-class", type=int, default=392)
    p_train.add_argument("--epochs", type=int, default=15)
    p_train.add_argument("--mfs", type=int, default=2, help="memberships per input")
    p_train.add_argument("--ridge", type=float, default=1e-2)
    p_train.add_argument("--lr", type=float, default=0.05, help="premise learning rate")
    p_train.add_argument("--seed", type=int, default=None)

    p_eval = sub.add_parser("eval", help="evaluate a feature vector")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--features", required=True, help="7 comma-separated values")
    p_eval.add_argument("--seed", type=int, default=None)

    p_cf = sub.add_parser("cf", help="search for a counterfactual")
    p_cf.add_argument("--model", required=True)
    p_cf.add_argument("--features", required=True, help="the factual, 7 values")
    p_cf.add_argument("--target", choices=[WAR, PEACE], required=True)
    p_cf.add_argument("--free", default=None, help="comma-separated variable names")
    p_cf.add_argument("--realistic-locks", action="store_true")
    p_cf.add_argument("--success-margin", type=float, default=0.1)
    p_cf.add_argument("--trace-out", default=None, help="write accepted-step CSV here")
    p_cf.add_argument("--seed", type=int, default=None)
    _add_anneal_flags(p_cf)

    p_serve = sub.add_parser("serve", help="serve a model over HTTP")
    p_serve.add_argument("--model", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument(
        "--allow-origin",
        action="append",
        default=None,
        help="CORS origin to allow (repeatable)",
    )
    p_serve.add_argument("--seed", type=int, default=None)

    return parser


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc) + "\n")


def cmd_gen(args, parser) -> int:
    if args.rows <= 0:
        parser.error(f"--rows must be positive, got {args.rows}")
    if not 0.0 <= args.noise < 1.0:
        parser.error(f"--noise must lie in [0, 1), got {args.noise}")
    seed = _resolve_seed(args, parser)
    spec = data_mod.GroundTruthSpec(noise_rate=args.noise)
    records = data_mod.generate_synthetic(args.rows, seed, spec)
    data_mod.save_csv(records, args.out)
    n_war = sum(1 for r in records if r.label == WAR)
    _emit({"rows": len(records), "war": n_war, "peace": len(records) - n_war, "out": args.out})
    print(f"wrote {len(records)} rows to {args.out}", file=sys.stderr)
    return 0


def cmd_train(args, parser) -> int:
    for flag, value in (
        ("--train-per-class", args.train_per_class),
        ("--test-per-class", args.test_per_class),
    ):
        if value < 0:
            parser.error(f"{flag} must be >= 0, got {value}")
    if args.train_per_class == 0:
        parser.error("--train-per-class must be positive")
    seed = _resolve_seed(args, parser)
    try:
        config = TrainConfig(
            mfs_per_input=args.mfs,
            epochs=args.epochs,
            premise_learning_rate=args.lr,
            ridge_lambda=args.ridge,
            seed=seed,
        )
    except ValueError as exc:
        parser.error(str(exc))
    records = data_mod.load_csv(args.data)
    dataset = data_mod.normalize(records)
    train, test = data_mod.split_balanced(
        dataset, args.train_per_class, args.test_per_class, seed
    )
    model, report = fit(train, test, config)
    save_model(model, args.out)
    _emit(report.to_dict())
    print(
        f"trained on {train.n_rows} rows, tested on {test.n_rows}; "
        f"train_acc={report.train_acc:.4f} test_acc={report.test_acc:.4f}; "
        f"model -> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_eval(args, parser) -> int:
    features = _parse_features(args.features, parser)
    model = load_model(args.model)
    y = evaluate(model, features)
    label = classify(model, features)
    _emit({"y": y, "class": label})
    print(f"y={y:.6f} class={label}", file=sys.stderr)
    return 0


def cmd_cf(args, parser) -> int:
    features = _parse_features(args.features, parser)
    free = _parse_free(args, parser)
    if not 0.0 < args.success_margin < 0.5:
        parser.error(f"--success-margin must lie in (0, 0.5), got {args.success_margin}")
    seed = _resolve_seed(args, parser)
    try:
        anneal = _anneal_config(args, seed)
    except ValueError as exc:
        parser.error(str(exc))
    model = load_model(args.model)
    query = CounterfactualQuery(
        factual=tuple(features),
        desired_consequent=model.label_encoding.target_value(args.target),
        free_mask=tuple(free),
        anneal=anneal,
        success_margin=args.success_margin,
        allow_no_free=True,
    )
    result = find_counterfactual(model, query)
    if args.trace_out:
        result.trace.write_csv(args.trace_out)
    _emit(result.to_dict())
    changed = [d.name for d in result.deltas if d.direction != "unchanged"]
    print(
        f"target={args.target} achieved_y={result.achieved_y:.6f} "
        f"class={result.achieved_class} success={result.success} "
        f"changed={','.join(changed) if changed else '(none)'}",
        file=sys.stderr,
    )
    return 0


def cmd_serve(args, parser) -> int:
    import uvicorn

    from .service import build_app

    model = load_model(args.model)
    app = build_app(model, allow_origins=tuple(args.allow_origin or ()))
    print(
        f"serving {args.model} ({model.n_rules} rules) on "
        f"http://{args.host}:{args.port}",
        file=sys.stderr,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


_COMMANDS = {
    "gen": cmd_gen,
    "train": cmd_train,
    "eval": cmd_eval,
    "cf": cmd_cf,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args, parser)
    except (CountermachineError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
