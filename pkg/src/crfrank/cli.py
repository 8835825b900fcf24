"""Command-line surface: train, evaluate, sweep, analyze-derivatives, check-gradients."""
from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .errors import CrfRankError
from .evaluation import (
    FoldReport,
    evaluate,
    write_fold_report_csv,
    write_means_csv,
    write_per_query_csv,
)
from .letor import load_fold_dir, parse_letor
from .model import load_theta, save_theta
from .objectives import OBJECTIVE_KINDS, ObjectiveSpec, energy_derivatives
from .gradcheck import audit_gradients
from .training import SweepGrid, TrainConfig, sgd_train, sweep, write_training_log


class _Parser(argparse.ArgumentParser):
    # spec'd exit codes: usage errors exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _floats(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


def _load_dataset(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_letor(fh)


def _objective_spec(args) -> ObjectiveSpec:
    return ObjectiveSpec(kind=args.objective, la_weight=args.alpha, temperature=args.temperature)


def _add_objective_flags(p, with_hypers: bool = True):
    p.add_argument("--objective", choices=OBJECTIVE_KINDS, required=True)
    if with_hypers:
        p.add_argument("--alpha", type=float, default=1.0, help="loss-augmentation weight (LA)")
        p.add_argument("--temperature", type=float, default=1.0, help="target temperature (KL)")


def build_parser() -> _Parser:
    parser = _Parser(prog="crfrank", description="Loss-sensitive CRF training for ranking")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[], help="train one model on a LETOR file")
    p.add_argument("--train", required=True, help="LETOR training file")
    _add_objective_flags(p)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-group-size", type=int, default=6)
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.add_argument("--log", help="optional training-log CSV path")

    p = sub.add_parser("evaluate", help="NDCG@1..k of a checkpoint on a dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True, help="LETOR file to evaluate on")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--out", required=True, help="means CSV output path")
    p.add_argument("--per-query", help="optional per-query CSV path")
    p.add_argument("--exclude-empty", action="store_true",
                   help="drop all-irrelevant queries from the means")

    p = sub.add_parser("sweep", help="hyperparameter sweep over 5 folds with validation selection")
    p.add_argument("--fold-dir", required=True, help="directory containing Fold1..Fold5")
    _add_objective_flags(p, with_hypers=False)
    p.add_argument("--lrs", type=_floats, default=None, help="comma-separated learning rates")
    p.add_argument("--alphas", type=_floats, default=None)
    p.add_argument("--temperatures", type=_floats, default=None)
    p.add_argument("--folds", type=int, default=5, help="number of folds to run (1..5)")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-group-size", type=int, default=6)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("analyze-derivatives",
                       help="normalized objective derivatives w.r.t. free energies")
    p.add_argument("--energies", type=_floats, required=True)
    p.add_argument("--losses", type=_floats, required=True)
    p.add_argument("--gt", type=int, required=True,
                   help="1-based index of the zero-loss configuration")
    p.add_argument("--objectives", default="ml,la,ls,el,kl",
                   help="comma-separated subset of ml,la,ls,el,kl")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--out", help="CSV output path (default: stdout)")

    p = sub.add_parser("check-gradients", help="finite-difference gradient audit")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-4)

    return parser


def _cmd_train(args) -> int:
    dataset = _load_dataset(args.train)
    config = TrainConfig(
        objective=_objective_spec(args),
        learning_rate=args.lr,
        epochs=args.epochs,
        max_group_size=args.max_group_size,
        seed=args.seed,
    )
    theta, history = sgd_train(dataset, config)
    save_theta(args.out, theta)
    if args.log:
        write_training_log(args.log, history)
    print(f"wrote checkpoint {args.out} (d={len(theta)}, epochs={args.epochs})")
    return 0


def _cmd_evaluate(args) -> int:
    theta = load_theta(args.checkpoint)
    dataset = _load_dataset(args.data)
    report = evaluate(theta, dataset, truncation=args.k,
                      exclude_all_irrelevant=args.exclude_empty)
    write_means_csv(args.out, report)
    if args.per_query:
        write_per_query_csv(args.per_query, report)
    for k, v in enumerate(report.means, start=1):
        print(f"ndcg@{k} {v:.5f}")
    return 0


def _cmd_sweep(args) -> int:
    grid_kwargs = {}
    if args.lrs:
        grid_kwargs["learning_rates"] = tuple(args.lrs)
    if args.alphas:
        grid_kwargs["la_weights"] = tuple(args.alphas)
    if args.temperatures:
        grid_kwargs["temperatures"] = tuple(args.temperatures)
    grid = SweepGrid(**grid_kwargs)

    os.makedirs(args.out, exist_ok=True)
    per_fold = []
    for k in range(1, args.folds + 1):
        fold = load_fold_dir(args.fold_dir, k)
        result = sweep(fold, grid, args.objective, epochs=args.epochs,
                       seed=args.seed, max_group_size=args.max_group_size)
        save_theta(os.path.join(args.out, f"fold{k}_best.theta"), result.best_theta)
        cfg = result.best_config
        with open(os.path.join(args.out, f"fold{k}_best.csv"), "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["objective", "lr", "alpha", "temperature", "validation_score"])
            writer.writerow([cfg.objective.kind, cfg.learning_rate, cfg.objective.la_weight,
                             cfg.objective.temperature, repr(result.best_score)])
        test_report = evaluate(result.best_theta, fold.test, truncation=args.k)
        per_fold.append(test_report.means)
        print(f"fold {k}: lr={cfg.learning_rate} "
              f"test ndcg@1..{args.k} = " + " ".join(f"{v:.4f}" for v in test_report.means))

    fold_report = FoldReport(per_fold=tuple(per_fold),
                             grand_mean=np.mean(per_fold, axis=0), truncation=args.k)
    out_csv = os.path.join(args.out, f"{args.objective}_ndcg_table.csv")
    write_fold_report_csv(out_csv, fold_report)
    print(f"wrote {out_csv}")
    return 0


def _cmd_analyze(args) -> int:
    kinds = [k.strip() for k in args.objectives.split(",") if k.strip()]
    rows = []
    for kind in kinds:
        spec = ObjectiveSpec(kind=kind, la_weight=args.alpha, temperature=args.temperature)
        v = energy_derivatives(spec, args.energies, args.losses, args.gt - 1)
        rows.append([kind] + [repr(float(x)) for x in v])
    header = ["objective"] + [f"v{i}" for i in range(1, len(args.energies) + 1)]
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)
    return 0


def _cmd_check_gradients(args) -> int:
    rows = audit_gradients(trials=args.trials, seed=args.seed, tolerance=args.tolerance)
    all_ok = True
    for row in rows:
        status = "pass" if row.passed else "FAIL"
        print(f"{row.kind:>3}  trials={row.trials}  max_rel_err={row.max_relative_error:.3e}  {status}")
        all_ok &= row.passed
    return 0 if all_ok else 1


_COMMANDS = {
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "analyze-derivatives": _cmd_analyze,
    "check-gradients": _cmd_check_gradients,
}


def _merge_negative_lists(argv):
    """Turn `--energies -1,2` into `--energies=-1,2` so argparse accepts it."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--energies", "--losses") and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def cli_main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_merge_negative_lists(list(argv)))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    except CrfRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
