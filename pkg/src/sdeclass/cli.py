"""Command line entry point: ``sdeclass {simulate,fit,classify,experiment,reproduce}``.

Exit status is 0 on success, 1 on a usage error and 2 on a runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .classify import PlugInClassifier
from .estimate import EstimatorConfig, fit_all
from .experiment import TABLES, reproduce, run_experiment
from .models import make_model
from .persist import load_config, load_estimator_config, load_fitted, save_fitted
from .simulate import read_dataset, sample_dataset, write_dataset


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sdeclass", description="Plug-in classification of diffusion paths.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("simulate", help="simulate a labelled dataset")
    s.add_argument("--model", required=True, help="cosine:<theta> or ou:<sigma>")
    s.add_argument("--n", type=int, required=True, help="observations per unit time")
    s.add_argument("--paths", type=int, required=True)
    s.add_argument("--refinement", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)

    f = sub.add_parser("fit", help="fit the plug-in classifier to a dataset")
    f.add_argument("--data", required=True)
    f.add_argument("--config", help="INI file; only [estimator] is read")
    f.add_argument("--seed", type=int, default=0, help="accepted for uniformity; fitting is deterministic")
    f.add_argument("--out", required=True)

    c = sub.add_parser("classify", help="label the paths of a dataset with a fitted model")
    c.add_argument("--model", required=True)
    c.add_argument("--data", required=True)
    c.add_argument("--seed", type=int, default=0, help="accepted for uniformity; classification is deterministic")
    c.add_argument("--out", help="write labels here instead of stdout")

    e = sub.add_parser("experiment", help="run a Monte-Carlo experiment from a config file")
    e.add_argument("--config", required=True)
    e.add_argument("--seed", type=int, help="overrides the config seed")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--out", help="CSV report path (default: <outputs>/report.csv or stdout)")

    r = sub.add_parser("reproduce", help="run one of the table sweeps")
    r.add_argument("--table", required=True, choices=sorted(TABLES))
    r.add_argument("--scale", default="desk", choices=("desk", "full"))
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--out")
    return p


def _emit(text: str, out, stdout) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


def _run(args, stdout) -> None:
    if args.command == "simulate":
        ds = sample_dataset(make_model(args.model), args.paths, args.n, args.refinement, args.seed)
        write_dataset(ds, args.out)
    elif args.command == "fit":
        cfg = load_estimator_config(args.config) if args.config else EstimatorConfig()
        save_fitted(fit_all(read_dataset(args.data), cfg), args.out)
    elif args.command == "classify":
        clf = PlugInClassifier.from_fit(load_fitted(args.model))
        ds = read_dataset(args.data)
        pred = clf.predict(ds.paths) if ds.N else np.zeros(0, dtype=int)
        lines = [f"{j},{int(y)}" for j, y in enumerate(pred)]
        if ds.N:
            lines.append(f"risk={float(np.mean(pred != ds.labels))!r}")
        _emit("\n".join(lines) + "\n", args.out, stdout)
    elif args.command == "experiment":
        spec = load_config(args.config)
        if args.seed is not None:
            spec = replace(spec, seed=args.seed)
        report = run_experiment(spec, args.workers)
        out = args.out or (str(Path(spec.outputs) / "report.csv") if spec.outputs else None)
        _emit(report.to_csv(), out, stdout)
    elif args.command == "reproduce":
        report = reproduce(args.table, args.scale, args.seed, None, args.workers)
        _emit(report.to_csv(), args.out, stdout)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        stderr.write(parser.format_usage())
        stderr.write(f"{exc}\n")
        return 1
    except SystemExit as exc:  # --help
        return 0 if not exc.code else 1
    try:
        _run(args, stdout)
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        stderr.write(f"sdeclass: {type(exc).__name__}: {exc}\n")
        return 2
    return 0


cli_main = main

if __name__ == "__main__":
    sys.exit(main())
