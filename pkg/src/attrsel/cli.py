"""``attrsel`` command line: run, rank, select, evaluate, synth.

Exit codes: 0 success, 1 usage error, 2 data error, 3 config error.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .consensus import SelectionError
from .data import DataError
from .pipeline import base_results, evaluate, load_dataset, preprocess, rank_all, run_pipeline, select
from .report import ReportError, emit_report
from .synth import synth_generate, write_synth_csv

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CONFIG = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _style(text: str, code: str, stream) -> str:
    if os.environ.get("NO_COLOR") or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\033[{code}m{text}\033[0m"


def _say(msg: str):
    print(msg)


def _fail(msg: str, code: int) -> int:
    print(_style("error:", "31", sys.stderr), msg, file=sys.stderr)
    return code


def _add_overrides(p):
    p.add_argument("config", help="pipeline config file")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--method", choices=("filters", "forward", "ga"), help="selection method")
    p.add_argument("--folds", type=int, help="fold count for selection and evaluation")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="attrsel", description="Consensus attribute selection and classifier comparison.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="selection followed by classifier comparison")
    _add_overrides(p)
    p = sub.add_parser("rank", help="filter merits on all rows")
    _add_overrides(p)
    p = sub.add_parser("select", help="consensus selection only")
    _add_overrides(p)
    p = sub.add_parser("evaluate", help="cross-validated classifier comparison only")
    _add_overrides(p)
    p.add_argument("--subset", help="comma-separated attributes to compare against all attributes")

    p = sub.add_parser("synth", help="write a synthetic dataset with planted attributes")
    p.add_argument("output", help="CSV file to write")
    p.add_argument("--rows", type=int, default=1500)
    p.add_argument("--informative", type=int, default=5)
    p.add_argument("--noise", type=int, default=25)
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="also write a matching pipeline config here")
    return parser


def _synth(args) -> int:
    try:
        d = synth_generate(args.rows, args.informative, args.noise, args.classes, args.seed)
    except ValueError as exc:
        return _fail(str(exc), EXIT_USAGE)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_synth_csv(d, out)
    _say(f"wrote {d.n_rows} rows to {out}; informative: {', '.join(d.provenance['informative'])}")
    if args.config:
        cfg_path = Path(args.config)
        cfg_path.parent.mkdir(parents=True, exist_ok=True)
        rel = os.path.relpath(out.resolve(), cfg_path.resolve().parent)
        lines = ["[data]", f"path = {rel}", "", "[schema]", "column.income = target"]
        lines += [f"column.{n} = numeric" for n in d.names]
        lines += ["", "[selection]", "method = ga", "", "[ga]", "population_size = 100", "generations = 30", ""]
        cfg_path.write_text("\n".join(lines), encoding="utf-8")
        _say(f"wrote config to {cfg_path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "synth":
        return _synth(args)
    try:
        cfg = load_config(args.config).with_overrides(args.seed, args.method, args.folds, args.out)
        if args.command == "run":
            res = run_pipeline(cfg)
            _say(f"selected ({cfg.selection.method}): {', '.join(res.subset) or '(none)'}")
            best = res.comparison.ranking()[0]
            _say(f"best: {best.algorithm} on {best.subset}, weighted F1 {best.metrics.weighted_f1:.4f}")
        else:
            d = preprocess(load_dataset(cfg), cfg)
            res = base_results(d, cfg)
            if args.command == "rank":
                res.rankings = rank_all(d, cfg)
            elif args.command == "select":
                res.subset, res.tally, res.run = select(d, cfg)
                res.method = cfg.selection.method
                _say(f"selected ({cfg.selection.method}): {', '.join(res.subset) or '(none)'}")
            else:
                subsets = {"all": d.attributes}
                if args.subset:
                    chosen = tuple(a.strip() for a in args.subset.split(",") if a.strip())
                    unknown = [a for a in chosen if a not in d.attributes]
                    if unknown:
                        return _fail(f"unknown attributes in --subset: {unknown}", EXIT_USAGE)
                    subsets = {"subset": chosen, **subsets}
                res.comparison = evaluate(d, cfg, subsets)
            emit_report(res, cfg.output.formats, cfg.output.directory)
        _say(_style(f"reports written to {cfg.output.directory}", "32", sys.stdout))
        return EXIT_OK
    except ConfigError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    except DataError as exc:
        return _fail(str(exc), EXIT_DATA)
    except (ReportError, SelectionError, ValueError) as exc:
        return _fail(str(exc), EXIT_DATA)


if __name__ == "__main__":
    sys.exit(main())
