"""Run all three selection methods on a user-supplied College Scorecard extraction.

The config must map the extraction's columns (see README for the schema
format). For every method the consensus subset is compared against the full
attribute set with every configured classifier, and the GA-subset logistic
regression accuracy is set beside the 0.746 reference value.

    python3 scripts/scorecard_reproduction.py scorecard.ini --out results/scorecard
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from attrsel.classifiers import LogisticRegression
from attrsel.config import load_config
from attrsel.evaluation import cross_validate
from attrsel.folds import derive_seed, make_folds
from attrsel.pipeline import EVALUATION_FOLDS, evaluate, load_dataset, preprocess, select
from attrsel.report import fmt

REFERENCE_LR_ACCURACY = 0.746
TOLERANCE = 0.08


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--methods", default="filters,forward,ga")
    ap.add_argument("--out", default="results/scorecard")
    args = ap.parse_args(argv)

    base = load_config(args.config).with_overrides(seed=args.seed)
    d = preprocess(load_dataset(base), base)
    subsets, summary = {}, {"seed": base.seed, "rows": d.n_rows, "methods": {}}
    for method in args.methods.split(","):
        cfg = replace(base, selection=replace(base.selection, method=method.strip()))
        chosen, _, _ = select(d, cfg)
        subsets[method] = chosen
        summary["methods"][method] = list(chosen)
        print(f"{method}: {len(chosen)} attributes: {', '.join(chosen) or '(none)'}", flush=True)
    table = evaluate(d, base, {**subsets, "all": d.attributes})

    lines = ["| Subset | N | Algorithm | Accuracy | Precision | Recall | F-measure |", "|---|---|---|---|---|---|---|"]
    for row in table.rows:
        m = row.metrics
        lines.append(f"| {row.subset} | {row.n_attributes} | {row.algorithm} | {fmt(m.accuracy)} | {fmt(m.weighted_precision)} "
                     f"| {fmt(m.weighted_recall)} | {fmt(m.weighted_f1)} |")

    if subsets.get("ga"):
        plan = make_folds(d.labels, base.evaluation.folds, derive_seed(base.seed, EVALUATION_FOLDS))
        acc = cross_validate(LogisticRegression(), d.select_attributes(subsets["ga"]), plan)[0].accuracy
        gap = acc - REFERENCE_LR_ACCURACY
        verdict = "consistent" if abs(gap) <= TOLERANCE else "outside the tolerance"
        summary["ga_logistic_accuracy"] = acc
        summary["reference_gap"] = gap
        line = f"GA-subset logistic accuracy {acc:.3f} vs reference {REFERENCE_LR_ACCURACY} ({gap:+.3f}, {verdict})"
        lines += ["", line]
        print(line)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.md").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out / 'comparison.md'} and {out / 'summary.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
