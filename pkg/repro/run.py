"""Full-scale run on the benchmark wordlists: train, predict the test split, score.

    python repro/run.py --data DATA [--proportion 0.125 --folds 5] [--epochs 20] [--json]

DATA holds ``train/`` and ``test/`` directories with one ``<family>.tsv`` per family
(or single ``train.tsv`` / ``test.tsv`` files carrying a FAMILY column).
"""

import argparse
import json
import logging
import statistics
import sys
import time
from pathlib import Path

from cognates.cli import predict_wordlist
from cognates.dataio import SplitSpec, augment_split, load_wordlist
from cognates.evaluation import evaluate_dataset
from cognates.model import ModelConfig
from cognates.pipeline import default_workers, prepare_wordlist
from cognates.training import TrainConfig, train


def locate(data: Path, part: str) -> Path:
    for candidate in (data / part, data / f"{part}.tsv"):
        if candidate.exists():
            return candidate
    sys.exit(f"no {part}/ directory or {part}.tsv under {data}")


def run_fold(train_wl, test_wl, cfg, workers):
    languages = sorted(set(train_wl.languages) | set(test_wl.languages))
    concepts = prepare_wordlist(train_wl, workers)
    model, choice, vocab = train(concepts, cfg, ModelConfig(), languages)
    predicted = predict_wordlist(test_wl, model, vocab, choice.threshold, workers)
    return evaluate_dataset(test_wl, predicted), choice.threshold


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--data", required=True, type=Path)
    ap.add_argument("--proportion", type=float, default=0.0, help="share of test concepts moved into training")
    ap.add_argument("--folds", type=int, default=5)
    ap.add_argument("--epochs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=default_workers())
    ap.add_argument("--json", action="store_true", help="finish with one JSON summary line")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(asctime)s %(message)s")

    train_wl = load_wordlist(locate(args.data, "train"))
    test_wl = load_wordlist(locate(args.data, "test"))
    cfg = TrainConfig(epochs=args.epochs, seed=args.seed)
    folds = augment_split(train_wl, test_wl, SplitSpec(args.proportion, args.folds, args.seed))

    start = time.perf_counter()
    means, thresholds = [], []
    for k, (tr, te) in enumerate(folds):
        report, theta = run_fold(tr, te, cfg, args.workers)
        print(f"fold {k} (threshold {theta:.2f})\n{report.format_table()}\n")
        means.append(report.mean_f1)
        thresholds.append(theta)
    summary = {
        "proportion": args.proportion,
        "folds": len(folds),
        "mean_f1": statistics.mean(means),
        "std_f1": statistics.stdev(means) if len(means) > 1 else 0.0,
        "threshold": statistics.mean(thresholds),
        "seconds": round(time.perf_counter() - start),
    }
    print(json.dumps(summary) if args.json else
          f"mean B-Cubed F {summary['mean_f1']:.3f} (sd {summary['std_f1']:.3f}) over {len(folds)} fold(s)")


if __name__ == "__main__":
    main()
