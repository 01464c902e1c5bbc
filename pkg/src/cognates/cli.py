"""Command-line entry point: ``cognates {align,train,predict,evaluate,split,demo}``.

Exit codes: 0 success, 1 usage error, 2 data error. Logs go to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time
from pathlib import Path

from . import synthetic
from .checkpoint import CheckpointError, load_params, save_params
from .clustering import flat_upgma
from .dataio import SplitSpec, WordlistError, augment_split, load_languages, load_wordlist, save_wordlist
from .evaluation import evaluate_dataset
from .model import ModelConfig
from .phonology import Vocabulary
from .pipeline import default_workers, prepare_wordlist
from .training import TrainConfig, predict_probabilities, set_determinism, train

log = logging.getLogger("cognates")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _threshold(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError("threshold must lie in (0, 1)")
    return value


def _workers(args) -> int:
    if args.deterministic:
        return 1
    return args.workers or default_workers()


# --- subcommands ------------------------------------------------------------

def cmd_align(args) -> None:
    wl = load_wordlist(args.input)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for c in prepare_wordlist(wl, _workers(args)):
        rows = c.asjp if args.asjp else c.ipa
        name = f"{c.family}__{c.concept}".replace("/", "_").replace(" ", "_")
        with open(out / f"{name}.tsv", "w", encoding="utf-8") as f:
            for wid, lang, row in zip(c.ids, c.languages, rows.rows):
                f.write("\t".join([str(wid), lang, *row]) + "\n")
    log.info("wrote alignments to %s", out)


def cmd_train(args) -> None:
    wl = load_wordlist(args.input)
    languages = load_languages(args.languages) if args.languages else ()
    concepts = prepare_wordlist(wl, _workers(args))
    cfg = TrainConfig(batch_size=args.batch_size, epochs=args.epochs, seed=args.seed,
                      learning_rate=args.learning_rate, deterministic=args.deterministic)
    model_cfg = ModelConfig(hidden_size=args.hidden_size, intermediate_size=args.hidden_size,
                            dropout=args.dropout)
    start = time.perf_counter()
    model, choice, vocab = train(concepts, cfg, model_cfg, languages)
    threshold = args.threshold or choice.threshold
    metadata = {
        "threshold": threshold,
        "validation_score": choice.validation_score,
        "sweep": {str(k): v for k, v in choice.sweep.items()},
        "vocab": vocab.to_dict(),
        "train_config": dataclasses.asdict(cfg),
        "seconds": round(time.perf_counter() - start, 1),
    }
    save_params(model, args.checkpoint, metadata)
    log.info("saved %s (threshold %.2f)", args.checkpoint, threshold)


def predict_wordlist(wl, model, vocab, threshold, workers=1):
    concepts = prepare_wordlist(wl, workers)
    probs = predict_probabilities(model, concepts, vocab)
    values = {}
    for c, p in zip(concepts, probs):
        for wid, label in zip(c.ids, flat_upgma(p, threshold)):
            values[wid] = f"{c.concept}:{label}"
    return wl.with_column("PREDICTED_COGID", values)


def cmd_predict(args) -> None:
    model, meta = load_params(args.checkpoint)
    if "vocab" not in meta:
        raise CheckpointError(f"{args.checkpoint}: no vocabulary in metadata")
    threshold = args.threshold or meta.get("threshold", 0.6)
    wl = load_wordlist(args.input)
    out = predict_wordlist(wl, model, Vocabulary.from_dict(meta["vocab"]), threshold, _workers(args))
    save_wordlist(out, args.output)
    log.info("wrote predictions to %s at threshold %.2f", args.output, threshold)


def cmd_evaluate(args) -> None:
    gold = load_wordlist(args.gold)
    predicted = load_wordlist(args.input)
    report = evaluate_dataset(gold, predicted, args.column, per_concept=args.per_concept)
    print(json.dumps(report.to_dict(), indent=2) if args.json else report.format_table())


def cmd_split(args) -> None:
    if not args.test:
        raise UsageError("split needs --test")
    train_wl, test_wl = load_wordlist(args.input), load_wordlist(args.test)
    spec = SplitSpec(args.proportion, args.folds, args.seed)
    out = Path(args.output)
    for k, (tr, te) in enumerate(augment_split(train_wl, test_wl, spec)):
        save_wordlist(tr, out / f"fold_{k}" / "train.tsv")
        save_wordlist(te, out / f"fold_{k}" / "test.tsv")


def cmd_demo(args) -> None:
    train_wl, test_wl = synthetic.load_bundled()
    set_determinism(args.seed, args.deterministic)
    cfg = dataclasses.replace(synthetic.DEMO_TRAIN, seed=args.seed)
    if args.epochs is not None:
        cfg = dataclasses.replace(cfg, epochs=args.epochs)
    if args.batch_size is not None:
        cfg = dataclasses.replace(cfg, batch_size=args.batch_size)
    concepts = prepare_wordlist(train_wl, _workers(args))
    model, choice, vocab = train(concepts, cfg, synthetic.DEMO_MODEL)
    threshold = args.threshold or choice.threshold
    predicted = predict_wordlist(test_wl, model, vocab, threshold, _workers(args))
    report = evaluate_dataset(test_wl, predicted)
    if args.json:
        print(json.dumps({"threshold": threshold, **report.to_dict()}, indent=2))
    else:
        print(f"threshold {threshold:.2f}")
        print(report.format_table())
    if args.output:
        save_wordlist(predicted, args.output)


# --- argument parsing -------------------------------------------------------

def build_parser() -> Parser:
    common = Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=0, help="worker processes (default: all cores)")
    common.add_argument("--deterministic", action="store_true", help="fixed seeds, sequential reduction")
    common.add_argument("--log-level", default="INFO")

    parser = Parser(prog="cognates", description="Cognate detection with an MSA transformer.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("align", parents=[common], help="write one MSA file per concept")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--asjp", action="store_true", help="write ASJP symbols instead of IPA")

    p = sub.add_parser("train", parents=[common], help="train a model and store it with its threshold")
    p.add_argument("--input", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--languages", help="language inventory file reserving tokens for unseen languages")
    p.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    p.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    p.add_argument("--learning-rate", type=float, default=TrainConfig.learning_rate)
    p.add_argument("--hidden-size", type=int, default=ModelConfig.hidden_size)
    p.add_argument("--dropout", type=float, default=0.0)
    p.add_argument("--threshold", type=_threshold, help="store this threshold instead of the swept one")

    p = sub.add_parser("predict", parents=[common], help="add PREDICTED_COGID to a wordlist")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--threshold", type=_threshold)

    p = sub.add_parser("evaluate", parents=[common], help="B-Cubed scores per family")
    p.add_argument("--input", required=True, help="predicted wordlist")
    p.add_argument("--gold", required=True)
    p.add_argument("--column", default="PREDICTED_COGID")
    p.add_argument("--per-concept", action="store_true", help="average over concepts within a family")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("split", parents=[common], help="write augmented train/test folds")
    p.add_argument("--input", required=True, help="training wordlist")
    p.add_argument("--test", help="test wordlist")
    p.add_argument("--output", required=True)
    p.add_argument("--proportion", type=float, default=0.125)
    p.add_argument("--folds", type=int, default=5)

    p = sub.add_parser("demo", parents=[common], help="train and score on the bundled synthetic data")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--threshold", type=_threshold)
    p.add_argument("--output", help="also write the predictions here")
    p.add_argument("--json", action="store_true")
    return parser


COMMANDS = {
    "align": cmd_align, "train": cmd_train, "predict": cmd_predict,
    "evaluate": cmd_evaluate, "split": cmd_split, "demo": cmd_demo,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as e:
        print(f"cognates {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (WordlistError, CheckpointError, FileNotFoundError, KeyError, ValueError) as e:
        print(f"cognates {args.command}: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
