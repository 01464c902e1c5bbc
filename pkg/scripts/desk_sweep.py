"""Held-out F of the demo setup over several generator and training seeds.

    python scripts/desk_sweep.py --gen-seeds 7 11 --seeds 0 1 2 --epochs 30

Prints one line per run (model F at the swept threshold and at 0.6, SCA F at 0.45)
and the means. Useful before changing the generator or DEMO_MODEL.
"""

import argparse
import dataclasses
import logging
import statistics

from cognates import synthetic
from cognates.clustering import sca_baseline_cluster
from cognates.cli import predict_wordlist
from cognates.evaluation import evaluate_dataset
from cognates.pipeline import prepare_wordlist
from cognates.training import train


def sca_f1(test_wl):
    values = {}
    for concept in prepare_wordlist(test_wl):
        labels = sca_baseline_cluster([[t for t in row if t != "-"] for row in concept.ipa.rows], threshold=0.45)
        values.update({wid: f"{concept.concept}:{k}" for wid, k in zip(concept.ids, labels)})
    return evaluate_dataset(test_wl, test_wl.with_column("PREDICTED_COGID", values)).mean_f1


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--gen-seeds", type=int, nargs="+", default=[11])
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--epochs", type=int, default=synthetic.DEMO_TRAIN.epochs)
    parser.add_argument("--change-rate", type=float, default=0.4)
    parser.add_argument("--hidden-size", type=int, default=synthetic.DEMO_MODEL.hidden_size)
    args = parser.parse_args()
    logging.basicConfig(level=logging.WARNING)

    model_cfg = dataclasses.replace(synthetic.DEMO_MODEL, hidden_size=args.hidden_size,
                                    intermediate_size=args.hidden_size)
    swept, fixed = [], []
    for gen_seed in args.gen_seeds:
        wl = synthetic.generate(seed=gen_seed, change_rate=args.change_rate)
        train_wl, test_wl = synthetic.split_concepts(wl, synthetic.HELD_OUT)
        concepts = prepare_wordlist(train_wl)
        sca = sca_f1(test_wl)
        for seed in args.seeds:
            cfg = dataclasses.replace(synthetic.DEMO_TRAIN, epochs=args.epochs, seed=seed)
            model, choice, vocab = train(concepts, cfg, model_cfg)
            f = evaluate_dataset(test_wl, predict_wordlist(test_wl, model, vocab, choice.threshold)).mean_f1
            f6 = evaluate_dataset(test_wl, predict_wordlist(test_wl, model, vocab, 0.6)).mean_f1
            swept.append(f)
            fixed.append(f6)
            print(f"gen {gen_seed} seed {seed}: F {f:.4f} (theta {choice.threshold:.2f}), "
                  f"F@0.6 {f6:.4f}, SCA {sca:.4f}", flush=True)
    print(f"mean F {statistics.mean(swept):.4f} (min {min(swept):.4f}), "
          f"mean F@0.6 {statistics.mean(fixed):.4f} (min {min(fixed):.4f})")


if __name__ == "__main__":
    main()
