"""B-Cubed scores between gold and predicted clusterings."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

from .dataio import Wordlist


@dataclass(frozen=True)
class BCubed:
    precision: float
    recall: float
    f1: float


def _harmonic(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def bcubed(gold: Mapping[Hashable, Hashable], predicted: Mapping[Hashable, Hashable]) -> BCubed:
    """Item-averaged B-Cubed precision, recall and F1.

    Both mappings send item -> cluster id and must share their key set.
    """
    if not gold:
        raise ValueError("cannot score an empty clustering")
    if gold.keys() != predicted.keys():
        missing = sorted(map(str, gold.keys() ^ predicted.keys()))
        raise ValueError(f"gold and predicted items differ: {missing[:10]}")
    joint = Counter((gold[k], predicted[k]) for k in gold)
    gold_size = Counter(gold.values())
    pred_size = Counter(predicted.values())
    # each item in cell (g, c) has overlap joint[g, c]
    p = sum(n * n / pred_size[c] for (g, c), n in joint.items()) / len(gold)
    r = sum(n * n / gold_size[g] for (g, c), n in joint.items()) / len(gold)
    return BCubed(p, r, _harmonic(p, r))


@dataclass
class FamilyScore:
    family: str
    precision: float
    recall: float
    f1: float
    words: int


@dataclass
class Report:
    families: list[FamilyScore]

    @property
    def mean_f1(self) -> float:
        return sum(f.f1 for f in self.families) / len(self.families)

    @property
    def mean_precision(self) -> float:
        return sum(f.precision for f in self.families) / len(self.families)

    @property
    def mean_recall(self) -> float:
        return sum(f.recall for f in self.families) / len(self.families)

    def to_dict(self) -> dict:
        return {
            "families": [vars(f) for f in self.families],
            "mean": {"precision": self.mean_precision, "recall": self.mean_recall, "f1": self.mean_f1},
        }

    def format_table(self) -> str:
        lines = [f"{'family':<12}{'P':>8}{'R':>8}{'F':>8}"]
        for f in self.families:
            lines.append(f"{f.family:<12}{f.precision:>8.3f}{f.recall:>8.3f}{f.f1:>8.3f}")
        lines.append(f"{'mean':<12}{self.mean_precision:>8.3f}{self.mean_recall:>8.3f}{self.mean_f1:>8.3f}")
        return "\n".join(lines)


def _labels(wl: Wordlist, column: str) -> dict[str, tuple[str, str]]:
    return {rec.id: (rec.concept, rec.get(column)) for rec in wl}


def evaluate_dataset(
    gold: Wordlist,
    predicted: Wordlist,
    predicted_column: str = "PREDICTED_COGID",
    per_concept: bool = False,
) -> Report:
    """Per-family B-Cubed plus the unweighted mean over families.

    Scores pool all words of a family, with cluster ids namespaced by concept. With
    ``per_concept`` the family score is instead the mean over its concepts.
    """
    if predicted_column not in predicted.columns:
        predicted_column = "COGID"
    gold_ids = {rec.id for rec in gold}
    pred_ids = {rec.id for rec in predicted}
    if gold_ids != pred_ids:
        odd = sorted(gold_ids ^ pred_ids, key=str)
        raise ValueError(f"word ids differ between gold and predicted: {odd[:20]}")
    pred = _labels(predicted, predicted_column)
    families: dict[str, dict[str, list]] = defaultdict(lambda: defaultdict(list))
    for rec in gold:
        families[rec.family][rec.concept].append(rec)
    scores = []
    for family, concepts in families.items():
        if per_concept:
            parts = [
                bcubed({r.id: r.cogid for r in recs}, {r.id: pred[r.id] for r in recs})
                for recs in concepts.values()
            ]
            p = sum(s.precision for s in parts) / len(parts)
            r = sum(s.recall for s in parts) / len(parts)
            f = sum(s.f1 for s in parts) / len(parts)
        else:
            recs = [r for rs in concepts.values() for r in rs]
            s = bcubed({r.id: (r.concept, r.cogid) for r in recs}, {r.id: pred[r.id] for r in recs})
            p, r, f = s.precision, s.recall, s.f1
        n = sum(len(rs) for rs in concepts.values())
        scores.append(FamilyScore(family, p, r, f, n))
    return Report(scores)


def score_labels(gold_labels: Sequence[Sequence], pred_labels: Sequence[Sequence]) -> BCubed:
    """B-Cubed over several concepts given parallel per-concept label lists."""
    gold, pred = {}, {}
    for m, (g, p) in enumerate(zip(gold_labels, pred_labels)):
        for i, (gi, pi) in enumerate(zip(g, p)):
            gold[m, i] = (m, gi)
            pred[m, i] = (m, pi)
    return bcubed(gold, pred)
