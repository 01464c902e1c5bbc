"""Sound-class progressive multiple alignment.

Pairwise alignment is global with affine gaps (Gotoh recursions). A UPGMA tree over
normalized pairwise distances guides profile-profile merging.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .linkage import average_linkage
from .phonology import GAP, ipa_to_asjp, sound_class_label

VOWEL_CLASSES = "AEIOUY"
CONSONANT_CLASSES = "BCDGHJKLMNPRSTWX"
TONE_CLASSES = "Z"

# sound-change neighbours that score above an arbitrary consonant mismatch
RELATED_CONSONANTS = ["PB", "BW", "TD", "TC", "CS", "CK", "KG", "GH", "SD", "SH", "MN", "RL", "JW"]

NEG_INF = float("-inf")


def _default_class_scores() -> dict[tuple[str, str], int]:
    scores: dict[tuple[str, str], int] = {}
    everything = VOWEL_CLASSES + CONSONANT_CLASSES + TONE_CLASSES
    related = {frozenset(p) for p in RELATED_CONSONANTS}
    for x, y in itertools.product(everything, repeat=2):
        if x in VOWEL_CLASSES and y in VOWEL_CLASSES:
            s = 5 if x == y else 1
        elif x in TONE_CLASSES and y in TONE_CLASSES:
            s = 5
        elif x in CONSONANT_CLASSES and y in CONSONANT_CLASSES:
            if "X" in (x, y):
                s = 0 if x == y else -3
            elif x == y:
                s = 10
            else:
                s = 4 if frozenset((x, y)) in related else -2
        else:
            s = -10
        scores[x, y] = s
    return scores


@dataclass(frozen=True)
class ScoringScheme:
    class_score: dict[tuple[str, str], float] = field(default_factory=_default_class_scores)
    gap_open: float = -4
    gap_extend: float = -1
    classify: Callable[[str], str] = sound_class_label

    def __post_init__(self):
        if self.gap_open > 0 or self.gap_extend > 0:
            raise ValueError("gap penalties must be <= 0")

    def score(self, a: str, b: str) -> float:
        return self.class_score[self.classify(a), self.classify(b)]

    def gap_cost(self, length: int) -> float:
        return 0.0 if length == 0 else self.gap_open + (length - 1) * self.gap_extend


@dataclass
class PairwiseAlignment:
    row_a: list[str]
    row_b: list[str]
    score: float
    normalized_distance: float


@dataclass
class GuideNode:
    leaves: tuple[int, ...]
    height: float = 0.0
    left: "GuideNode | None" = None
    right: "GuideNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def postorder(self):
        if not self.is_leaf:
            yield from self.left.postorder()
            yield from self.right.postorder()
        yield self


@dataclass
class Msa:
    rows: list[list[str]]
    ids: list = field(default_factory=list)
    languages: list[str] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def columns(self) -> list[tuple[str, ...]]:
        return list(zip(*self.rows))


def affine_global(n: int, m: int, score: Callable[[int, int], float], gap_open: float, gap_extend: float):
    """Best global alignment path of two sequences of lengths n and m.

    Returns (score, ops) where ops holds "M" (match column), "A" (a consumed, gap in b)
    and "B" (b consumed, gap in a). Ties prefer M, then A, then B.
    """
    M = np.full((n + 1, m + 1), NEG_INF)
    X = np.full((n + 1, m + 1), NEG_INF)  # ends in a-consuming gap column
    Y = np.full((n + 1, m + 1), NEG_INF)  # ends in b-consuming gap column
    M[0, 0] = 0.0
    for i in range(1, n + 1):
        X[i, 0] = gap_open + (i - 1) * gap_extend
    for j in range(1, m + 1):
        Y[0, j] = gap_open + (j - 1) * gap_extend
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            M[i, j] = score(i - 1, j - 1) + max(M[i - 1, j - 1], X[i - 1, j - 1], Y[i - 1, j - 1])
            X[i, j] = max(M[i - 1, j] + gap_open, X[i - 1, j] + gap_extend, Y[i - 1, j] + gap_open)
            Y[i, j] = max(M[i, j - 1] + gap_open, Y[i, j - 1] + gap_extend, X[i, j - 1] + gap_open)

    def pick(cands):
        best = max(v for _, v in cands)
        return next(s for s, v in cands if v == best)

    i, j = n, m
    state = pick([("M", M[i, j]), ("A", X[i, j]), ("B", Y[i, j])])
    total = {"M": M, "A": X, "B": Y}[state][i, j]
    ops = []
    while i > 0 or j > 0:
        ops.append(state)
        if state == "M":
            i, j = i - 1, j - 1
            state = pick([("M", M[i, j]), ("A", X[i, j]), ("B", Y[i, j])])
        elif state == "A":
            i -= 1
            state = pick([("M", M[i, j] + gap_open), ("A", X[i, j] + gap_extend), ("B", Y[i, j] + gap_open)])
        else:
            j -= 1
            state = pick([("M", M[i, j] + gap_open), ("A", X[i, j] + gap_open), ("B", Y[i, j] + gap_extend)])
    ops.reverse()
    return float(total), ops


def _apply_ops(ops, a, b, gap_a, gap_b):
    out_a, out_b = [], []
    ia = ib = 0
    for op in ops:
        if op in "MA":
            out_a.append(a[ia])
            ia += 1
        else:
            out_a.append(gap_a)
        if op in "MB":
            out_b.append(b[ib])
            ib += 1
        else:
            out_b.append(gap_b)
    return out_a, out_b


def normalized_distance(a: Sequence[str], b: Sequence[str], score: float, scheme: ScoringScheme) -> float:
    best = (sum(scheme.score(t, t) for t in a) + sum(scheme.score(t, t) for t in b)) / 2
    worst = scheme.gap_cost(len(a)) + scheme.gap_cost(len(b))
    if best <= worst:
        return 0.0 if score >= best else 1.0
    return float(min(1.0, max(0.0, 1 - (score - worst) / (best - worst))))


def pairwise_align(a: Sequence[str], b: Sequence[str], scheme: ScoringScheme | None = None) -> PairwiseAlignment:
    scheme = scheme or ScoringScheme()
    if not a or not b:
        raise ValueError("cannot align an empty sequence")
    if GAP in a or GAP in b:
        raise ValueError("input sequences must be gap-free")
    ca = [scheme.classify(t) for t in a]
    cb = [scheme.classify(t) for t in b]
    table = scheme.class_score
    score, ops = affine_global(
        len(a), len(b), lambda i, j: table[ca[i], cb[j]], scheme.gap_open, scheme.gap_extend
    )
    row_a, row_b = _apply_ops(ops, list(a), list(b), GAP, GAP)
    return PairwiseAlignment(row_a, row_b, score, normalized_distance(a, b, score, scheme))


def distance_matrix(words: Sequence[Sequence[str]], scheme: ScoringScheme | None = None) -> np.ndarray:
    scheme = scheme or ScoringScheme()
    r = len(words)
    d = np.zeros((r, r))
    for i in range(r):
        for j in range(i + 1, r):
            d[i, j] = d[j, i] = pairwise_align(words[i], words[j], scheme).normalized_distance
    return d


def upgma_tree(d: np.ndarray) -> GuideNode:
    d = np.asarray(d, dtype=np.float64)
    if d.shape[0] == 0:
        raise ValueError("cannot build a tree over zero items")
    nodes = {(i,): GuideNode((i,)) for i in range(d.shape[0])}
    for merge in average_linkage(d):
        left, right = nodes.pop(merge.left), nodes.pop(merge.right)
        nodes[merge.members] = GuideNode(merge.members, merge.distance / 2, left, right)
    (root,) = nodes.values()
    return root


def _profile_columns(rows: list[list[str]], classify) -> list[Counter]:
    return [Counter(classify(t) for t in col if t != GAP) for col in zip(*rows)]


def _align_profiles(p: list[list[str]], q: list[list[str]], scheme: ScoringScheme):
    cp = _profile_columns(p, scheme.classify)
    cq = _profile_columns(q, scheme.classify)
    table = scheme.class_score

    def col_score(i, j):
        a, b = cp[i], cq[j]
        total = sum(na * nb * table[x, y] for x, na in a.items() for y, nb in b.items())
        pairs = sum(a.values()) * sum(b.values())
        return total / pairs if pairs else 0.0

    _, ops = affine_global(len(cp), len(cq), col_score, scheme.gap_open, scheme.gap_extend)
    cols_p, cols_q = _apply_ops(
        ops, list(zip(*p)), list(zip(*q)), (GAP,) * len(p), (GAP,) * len(q)
    )
    merged_p = [list(r) for r in zip(*cols_p)]
    merged_q = [list(r) for r in zip(*cols_q)]
    return merged_p + merged_q


def _drop_gap_columns(rows: list[list[str]]) -> list[list[str]]:
    keep = [k for k, col in enumerate(zip(*rows)) if any(t != GAP for t in col)]
    return [[row[k] for k in keep] for row in rows]


def progressive_msa(
    words: Sequence[Sequence[str]],
    tree: GuideNode | None = None,
    scheme: ScoringScheme | None = None,
) -> Msa:
    """Align all words by merging profiles bottom-up along the guide tree.

    Rows of the result are in input order.
    """
    scheme = scheme or ScoringScheme()
    if not words:
        return Msa([])
    if tree is None:
        tree = upgma_tree(distance_matrix(words, scheme))
    if set(tree.leaves) != set(range(len(words))):
        raise ValueError("guide tree leaves do not cover the words")
    profiles: dict[int, tuple[tuple[int, ...], list[list[str]]]] = {}
    for node in tree.postorder():
        if node.is_leaf:
            (i,) = node.leaves
            profiles[id(node)] = ((i,), [list(words[i])])
            continue
        lo, lrows = profiles.pop(id(node.left))
        ro, rrows = profiles.pop(id(node.right))
        profiles[id(node)] = (lo + ro, _drop_gap_columns(_align_profiles(lrows, rrows, scheme)))
    order, rows = profiles[id(tree)]
    by_word = dict(zip(order, rows))
    return Msa([by_word[i] for i in range(len(words))])


def msa_to_asjp(msa: Msa) -> Msa:
    return Msa([[ipa_to_asjp(t) for t in row] for row in msa.rows], list(msa.ids), list(msa.languages))
