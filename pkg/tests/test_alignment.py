import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cognates.alignment import (
    GuideNode, ScoringScheme, distance_matrix, pairwise_align, progressive_msa, upgma_tree,
)
from cognates.phonology import GAP

from oracles import best_alignment_score, naive_upgma


def unit_scheme(alphabet="abcd", mismatch=-1):
    scores = {(x, y): (1 if x == y else mismatch) for x in alphabet for y in alphabet}
    return ScoringScheme(class_score=scores, gap_open=-1, gap_extend=-1, classify=lambda t: t)


def strip(row):
    return [t for t in row if t != GAP]


def test_self_alignment_has_zero_distance():
    aln = pairwise_align(list("pat"), list("pat"))
    assert aln.row_a == aln.row_b == list("pat")
    assert aln.normalized_distance == 0


def test_unit_scores_pat_vs_pt():
    aln = pairwise_align(list("pat"), list("pt"), unit_scheme("pat"))
    assert aln.row_a == ["p", "a", "t"]
    assert aln.row_b == ["p", GAP, "t"]
    assert aln.score == 1


def test_cross_kind_is_at_least_as_far_as_consonant_mismatch():
    assert pairwise_align(["a"], ["k"]).normalized_distance >= pairwise_align(["p"], ["b"]).normalized_distance


def test_rejects_empty_and_gapped_input():
    with pytest.raises(ValueError):
        pairwise_align([], ["p"])
    with pytest.raises(ValueError):
        pairwise_align(["p", GAP], ["p"])


def test_default_scheme_invariants():
    s = ScoringScheme()
    table = s.class_score
    labels = sorted({x for x, _ in table})
    for x, y in itertools.product(labels, repeat=2):
        assert table[x, y] == table[y, x]
    kind = {c: ("V" if c in "AEIOUY" else "T" if c == "Z" else "C") for c in labels}
    same_kind_mismatch = min(table[x, y] for x, y in table if x != y and kind[x] == kind[y])
    for x, y in table:
        if x != y and kind[x] == kind[y]:
            assert table[x, x] > table[x, y]
        if {kind[x], kind[y]} == {"C", "V"}:
            assert table[x, y] <= same_kind_mismatch


short = st.lists(st.sampled_from("abcd"), min_size=1, max_size=6)


@settings(max_examples=150, deadline=None)
@given(short, short, st.sampled_from([(-1, -1), (-3, -1), (-2, 0)]), st.sampled_from([-1, -2]))
def test_pairwise_score_matches_exhaustive_search(a, b, gaps, mismatch):
    scheme = unit_scheme(mismatch=mismatch)
    scheme = ScoringScheme(scheme.class_score, gaps[0], gaps[1], scheme.classify)
    aln = pairwise_align(a, b, scheme)
    oracle = best_alignment_score(a, b, lambda x, y: scheme.class_score[x, y], *gaps)
    assert aln.score == pytest.approx(oracle)
    assert strip(aln.row_a) == a and strip(aln.row_b) == b
    assert len(aln.row_a) == len(aln.row_b)
    assert not any(x == GAP and y == GAP for x, y in zip(aln.row_a, aln.row_b))
    assert 0 <= aln.normalized_distance <= 1


def test_distance_matrix_trivial_cases():
    assert distance_matrix([list("pat")]).tolist() == [[0.0]]
    assert not distance_matrix([list("mano")] * 4).any()


ALL_WORDS = [
    ["s", "ə", "r", "ʋ", "e"],
    ["h", "o", "l", "o", "s"],
    ["ɔ", "m", "n", "ɛ", "s"],
    ["ɔː", "l"],
    ["a", "l", "ə"],
    ["f", "sʲ", "e"],
    ["f", "ʃ", "ɛ"],
]
SKT, GRC, LAT, ENG, DEU, RUS, CES = range(7)


def test_distance_matrix_entries_match_pairwise_recomputation():
    words = ALL_WORDS[3:6]
    d = distance_matrix(words)
    for i, j in itertools.product(range(3), repeat=2):
        expected = 0.0 if i == j else pairwise_align(words[i], words[j]).normalized_distance
        assert d[i, j] == expected


def test_distance_matrix_permutation_invariance():
    rng = np.random.default_rng(3)
    perm = rng.permutation(len(ALL_WORDS))
    d = distance_matrix(ALL_WORDS)
    dp = distance_matrix([ALL_WORDS[k] for k in perm])
    assert np.allclose(dp, d[np.ix_(perm, perm)])


def test_upgma_two_leaves():
    root = upgma_tree(np.array([[0, 0.3], [0.3, 0]]))
    assert root.leaves == (0, 1) and root.height == pytest.approx(0.15)
    assert root.left.is_leaf and root.right.is_leaf


def test_upgma_three_leaf_example():
    d = np.array([[0, 0.2, 0.8], [0.2, 0, 0.6], [0.8, 0.6, 0]])
    root = upgma_tree(d)
    assert root.left.leaves == (0, 1)
    assert root.left.height == pytest.approx(0.1)
    assert root.height == pytest.approx(0.35)
    assert [(a, b, pytest.approx(x)) for a, b, x in naive_upgma(d)] == [((0,), (1,), 0.2), ((0, 1), (2,), 0.7)]


def test_upgma_rejects_empty():
    with pytest.raises(ValueError):
        upgma_tree(np.zeros((0, 0)))


def random_ultrametric(rng, n):
    """Random binary tree with increasing heights; d(i, j) = 2 * height of their join."""
    clusters = [[i] for i in range(n)]
    d = np.zeros((n, n))
    h = 0.0
    while len(clusters) > 1:
        h += rng.uniform(0.05, 0.5)
        a, b = rng.sample(range(len(clusters)), 2)
        for i in clusters[a]:
            for j in clusters[b]:
                d[i, j] = d[j, i] = 2 * h
        merged = clusters[a] + clusters[b]
        clusters = [c for k, c in enumerate(clusters) if k not in (a, b)] + [merged]
    return d


def cophenetic(root: GuideNode, n):
    d = np.zeros((n, n))
    for node in root.postorder():
        if not node.is_leaf:
            for i in node.left.leaves:
                for j in node.right.leaves:
                    d[i, j] = d[j, i] = 2 * node.height
    return d


@pytest.mark.parametrize("seed", range(5))
def test_upgma_recovers_ultrametric(seed):
    rng = random.Random(seed)
    d = random_ultrametric(rng, 7)
    root = upgma_tree(d)
    assert np.allclose(cophenetic(root, 7), d)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.integers(0, 10_000))
def test_upgma_matches_naive_oracle_and_is_monotone(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.random((n, n)).round(2)  # rounding makes ties common
    d = (x + x.T) / 2
    np.fill_diagonal(d, 0)
    root = upgma_tree(d)
    internal = [node for node in root.postorder() if not node.is_leaf]
    got = sorted((node.height * 2, node.leaves) for node in internal)
    want = sorted((dist, tuple(sorted(a + b))) for a, b, dist in naive_upgma(d))
    assert [g[1] for g in got] == [w[1] for w in want]
    assert np.allclose([g[0] for g in got], [w[0] for w in want])
    for node in internal:
        assert node.height >= node.left.height and node.height >= node.right.height
    assert root.leaves == tuple(range(n))


def test_msa_single_word_and_pair():
    assert progressive_msa([list("pat")]).rows == [list("pat")]
    words = [list("pat"), list("pt")]
    aln = pairwise_align(*words)
    assert progressive_msa(words).rows == [aln.row_a, aln.row_b]


def test_indo_european_all_alignment_structure():
    rows = progressive_msa(ALL_WORDS).rows
    first = [row[0] for row in rows]
    # Russian and Czech open with a shared /f/ column that everyone else gaps
    assert first[RUS] == first[CES] == "f"
    assert all(first[k] == GAP for k in (SKT, GRC, LAT, ENG, DEU))
    # Latin, English and German start later than Sanskrit and Greek
    assert all(rows[k][1] == GAP for k in (LAT, ENG, DEU))
    assert rows[SKT][1] == "s" and rows[GRC][1] == "h"
    # the /l/ reflexes of Greek, English and German line up
    col_l = {row.index("l") for row in (rows[GRC], rows[ENG], rows[DEU])}
    assert len(col_l) == 1


words_strategy = st.lists(
    st.lists(st.sampled_from(["p", "t", "k", "m", "s", "a", "e", "o", "u", "ə"]), min_size=1, max_size=6),
    min_size=1, max_size=6,
)


@settings(max_examples=60, deadline=None)
@given(words_strategy)
def test_msa_rows_recover_words(words):
    msa = progressive_msa(words)
    assert len(msa.rows) == len(words)
    assert len({len(r) for r in msa.rows}) == 1
    for row, word in zip(msa.rows, words):
        assert strip(row) == word
    for col in msa.columns():
        assert any(t != GAP for t in col)


def test_msa_rejects_mismatched_tree():
    with pytest.raises(ValueError):
        progressive_msa([list("pa"), list("ta")], tree=GuideNode((0,)))
