import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cognates.alignment import distance_matrix
from cognates.clustering import flat_upgma, labels_from_groups, sca_baseline_cluster

from oracles import naive_flat


def random_similarity(seed, n, decimals=1):
    rng = np.random.default_rng(seed)
    x = rng.random((n, n)).round(decimals)
    p = (x + x.T) / 2
    np.fill_diagonal(p, 1)
    return p


def test_all_linked_and_all_apart():
    assert flat_upgma(np.ones((4, 4)), 0.6) == [0, 0, 0, 0]
    p = np.eye(4)
    assert flat_upgma(p, 0.6) == [0, 1, 2, 3]


def test_three_word_example():
    p = np.array([[1, 0.9, 0.2], [0.9, 1, 0.3], [0.2, 0.3, 1]])
    assert flat_upgma(p, 0.6) == [0, 0, 1]
    assert naive_flat(p, 0.6) == [0, 0, 1]


def test_empty_and_bad_threshold():
    assert flat_upgma(np.zeros((0, 0)), 0.5) == []
    for bad in (0, 1, -0.2, 1.5):
        with pytest.raises(ValueError):
            flat_upgma(np.eye(2), bad)


def test_labels_are_dense_in_first_appearance_order():
    assert labels_from_groups([[2, 3], [0], [1, 4]], 5) == [0, 1, 2, 2, 1]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 5), st.sampled_from([0.3, 0.45, 0.6, 0.75]))
def test_matches_naive_oracle(seed, n, theta):
    p = random_similarity(seed, n)
    assert flat_upgma(p, theta) == naive_flat(p, theta)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 8))
def test_links_are_transitive(seed, n):
    labels = flat_upgma(random_similarity(seed, n, 3), 0.6)
    link = np.equal.outer(labels, labels)
    assert (link == link.T).all() and link.diagonal().all()
    assert ((link.astype(int) @ link.astype(int) > 0) <= link).all()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 8), st.floats(0.05, 0.9), st.floats(0.05, 0.9))
def test_higher_threshold_refines(seed, n, t1, t2):
    lo, hi = sorted((t1, t2))
    p = random_similarity(seed, n, 3)
    coarse, fine = flat_upgma(p, lo), flat_upgma(p, hi)
    for i in range(n):
        for j in range(n):
            if fine[i] == fine[j]:
                assert coarse[i] == coarse[j]


def test_sca_baseline_trivial_cases():
    assert sca_baseline_cluster([]) == []
    assert sca_baseline_cluster([list("pata")] * 3) == [0, 0, 0]
    assert sca_baseline_cluster([["p", "a"], ["ʔ", "u", "ʔ", "u", "ʔ"], ["i", "i", "i", "i", "i", "i"]]) == [0, 1, 2]


def test_sca_baseline_three_words_against_oracle():
    words = [list("pata"), list("bata"), list("miru")]
    sim = 1 - distance_matrix(words)
    assert sca_baseline_cluster(words) == naive_flat(sim, 0.45)
    assert sca_baseline_cluster(words, threshold=0.45)[0] == sca_baseline_cluster(words)[1]
