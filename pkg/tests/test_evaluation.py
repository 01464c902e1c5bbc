import pytest
from hypothesis import given, settings, strategies as st

from cognates.dataio import Wordlist, WordRecord
from cognates.evaluation import bcubed, evaluate_dataset, score_labels

from oracles import bcubed_per_item


def as_map(labels):
    return dict(enumerate(labels))


def test_identity():
    s = bcubed(as_map("aab"), as_map("xxy"))
    assert (s.precision, s.recall, s.f1) == (1, 1, 1)


def test_lumping_everything():
    s = bcubed(as_map([0, 0, 1]), as_map([0, 0, 0]))
    assert s.precision == pytest.approx(5 / 9, abs=1e-12)
    assert s.recall == 1
    assert s.f1 == pytest.approx(5 / 7, abs=1e-12)


def test_all_singletons():
    s = bcubed(as_map([0, 0, 1]), as_map([0, 1, 2]))
    assert s.precision == 1
    assert s.recall == pytest.approx(2 / 3, abs=1e-12)
    assert s.f1 == pytest.approx(0.8, abs=1e-12)


def test_errors():
    with pytest.raises(ValueError):
        bcubed({}, {})
    with pytest.raises(ValueError):
        bcubed({1: 0}, {2: 0})


clusterings = st.integers(1, 12).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 4), min_size=n, max_size=n),
                        st.lists(st.integers(0, 4), min_size=n, max_size=n))
)


@settings(max_examples=200, deadline=None)
@given(clusterings)
def test_matches_per_item_oracle(pair):
    gold, pred = pair
    s = bcubed(as_map(gold), as_map(pred))
    assert (s.precision, s.recall, s.f1) == pytest.approx(bcubed_per_item(gold, pred), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(clusterings, st.permutations(range(5)))
def test_swap_and_relabel(pair, perm):
    gold, pred = pair
    s = bcubed(as_map(gold), as_map(pred))
    t = bcubed(as_map(pred), as_map(gold))
    assert (t.precision, t.recall) == pytest.approx((s.recall, s.precision), abs=1e-12)
    relabelled = bcubed(as_map([perm[g] for g in gold]), as_map([f"c{p}" for p in pred]))
    assert relabelled.f1 == pytest.approx(s.f1, abs=1e-12)
    assert bcubed(as_map(gold), as_map([perm[g] for g in gold])).f1 == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=2, max_size=10), st.data())
def test_merging_within_a_gold_class_keeps_recall(gold, data):
    # split each gold class arbitrarily, then merge two of the pieces of one class
    pred = [(g, data.draw(st.integers(0, 2))) for g in gold]
    target = data.draw(st.sampled_from(sorted(set(pred))))
    other = [p for p in set(pred) if p[0] == target[0] and p != target]
    before = bcubed(as_map(gold), as_map(pred)).recall
    if other:
        merged = [target if p == other[0] else p for p in pred]
        assert bcubed(as_map(gold), as_map(merged)).recall >= before - 1e-12


def wordlist(rows, predicted=None):
    records = [WordRecord(i, fam, f"l{i}", con, ["p", "a"], cog) for i, (fam, con, cog) in enumerate(rows)]
    wl = Wordlist(records)
    if predicted is not None:
        wl = wl.with_column("PREDICTED_COGID", dict(enumerate(predicted)))
    return wl


def test_dataset_single_family_and_gold_vs_gold():
    gold = wordlist([("A", "all", "1"), ("A", "all", "1"), ("A", "all", "2")])
    pred = wordlist([("A", "all", "1"), ("A", "all", "1"), ("A", "all", "2")], ["all:0", "all:0", "all:0"])
    report = evaluate_dataset(gold, pred)
    assert report.mean_f1 == report.families[0].f1 == pytest.approx(5 / 7)
    assert evaluate_dataset(gold, gold).mean_f1 == 1


def test_dataset_mean_is_unweighted_and_ordered():
    rows = [("Z", "c", "1"), ("Z", "c", "1"), ("Z", "c", "2"), ("A", "c", "1"), ("A", "c", "1")]
    gold = wordlist(rows)
    pred = wordlist(rows, ["c:0", "c:0", "c:0", "c:0", "c:1"])
    report = evaluate_dataset(gold, pred)
    assert [f.family for f in report.families] == ["Z", "A"]
    fz, fa = 5 / 7, 2 * 1 * 0.5 / 1.5
    assert report.mean_f1 == pytest.approx((fz + fa) / 2)
    assert "mean" in report.format_table()
    assert report.to_dict()["mean"]["f1"] == pytest.approx(report.mean_f1)


def test_dataset_clusters_never_span_concepts():
    rows = [("A", "c1", "1"), ("A", "c2", "1")]
    # same raw ids on both sides, but in different concepts: nothing is linked
    for pred in (["x", "x"], ["x", "y"]):
        report = evaluate_dataset(wordlist(rows), wordlist(rows, pred))
        assert (report.families[0].precision, report.families[0].recall) == (1, 1)


def test_dataset_id_mismatch_lists_ids():
    gold = wordlist([("A", "c", "1"), ("A", "c", "1")])
    pred = wordlist([("A", "c", "1")], ["c:0"])
    with pytest.raises(ValueError, match=r"\[1\]"):
        evaluate_dataset(gold, pred)


def test_per_concept_average_option():
    rows = [("A", "c1", "1"), ("A", "c1", "1"), ("A", "c1", "2"), ("A", "c2", "1")]
    pred = wordlist(rows, ["c1:0", "c1:0", "c1:0", "c2:0"])
    report = evaluate_dataset(wordlist(rows), pred, per_concept=True)
    assert report.mean_f1 == pytest.approx((5 / 7 + 1) / 2)


def test_score_labels_pools_concepts():
    s = score_labels([[0, 0, 1], [5]], [[0, 0, 0], [9]])
    assert s.precision == pytest.approx((5 / 3 + 1) / 4)
