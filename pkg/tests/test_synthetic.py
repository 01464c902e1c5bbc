from cognates import synthetic
from cognates.phonology import sound_class_label


def test_bundled_files_match_the_generator(tmp_path):
    for path in synthetic.write_bundled(tmp_path):
        shipped = synthetic.resources.files("cognates") / "data" / path.name
        assert shipped.read_bytes() == path.read_bytes()


def test_bundled_shape():
    train, test = synthetic.load_bundled()
    for part, n in ((train, 20), (test, synthetic.HELD_OUT)):
        assert part.families == ["Alpha", "Beta"]
        for fam in part.families:
            concepts = part.concepts(fam)
            assert len(concepts) == n
            assert len({r.language for r in part if r.family == fam}) == 8
    assert not {r.concept for r in train} & {r.concept for r in test}


def test_every_shift_changes_sound_class():
    for source, targets in synthetic.SHIFTS.items():
        assert all(sound_class_label(t) != sound_class_label(source) for t in targets), source


def test_generator_is_deterministic():
    a = synthetic.generate(concepts=4, seed=5)
    b = synthetic.generate(concepts=4, seed=5)
    assert [(r.tokens, r.cogid) for r in a] == [(r.tokens, r.cogid) for r in b]


def test_distractors_use_their_own_inventory():
    wl = synthetic.generate(concepts=30, seed=11)
    alien = set(synthetic.DISTRACTORS.consonants + synthetic.DISTRACTORS.vowels)
    for r in wl:
        assert ("x" in r.cogid.split("-")[1]) == bool(alien & set(r.tokens))
