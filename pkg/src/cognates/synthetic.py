"""Deterministic toy wordlists with known cognate sets.

Each family has a proto inventory. A concept draws one to three proto-forms; every
language descends from one of them through its own fixed sound changes, so
correspondences recur across concepts. Some languages instead carry a distractor
word built from an unrelated segment inventory.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .dataio import REQUIRED, Wordlist, WordRecord, load_wordlist, save_wordlist
from .model import ModelConfig
from .training import TrainConfig


@dataclass(frozen=True)
class FamilySpec:
    name: str
    consonants: tuple[str, ...]
    vowels: tuple[str, ...]


FAMILIES = (
    FamilySpec("Alpha", tuple("p t k b d g m n s l r w".split()), tuple("a e i o u".split())),
    FamilySpec("Beta", tuple("p t k m n ŋ s h l j".split()), tuple("a i u ə o".split())),
)

# Sound changes a proto segment may undergo in a daughter language. Every target
# lies in a different SCA class from its source, so cognacy has to be learned from
# recurring correspondences; class-preserving changes would hand it to SCA for free.
SHIFTS = {
    "p": ["f", "h", "ɸ"], "t": ["s", "θ", "ts"], "k": ["x", "tʃ", "h"],
    "b": ["v", "w", "m"], "d": ["ð", "r", "l", "z"], "g": ["ɣ", "j"],
    "m": ["n", "b"], "n": ["l", "r"], "ŋ": ["g", "ɣ"], "s": ["h", "θ"],
    "l": ["r", "j", "n"], "r": ["l", "j", "d"], "w": ["v", "b"], "h": ["x", "s"],
    "j": ["ʒ", "dʒ"],
    "a": ["ɛ", "o", "ə"], "e": ["i"], "i": ["e"], "o": ["u"], "u": ["o"], "ə": ["a", "o"],
}

DISTRACTORS = FamilySpec("distractor", tuple("q χ ʔ ɬ ʕ ǃ ɢ ħ ǀ ʘ ɮ".split()), tuple("y ø ɯ œ ɨ".split()))


def _form(rng: random.Random, consonants, vowels) -> list[str]:
    word = []
    for _ in range(rng.choice((2, 2, 3))):
        word += [rng.choice(consonants), rng.choice(vowels)]
    if rng.random() < 0.4:
        word.append(rng.choice(consonants))
    return word


def _too_close(a: list[str], b: list[str]) -> bool:
    """Distinct roots share no consonant slot and at most one vowel slot.

    Forms are built as C V C V ... (C), so consonants sit at even positions.
    """
    same = [x == y for x, y in zip(a, b)]
    return any(same[0::2]) or sum(same) > 1


def _distinct_forms(rng: random.Random, fam: FamilySpec, n: int, forms=None, changes=()) -> list[list[str]]:
    """Draw n more forms. With ``changes`` (one substitution map per daughter), the
    reflexes of different forms must also stay apart in every pair of daughters."""
    forms = forms if forms is not None else []
    n += len(forms)
    reflexes = [{}] + list(changes)
    while len(forms) < n:
        cand = _form(rng, fam.consonants, fam.vowels)
        if not any(
            _too_close([x.get(s, s) for s in cand], [y.get(s, s) for s in f])
            for f in forms for x in reflexes for y in reflexes
        ):
            forms.append(cand)
    return forms


def _sound_changes(rng: random.Random, fam: FamilySpec, rate: float, inherited=None) -> dict[str, str]:
    changes = dict(inherited or {})
    for seg in fam.consonants + fam.vowels:
        if seg in SHIFTS and rng.random() < rate:
            changes[seg] = rng.choice(SHIFTS[seg])
    return changes


def generate(
    concepts: int = 30,
    languages: int = 8,
    seed: int = 11,
    change_rate: float = 0.4,
    language_rate: float = 0.15,
    subgroups: int = 2,
    distractor_rate: float = 0.08,
    families=FAMILIES,
    distinct_reflexes: bool = True,
) -> Wordlist:
    rng = random.Random(seed)
    records = []
    next_id = 1
    for fam in families:
        langs = [f"{fam.name[:3].lower()}{k + 1}" for k in range(languages)]
        shared = [_sound_changes(rng, fam, change_rate) for _ in range(subgroups)]
        changes = {
            lang: _sound_changes(rng, fam, language_rate, shared[k % subgroups])
            for k, lang in enumerate(langs)
        }
        final_loss = {lang: rng.random() < 0.3 for lang in langs}
        for m in range(concepts):
            concept = f"concept_{m + 1:02d}"
            n_sets = rng.choice((1, 2, 2, 3, 3))
            protos = _distinct_forms(rng, fam, n_sets, changes=changes.values() if distinct_reflexes else ())
            assignment = [k % n_sets for k in range(languages)]
            rng.shuffle(assignment)
            loans: list[list[str]] = []
            for lang, k in zip(langs, assignment):
                if rng.random() < distractor_rate:
                    tokens = _distinct_forms(rng, DISTRACTORS, 1, loans)[-1]
                    cogid = f"{m + 1}-x{lang}"
                else:
                    tokens = [changes[lang].get(s, s) for s in protos[k]]
                    if final_loss[lang] and len(tokens) > 3 and protos[k][-1] in fam.vowels:
                        tokens = tokens[:-1]
                    cogid = f"{m + 1}-{k}"
                records.append(WordRecord(next_id, fam.name, lang, concept, tokens, cogid))
                next_id += 1
    return Wordlist(records, list(REQUIRED))


def split_concepts(wl: Wordlist, test_concepts: int = 10) -> tuple[Wordlist, Wordlist]:
    """The last ``test_concepts`` concepts of each family become the held-out set."""
    held = set()
    for fam in wl.families:
        held.update((fam, c) for c in wl.concepts(fam)[-test_concepts:])
    train = [r for r in wl if (r.family, r.concept) not in held]
    test = [r for r in wl if (r.family, r.concept) in held]
    return Wordlist(train, list(wl.columns)), Wordlist(test, list(wl.columns))


# The shipped desk-scale dataset: generate() defaults, last HELD_OUT concepts per family held out.
HELD_OUT = 10
BUNDLED_FILES = ("synthetic_train.tsv", "synthetic_test.tsv")

# A smaller model than the default trains in well under a minute on one core and
# generalises better on 20 training concepts per family.
DEMO_MODEL = ModelConfig(hidden_size=64, intermediate_size=64, pair_projection_size=32, dropout=0.1)
DEMO_TRAIN = TrainConfig(epochs=30)


def write_bundled(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    paths = [directory / name for name in BUNDLED_FILES]
    for part, path in zip(split_concepts(generate(), HELD_OUT), paths):
        save_wordlist(part, path)
    return paths


def load_bundled() -> tuple[Wordlist, Wordlist]:
    """(train, test) wordlists shipped with the package."""
    data = resources.files("cognates") / "data"
    parts = []
    for name in BUNDLED_FILES:
        with resources.as_file(data / name) as path:
            parts.append(load_wordlist(path))
    return parts[0], parts[1]
