"""Sound representations: IPA to ASJP, sound classes, vocabulary and MSA tokenization."""

from __future__ import annotations

import logging
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)

GAP = "-"
PAD_TOKEN = "[PAD]"
UNK_TOKEN = "[UNK]"
SPECIALS = (PAD_TOKEN, GAP, UNK_TOKEN)
PAD_ID, GAP_ID, UNK_ID = 0, 1, 2
MAX_VOCAB = 768

FALLBACK_CLASS = "X"
GAP_CLASS = "-"

# segments seen by a lookup that no table covers, with counts
unknown_segments: Counter[str] = Counter()


@dataclass(frozen=True)
class SoundClass:
    label: str
    kind: str  # consonant | vowel | tone | gap

    @property
    def is_vowel(self) -> bool:
        return self.kind == "vowel"


GAP_SOUND_CLASS = SoundClass(GAP_CLASS, "gap")
FALLBACK_SOUND_CLASS = SoundClass(FALLBACK_CLASS, "consonant")


def _read_tsv(name: str) -> list[list[str]]:
    text = resources.files("cognates.data").joinpath(name).read_text(encoding="utf-8")
    rows = [line.split("\t") for line in text.splitlines() if line and not line.startswith("#")]
    return rows[1:]


@lru_cache(maxsize=None)
def asjp_table() -> dict[str, str]:
    return {unicodedata.normalize("NFD", ipa): asjp for ipa, asjp in _read_tsv("asjp_map.tsv")}


@lru_cache(maxsize=None)
def sca_table() -> dict[str, SoundClass]:
    return {
        unicodedata.normalize("NFD", seg): SoundClass(cls, kind)
        for seg, cls, kind in _read_tsv("sca_classes.tsv")
    }


def _strip_modifiers(token: str) -> str:
    """Drop combining marks (tie bars, diacritics) and modifier letters such as ʰ ʲ ː."""
    return "".join(
        ch for ch in token
        if not unicodedata.combining(ch) and unicodedata.category(ch) != "Lm"
    )


def _record_unknown(token: str, what: str) -> None:
    if token not in unknown_segments:
        log.warning("no %s entry for segment %r", what, token)
    unknown_segments[token] += 1


def _lookup(token: str, table: dict):
    """Full match, then modifier-stripped match, then first character of a run of known characters."""
    token = unicodedata.normalize("NFD", token)
    if token in table:
        return table[token]
    base = _strip_modifiers(token)
    if base in table:
        return table[base]
    if base and all(ch in table for ch in base):
        return table[base[0]]
    return None


def ipa_to_asjp(token: str) -> str:
    if token == GAP:
        return GAP
    hit = _lookup(token, asjp_table())
    if hit is None:
        _record_unknown(token, "ASJP")
        return UNK_TOKEN
    return hit


def sound_class(token: str) -> SoundClass:
    if token == GAP:
        return GAP_SOUND_CLASS
    hit = _lookup(token, sca_table())
    if hit is None:
        _record_unknown(token, "sound-class")
        return FALLBACK_SOUND_CLASS
    return hit


def sound_class_label(token: str) -> str:
    return sound_class(token).label


def merge_consecutive_vowels(tokens: Sequence[str]) -> list[str]:
    out: list[str] = []
    prev_vowel = False
    for tok in tokens:
        vowel = sound_class(tok).is_vowel
        if vowel and prev_vowel:
            out[-1] += tok
        else:
            out.append(tok)
        prev_vowel = vowel
    return out


def language_token(language: str) -> str:
    return f"[{language}]"


@dataclass
class Vocabulary:
    """Frozen token-to-id map. Layout: specials, language tokens (sorted), surface tokens."""

    token_to_id: dict[str, int]
    languages: tuple[str, ...]
    max_size: int = MAX_VOCAB
    id_to_token: list[str] = field(init=False, repr=False)

    def __post_init__(self):
        self.id_to_token = [""] * len(self.token_to_id)
        for tok, i in self.token_to_id.items():
            self.id_to_token[i] = tok
        if sorted(self.token_to_id.values()) != list(range(len(self.token_to_id))):
            raise ValueError("vocabulary ids are not dense")
        if len(self) > self.max_size:
            raise ValueError(f"vocabulary size {len(self)} exceeds {self.max_size}")

    @classmethod
    def build(
        cls,
        rows: Iterable[Sequence[str]],
        languages: Iterable[str],
        max_size: int = MAX_VOCAB,
    ) -> "Vocabulary":
        langs = tuple(sorted(set(languages)))
        counts = Counter(tok for row in rows for tok in row if tok not in SPECIALS)
        token_to_id = {tok: i for i, tok in enumerate(SPECIALS)}
        for lang in langs:
            token_to_id[language_token(lang)] = len(token_to_id)
        if len(token_to_id) > max_size:
            raise ValueError(f"{len(langs)} languages do not fit a vocabulary of {max_size}")
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        room = max_size - len(token_to_id)
        if len(ranked) > room:
            log.warning("vocabulary full: %d rare tokens map to %s", len(ranked) - room, UNK_TOKEN)
        for tok, _ in ranked[:room]:
            token_to_id[tok] = len(token_to_id)
        return cls(token_to_id, langs, max_size)

    def __len__(self) -> int:
        return len(self.token_to_id)

    def id(self, token: str) -> int:
        return self.token_to_id.get(token, UNK_ID)

    def language_id(self, language: str) -> int:
        try:
            return self.token_to_id[language_token(language)]
        except KeyError:
            raise KeyError(f"language {language!r} is not in the vocabulary") from None

    def to_dict(self) -> dict:
        return {"tokens": self.id_to_token, "languages": list(self.languages), "max_size": self.max_size}

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        return cls({t: i for i, t in enumerate(d["tokens"])}, tuple(d["languages"]), d["max_size"])


def tokenize_msa(rows: Sequence[Sequence[str]], languages: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    """Integer grid r x (c+1): language token, then one id per aligned cell."""
    if len(rows) != len(languages):
        raise ValueError(f"{len(rows)} rows but {len(languages)} languages")
    if not rows:
        return np.zeros((0, 0), dtype=np.int64)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("MSA is not rectangular")
    grid = np.empty((len(rows), width + 1), dtype=np.int64)
    for i, (row, lang) in enumerate(zip(rows, languages)):
        grid[i, 0] = vocab.language_id(lang)
        grid[i, 1:] = [vocab.id(tok) for tok in row]
    return grid


def detokenize(grid: np.ndarray, vocab: Vocabulary) -> list[list[str]]:
    return [[vocab.id_to_token[i] for i in row[1:]] for row in grid]
