"""Concept preprocessing: vowel merging, progressive alignment, ASJP conversion."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .alignment import Msa, ScoringScheme, msa_to_asjp, progressive_msa
from .dataio import ConceptGroup, Wordlist, group_by_concept
from .phonology import Vocabulary, merge_consecutive_vowels, tokenize_msa


@dataclass
class PreparedConcept:
    family: str
    concept: str
    ids: list[int]
    languages: list[str]
    cogids: list[str]
    ipa: Msa
    asjp: Msa

    def tokens(self, vocab: Vocabulary) -> np.ndarray:
        return tokenize_msa(self.asjp.rows, self.languages, vocab)


def prepare_group(group: ConceptGroup, scheme: ScoringScheme | None = None) -> PreparedConcept:
    words = [merge_consecutive_vowels(w) for w in group.words]
    ipa = progressive_msa(words, scheme=scheme)
    ipa.ids = [r.id for r in group.records]
    ipa.languages = group.languages
    return PreparedConcept(
        group.family, group.concept, ipa.ids, group.languages, group.cogids, ipa, msa_to_asjp(ipa)
    )


def default_workers() -> int:
    return os.cpu_count() or 1


def prepare_wordlist(wl: Wordlist, workers: int = 1) -> list[PreparedConcept]:
    """Align every concept group; result order follows ``group_by_concept``."""
    groups = group_by_concept(wl)
    if workers <= 1 or len(groups) < 2:
        return [prepare_group(g) for g in groups]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(prepare_group, groups, chunksize=max(1, len(groups) // (4 * workers))))


def build_vocabulary(concepts: Sequence[PreparedConcept], languages: Sequence[str] = ()) -> Vocabulary:
    rows = [row for c in concepts for row in c.asjp.rows]
    langs = set(languages) | {lang for c in concepts for lang in c.languages}
    return Vocabulary.build(rows, langs)
