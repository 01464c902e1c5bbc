"""Wordlist TSV files, concept grouping and augmented train/test folds."""

from __future__ import annotations

import csv
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

REQUIRED = ("ID", "FAMILY", "DOCULECT", "CONCEPT", "TOKENS", "COGID")


class WordlistError(ValueError):
    """Malformed wordlist content, with file/row context in the message."""


@dataclass
class WordRecord:
    id: int
    family: str
    language: str
    concept: str
    tokens: list[str]
    cogid: str
    extra: dict[str, str] = field(default_factory=dict)

    def get(self, column: str) -> str:
        core = {
            "ID": str(self.id),
            "FAMILY": self.family,
            "DOCULECT": self.language,
            "CONCEPT": self.concept,
            "TOKENS": " ".join(self.tokens),
            "COGID": self.cogid,
        }
        return core[column] if column in core else self.extra.get(column, "")


@dataclass
class Wordlist:
    records: list[WordRecord]
    columns: list[str] = field(default_factory=lambda: list(REQUIRED))

    def __iter__(self) -> Iterator[WordRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def families(self) -> list[str]:
        return list(dict.fromkeys(r.family for r in self.records))

    @property
    def languages(self) -> list[str]:
        return sorted({r.language for r in self.records})

    def concepts(self, family: str | None = None) -> list[str]:
        return list(dict.fromkeys(r.concept for r in self.records if family in (None, r.family)))

    def with_column(self, name: str, values: dict[int, str]) -> "Wordlist":
        columns = self.columns if name in self.columns else self.columns + [name]
        records = [
            WordRecord(r.id, r.family, r.language, r.concept, list(r.tokens), r.cogid, {**r.extra, name: values[r.id]})
            for r in self.records
        ]
        return Wordlist(records, list(columns))


def _parse_rows(path: Path, default_family: str | None) -> Wordlist:
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f, delimiter="\t", quoting=csv.QUOTE_NONE)
        header = list(reader.fieldnames or [])
        columns = header if "FAMILY" in header else header[:1] + ["FAMILY"] + header[1:]
        for col in REQUIRED:
            if col not in header and not (col == "FAMILY" and default_family is not None):
                raise WordlistError(f"{path}: missing required column {col}")
        records = []
        seen = set()
        for lineno, row in enumerate(reader, start=2):
            try:
                wid = int(row["ID"])
            except (TypeError, ValueError):
                raise WordlistError(f"{path}:{lineno}: ID {row['ID']!r} is not an integer") from None
            if wid in seen:
                raise WordlistError(f"{path}:{lineno}: duplicate ID {wid}")
            seen.add(wid)
            tokens = (row["TOKENS"] or "").split()
            if not tokens:
                raise WordlistError(f"{path}:{lineno}: empty TOKENS")
            extra = {k: v for k, v in row.items() if k not in REQUIRED and k is not None}
            records.append(
                WordRecord(
                    wid,
                    row.get("FAMILY") or default_family or "",
                    row["DOCULECT"],
                    row["CONCEPT"],
                    tokens,
                    row["COGID"],
                    extra,
                )
            )
    return Wordlist(records, columns)


def load_wordlist(path: str | Path) -> Wordlist:
    """Read a wordlist TSV, or a directory holding one ``<family>.tsv`` per family."""
    path = Path(path)
    if not path.is_dir():
        return _parse_rows(path, None)
    records, columns = [], list(REQUIRED)
    for file in sorted(path.glob("*.tsv")):
        part = _parse_rows(file, file.stem)
        records.extend(part.records)
        columns += [c for c in part.columns if c not in columns]
    ids = [r.id for r in records]
    if len(ids) != len(set(ids)):
        raise WordlistError(f"{path}: duplicate IDs across family files")
    return Wordlist(records, columns)


def save_wordlist(wl: Wordlist, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("\t".join(wl.columns) + "\n")
        for rec in wl:
            f.write("\t".join(rec.get(c) for c in wl.columns) + "\n")


def load_languages(path: str | Path) -> list[str]:
    """Language inventory: one language name per line, '#' comments allowed."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]


@dataclass
class ConceptGroup:
    family: str
    concept: str
    records: list[WordRecord]

    @property
    def words(self) -> list[list[str]]:
        return [r.tokens for r in self.records]

    @property
    def cogids(self) -> list[str]:
        return [r.cogid for r in self.records]

    @property
    def languages(self) -> list[str]:
        return [r.language for r in self.records]


def group_by_concept(wl: Wordlist) -> list[ConceptGroup]:
    groups: dict[tuple[str, str], list[WordRecord]] = defaultdict(list)
    for rec in wl:
        groups[rec.family, rec.concept].append(rec)
    return [ConceptGroup(fam, con, recs) for (fam, con), recs in groups.items()]


@dataclass(frozen=True)
class SplitSpec:
    proportion: float = 0.0
    folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.proportion < 1:
            raise ValueError("proportion must lie in [0, 1)")
        if self.folds < 1:
            raise ValueError("folds must be >= 1")


def augment_split(train: Wordlist, test: Wordlist, spec: SplitSpec) -> list[tuple[Wordlist, Wordlist]]:
    """Move a random share of each test family's concepts into training, once per fold."""
    if spec.proportion == 0:
        return [(train, test)]
    folds = []
    for fold in range(spec.folds):
        rng = random.Random(f"{spec.seed}:{fold}")
        moved: set[tuple[str, str]] = set()
        for family in test.families:
            concepts = test.concepts(family)
            k = math.ceil(spec.proportion * len(concepts))
            moved.update((family, c) for c in rng.sample(concepts, k))
        extra = [r for r in test if (r.family, r.concept) in moved]
        rest = [r for r in test if (r.family, r.concept) not in moved]
        columns = train.columns + [c for c in test.columns if c not in train.columns]
        folds.append((Wordlist(train.records + extra, columns), Wordlist(rest, list(test.columns))))
    return folds
