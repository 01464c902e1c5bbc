"""Flat UPGMA clustering of link probabilities."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .alignment import ScoringScheme, distance_matrix
from .linkage import average_linkage

SCA_THRESHOLD = 0.45


def labels_from_groups(groups: Sequence[Sequence[int]], n: int) -> list[int]:
    """Dense labels numbered by first appearance in word order."""
    owner = {}
    for g in groups:
        for i in g:
            owner[i] = min(g)
    relabel: dict[int, int] = {}
    return [relabel.setdefault(owner[i], len(relabel)) for i in range(n)]


def flat_upgma(p: np.ndarray, threshold: float) -> list[int]:
    """Cluster words whose average pairwise similarity stays at or above ``threshold``.

    Works on distances 1 - p and stops at the first merge whose average distance
    exceeds 1 - threshold.
    """
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    p = np.asarray(p, dtype=np.float64)
    n = p.shape[0]
    if n == 0:
        return []
    cutoff = 1 - threshold
    groups = {i: (i,) for i in range(n)}
    for merge in average_linkage(1 - p):
        if merge.distance > cutoff:
            break
        groups[min(merge.members)] = merge.members
        groups.pop(max(min(merge.left), min(merge.right)))
    return labels_from_groups(list(groups.values()), n)


def sca_baseline_cluster(
    words: Sequence[Sequence[str]],
    scheme: ScoringScheme | None = None,
    threshold: float = SCA_THRESHOLD,
) -> list[int]:
    if not words:
        return []
    return flat_upgma(1 - distance_matrix(words, scheme), threshold)
