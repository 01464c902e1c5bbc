"""Average-linkage (UPGMA) agglomeration shared by guide trees and flat clustering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# distances closer than this count as tied; ties go to the lexicographically smallest pair
TIE_TOL = 1e-12


@dataclass(frozen=True)
class Merge:
    left: tuple[int, ...]
    right: tuple[int, ...]
    distance: float

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(sorted(self.left + self.right))


def average_linkage(d: np.ndarray) -> list[Merge]:
    """Full UPGMA merge sequence over a symmetric distance matrix.

    Clusters are keyed by their smallest leaf. Among pairs whose average distance is
    within TIE_TOL of the minimum, the pair with the smallest (key_a, key_b) merges first.
    """
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    if d.shape != (n, n):
        raise ValueError(f"distance matrix must be square, got {d.shape}")
    members = {i: (i,) for i in range(n)}
    dist = {(i, j): float(d[i, j]) for i in range(n) for j in range(i + 1, n)}
    merges = []
    while len(members) > 1:
        best = min(dist.values())
        a, b = min(k for k, v in dist.items() if v <= best + TIE_TOL)
        na, nb = len(members[a]), len(members[b])
        merges.append(Merge(members[a], members[b], dist[a, b]))
        members[a] = tuple(sorted(members[a] + members.pop(b)))
        for k in members:
            if k == a:
                continue
            dak = dist.pop((min(a, k), max(a, k)))
            dbk = dist.pop((min(b, k), max(b, k)))
            dist[min(a, k), max(a, k)] = (na * dak + nb * dbk) / (na + nb)
        del dist[a, b]
    return merges
