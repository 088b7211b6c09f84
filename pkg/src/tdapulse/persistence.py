"""0-dimensional persistence of finite point sets.

A component is born at scale 0 and dies when it merges with another one, so
the diagram is just a multiset of death values.  For a point cloud these are
the edge weights of a Euclidean minimum spanning tree; on the real line the
MST joins consecutive points and the diagram is the list of gaps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import cdist, pdist

from .errors import EmptyInputError, EmptySupportError, InvalidParameterError

#: Largest diagram (per side) accepted by :func:`bottleneck`.
BOTTLENECK_MAX_POINTS = 200


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """Sorted multiset of death values."""

    deaths: np.ndarray

    def __post_init__(self):
        d = np.sort(np.asarray(self.deaths, dtype=float).ravel())
        if d.size and (not np.all(np.isfinite(d)) or d[0] < 0):
            raise InvalidParameterError("deaths must be finite and nonnegative")
        d.setflags(write=False)
        object.__setattr__(self, "deaths", d)

    def __len__(self):
        return self.deaths.size

    def __iter__(self):
        return iter(self.deaths.tolist())

    def __array__(self, dtype=None, copy=None):
        return self.deaths if dtype is None else self.deaths.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return np.array_equal(self.deaths, other.deaths)

    def __repr__(self):
        return f"PersistenceDiagram({self.deaths.tolist()!r})"

    def count_above(self, r):
        return int(self.deaths.size - np.searchsorted(self.deaths, r, side="right"))

    def components_at(self, r):
        """Components of the union of radius ``r/2`` balls around the points."""
        return 1 + self.count_above(r)


@dataclass(frozen=True, eq=False)
class SupportSet:
    """Strictly increasing sample times where the signal is "on"."""

    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise InvalidParameterError("support times must be sorted and distinct")
        object.__setattr__(self, "times", t)

    def __len__(self):
        return self.times.size


def extract_support(ts, level=0.5):
    """Times of the samples whose value is strictly above ``level``."""
    times = ts.times[ts.values > level]
    if times.size == 0:
        raise EmptySupportError(f"no sample exceeds level {level}")
    return SupportSet(times)


def _support_times(support):
    return support.times if isinstance(support, SupportSet) else SupportSet(support).times


def diagram_1d(support):
    """Diagram of a point set on the line: the consecutive gaps."""
    t = _support_times(support)
    if t.size == 0:
        raise EmptyInputError("diagram of an empty point set")
    return PersistenceDiagram(np.diff(t))


class UnionFind:
    """Disjoint sets over ``0..n-1`` with union by size and path halving."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n
        self.components = n

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.components -= 1
        return True


def as_point_cloud(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise InvalidParameterError("a point cloud is an (n, D) array")
    return pts


def mst_weights(points):
    """Edge weights of a Euclidean MST, in the order Kruskal accepts them.

    Ties between equal distances are broken by pair index; any choice is fine
    because every MST of a graph has the same multiset of edge weights.
    """
    pts = as_point_cloud(points)
    n = pts.shape[0]
    if n == 0:
        raise EmptyInputError("diagram of an empty point cloud")
    if n == 1:
        return np.empty(0)
    dist = pdist(pts)
    order = np.argsort(dist, kind="stable")
    # pdist's condensed order is row-major over i < j
    rows, cols = np.triu_indices(n, 1)
    rows, cols = rows[order].tolist(), cols[order].tolist()
    uf = UnionFind(n)
    accepted = []
    for e, (i, j) in enumerate(zip(rows, cols)):
        if uf.union(i, j):
            accepted.append(order[e])
            if uf.components == 1:
                break
    return dist[np.asarray(accepted)]


def diagram_point_cloud(points):
    """Diagram of a point cloud in R^D (Euclidean metric)."""
    return PersistenceDiagram(mst_weights(points))


def _matchable(a, b, r):
    """Whether some partial matching of ``a`` with ``b`` costs at most ``r``."""
    k, l = a.size, b.size
    n = k + l
    # left: a_0..a_{k-1}, then diagonal slots for b; right: b_0..b_{l-1}, then
    # diagonal slots for a
    adj = np.zeros((n, n), dtype=bool)
    adj[:k, :l] = np.abs(a[:, None] - b[None, :]) <= r
    adj[np.arange(k), l + np.arange(k)] = a / 2 <= r
    adj[k + np.arange(l), np.arange(l)] = b / 2 <= r
    adj[k:, l:] = True
    match = maximum_bipartite_matching(csr_matrix(adj), perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck(dgm1, dgm2):
    """Exact bottleneck distance between two 0-dimensional diagrams.

    A matched pair ``(a, b)`` costs ``|a - b|`` and an unmatched point ``d``
    costs ``d / 2``; the distance is the smallest achievable maximum cost.
    The optimum is one of those pairwise or half values, so the candidates are
    bisected with a perfect-matching feasibility test.  Diagrams above
    :data:`BOTTLENECK_MAX_POINTS` points are rejected.
    """
    a = np.asarray(dgm1, dtype=float).ravel()
    b = np.asarray(dgm2, dtype=float).ravel()
    if max(a.size, b.size) > BOTTLENECK_MAX_POINTS:
        raise InvalidParameterError(
            f"exact bottleneck is limited to {BOTTLENECK_MAX_POINTS} points per diagram")
    if a.size == 0 and b.size == 0:
        return 0.0
    candidates = np.unique(np.concatenate(
        ([0.0], np.abs(a[:, None] - b[None, :]).ravel(), a / 2, b / 2)))
    lo, hi = 0, candidates.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _matchable(a, b, candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def hausdorff(a, b):
    """Two-sided Hausdorff distance between finite sets under the Euclidean metric."""
    pa, pb = as_point_cloud(a), as_point_cloud(b)
    if pa.shape[0] == 0 or pb.shape[0] == 0:
        raise EmptyInputError("Hausdorff distance needs two nonempty sets")
    if pa.shape[1] != pb.shape[1]:
        raise InvalidParameterError("point sets live in different dimensions")
    d = cdist(pa, pb)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
