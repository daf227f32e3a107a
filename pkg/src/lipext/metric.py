"""Finite metric spaces and functions defined on subsets of them.

Spaces are built from a raw distance matrix, a point cloud (Euclidean
distances) or a weighted graph (shortest-path distances). All constructors
funnel through the same validation so the invariants are identical
whatever the source.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial.distance import cdist

from .errors import (
    Disconnected,
    DuplicatePoint,
    EmptySet,
    MetricViolation,
    NonpositiveWeight,
    PointNotInSet,
)

# relative slack on the triangle inequality, scaled by the diameter
TRIANGLE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    dist: np.ndarray
    diameter: float
    coords: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def min_positive_distance(self) -> float:
        if self.n < 2:
            return float("inf")
        off = self.dist[~np.eye(self.n, dtype=bool)]
        return float(off.min())

    def ball(self, x: int, r: float) -> np.ndarray:
        return ball(self, x, r)

    def __repr__(self):
        return f"FiniteMetricSpace(n={self.n}, diameter={self.diameter:g})"


def _validate(d: np.ndarray) -> None:
    n = d.shape[0]
    if not np.all(np.isfinite(d)):
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise MetricViolation(f"non-finite entry at ({i}, {j})", (int(i), int(j)))
    diag = np.flatnonzero(np.diag(d) != 0)
    if diag.size:
        i = int(diag[0])
        raise MetricViolation(f"nonzero diagonal at ({i}, {i}): {d[i, i]!r}", (i, i))
    neg = np.argwhere(d < 0)
    if neg.size:
        i, j = map(int, neg[0])
        raise MetricViolation(f"negative entry at ({i}, {j}): {d[i, j]!r}", (i, j))
    asym = np.argwhere(d != d.T)
    if asym.size:
        i, j = map(int, asym[0])
        raise MetricViolation(
            f"asymmetric entry at ({i}, {j}): {d[i, j]!r} != {d[j, i]!r}", (i, j)
        )
    zero = np.argwhere((d == 0) & ~np.eye(n, dtype=bool))
    if zero.size:
        i, j = map(int, zero[0])
        raise MetricViolation(f"zero distance between distinct points ({i}, {j})", (i, j))
    tau = TRIANGLE_RTOL * (float(d.max()) if n else 0.0)
    worst = None
    for j in range(n):
        # d[i,k] > d[i,j] + d[j,k] + tau, with j as the intermediate point
        bad = np.argwhere(d > d[:, j, None] + d[None, j, :] + tau)
        if bad.size:
            i, k = map(int, bad[0])
            cand = (i, j, k)
            if worst is None or cand < worst:
                worst = cand
    if worst is not None:
        i, j, k = worst
        raise MetricViolation(
            f"triangle inequality fails for ({i}, {j}, {k}): "
            f"d[{i}][{k}]={d[i, k]!r} > d[{i}][{j}]+d[{j}][{k}]={d[i, j] + d[j, k]!r}",
            worst,
        )


def _freeze(d: np.ndarray, coords=None) -> FiniteMetricSpace:
    d = np.array(d, dtype=float)
    d.setflags(write=False)
    if coords is not None:
        coords = np.array(coords, dtype=float)
        coords.setflags(write=False)
    diameter = float(d.max()) if d.size else 0.0
    return FiniteMetricSpace(dist=d, diameter=diameter, coords=coords)


def from_matrix(raw) -> FiniteMetricSpace:
    """Validate an explicit distance matrix.

    Raises :class:`MetricViolation` with a witness pair or triple on the
    first failed axiom.
    """
    d = np.asarray(raw, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MetricViolation(f"distance matrix must be square, got shape {d.shape}")
    if d.shape[0] == 0:
        raise EmptySet("empty distance matrix")
    _validate(d)
    return _freeze(d)


def from_points(coords) -> FiniteMetricSpace:
    """Euclidean distances between the rows of ``coords``."""
    pts = np.asarray(coords, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise EmptySet("need at least one point")
    d = cdist(pts, pts)
    np.fill_diagonal(d, 0.0)
    dup = np.argwhere((d == 0) & ~np.eye(len(pts), dtype=bool))
    if dup.size:
        i, j = map(int, dup[0])
        raise DuplicatePoint(f"points {i} and {j} coincide", (i, j))
    # cdist is symmetric bit-for-bit only up to the argument order
    d = np.minimum(d, d.T)
    return _freeze(d, coords=pts)


def from_graph(n: int, edges) -> FiniteMetricSpace:
    """Shortest-path metric of a connected graph with positive weights.

    Parallel edges keep the lightest weight.
    """
    if n <= 0:
        raise EmptySet("graph needs at least one vertex")
    best: dict[tuple[int, int], float] = {}
    for u, v, w in edges:
        u, v, w = int(u), int(v), float(w)
        if not (0 <= u < n and 0 <= v < n):
            raise MetricViolation(f"edge ({u}, {v}) out of range for n={n}", (u, v))
        if not w > 0:
            raise NonpositiveWeight(f"edge ({u}, {v}) has weight {w!r}", (u, v))
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        best[key] = min(w, best.get(key, np.inf))
    if best:
        rows, cols, ws = zip(*[(a, b, w) for (a, b), w in best.items()])
    else:
        rows, cols, ws = (), (), ()
    g = csr_matrix((ws, (rows, cols)), shape=(n, n))
    d = shortest_path(g, method="D", directed=False)
    if not np.all(np.isfinite(d)):
        i, j = map(int, np.argwhere(~np.isfinite(d))[0])
        raise Disconnected(f"vertices {i} and {j} are not connected", (i, j))
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    _validate(d)
    return _freeze(d)


def ball(space: FiniteMetricSpace, x: int, r: float) -> np.ndarray:
    """Indices of the open ball ``{y : d(x, y) < r}``, sorted."""
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r!r}")
    return np.flatnonzero(space.dist[x] < r)


@dataclass(frozen=True, eq=False)
class SubsetFunction:
    """Boundary data: values ``g`` on the sorted index set ``C``."""

    indices: np.ndarray
    values: np.ndarray

    @property
    def size(self) -> int:
        return self.indices.size

    def position(self, x: int) -> int:
        """Position of point ``x`` inside ``indices``."""
        pos = int(np.searchsorted(self.indices, x))
        if pos >= self.indices.size or self.indices[pos] != x:
            raise PointNotInSet(f"point {x} is not in the subset", (int(x),))
        return pos

    def value(self, x: int) -> float:
        return float(self.values[self.position(x)])

    def __neg__(self) -> SubsetFunction:
        return SubsetFunction(self.indices, _ro(-self.values))

    def __repr__(self):
        return f"SubsetFunction(|C|={self.size})"


def _ro(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


def subset_function(space: FiniteMetricSpace, indices, values) -> SubsetFunction:
    """Validate and sort boundary data against ``space``."""
    idx = np.asarray(indices, dtype=np.int64).ravel()
    vals = np.asarray(values, dtype=float).ravel()
    if idx.size == 0:
        raise EmptySet("the subset C must be nonempty")
    if idx.size != vals.size:
        raise ValueError(f"{idx.size} indices but {vals.size} values")
    bad = np.flatnonzero((idx < 0) | (idx >= space.n))
    if bad.size:
        raise PointNotInSet(f"index {idx[bad[0]]} outside [0, {space.n})", (int(idx[bad[0]]),))
    if not np.all(np.isfinite(vals)):
        i = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise ValueError(f"non-finite value at index {idx[i]}")
    order = np.argsort(idx, kind="stable")
    idx, vals = idx[order], vals[order]
    dup = np.flatnonzero(np.diff(idx) == 0)
    if dup.size:
        raise ValueError(f"index {idx[dup[0]]} listed twice")
    return SubsetFunction(_ro(idx), _ro(vals))
