"""Global, pointed and signed Lipschitz constants on finite index sets.

Every infimum over admissible constants is attained on a finite set, so
each constant is a plain maximum of difference quotients.

Functions on an index set ``A`` are passed as two aligned arrays
``(indices, values)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySet, PointNotInSet
from .metric import FiniteMetricSpace

POINTED_KINDS = ("two_sided", "ascending", "descending")
PROFILE_KINDS = ("slope", "ascending", "descending", "asymptotic")


def _increments(delta: np.ndarray, kind: str) -> np.ndarray:
    if kind == "two_sided" or kind == "slope":
        return np.abs(delta)
    if kind == "ascending":
        return np.maximum(delta, 0.0)
    if kind == "descending":
        return np.maximum(-delta, 0.0)
    raise ValueError(f"unknown kind {kind!r}")


def lip_global(space: FiniteMetricSpace, indices, values) -> float:
    """Largest difference quotient over unordered pairs of ``indices``."""
    idx = np.asarray(indices, dtype=np.int64)
    v = np.asarray(values, dtype=float)
    if idx.size == 0:
        raise EmptySet("Lipschitz constant of a function on the empty set")
    if idx.size == 1:
        return 0.0
    d = space.dist[np.ix_(idx, idx)]
    iu = np.triu_indices(idx.size, 1)
    return float((np.abs(v[:, None] - v[None, :])[iu] / d[iu]).max())


def _locate(idx: np.ndarray, x: int) -> int:
    hits = np.flatnonzero(idx == x)
    if hits.size == 0:
        raise PointNotInSet(f"point {x} is not in the index set", (int(x),))
    return int(hits[0])


def lip_at(space: FiniteMetricSpace, indices, values, x: int, kind: str = "two_sided") -> float:
    """Pointed constant at ``x``: max over ``z != x`` of ``inc(v(z) - v(x)) / d(x, z)``.

    ``inc`` is the absolute value, positive part or negative part according
    to ``kind``.
    """
    idx = np.asarray(indices, dtype=np.int64)
    v = np.asarray(values, dtype=float)
    px = _locate(idx, x)
    mask = idx != x
    if not mask.any():
        return 0.0
    ratios = _increments(v[mask] - v[px], kind) / space.dist[x, idx[mask]]
    return float(ratios.max())


@dataclass(frozen=True)
class ScaledProfile:
    """Finite-scale constants at one point, one per (increasing) radius."""

    x: int
    kind: str
    radii: np.ndarray
    constants: np.ndarray

    @property
    def entries(self) -> list[tuple[float, float]]:
        return list(zip(self.radii.tolist(), self.constants.tolist()))

    def at(self, r: float) -> float:
        hits = np.flatnonzero(self.radii == r)
        if hits.size == 0:
            raise KeyError(r)
        return float(self.constants[hits[0]])


def auto_radii(space: FiniteMetricSpace, x: int, halvings: int = 3) -> np.ndarray:
    """Radii at which the open ball around ``x`` changes, plus a few below.

    The distinct distances from ``x`` each mark a change of the open ball
    just above them; twice the farthest distance closes the grid.
    """
    d = np.unique(space.dist[x])
    d = d[d > 0]
    if d.size == 0:
        return np.array([1.0])
    low = d[0] / 2.0 ** np.arange(halvings, 0, -1)
    return np.concatenate([low, d, [2.0 * d[-1]]])


def profile(space: FiniteMetricSpace, indices, values, x: int, radii, kind: str = "slope") -> ScaledProfile:
    """Constants of ``v`` restricted to ``A ∩ B_r(x)`` for each radius ``r``.

    ``slope``/``ascending``/``descending`` use the pointed constant at
    ``x``; ``asymptotic`` uses the global constant over the ball.
    """
    if kind not in PROFILE_KINDS:
        raise ValueError(f"unknown profile kind {kind!r}")
    idx = np.asarray(indices, dtype=np.int64)
    v = np.asarray(values, dtype=float)
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise ValueError("profile radii must be positive")
    if radii.size > 1 and np.any(np.diff(radii) <= 0):
        raise ValueError("profile radii must be strictly increasing")
    px = _locate(idx, x)

    dx = space.dist[x, idx]
    order = np.argsort(dx, kind="stable")
    order = np.concatenate([[px], order[order != px]])
    ds = dx[order]
    vs = v[order]
    if kind == "asymptotic":
        # running max over pairs among the first m points by distance
        run = np.zeros(idx.size)
        sub = idx[order]
        for m in range(1, idx.size):
            q = np.abs(vs[:m] - vs[m]) / space.dist[sub[m], sub[:m]]
            run[m] = max(run[m - 1], float(q.max()))
    else:
        q = np.zeros(idx.size)
        q[1:] = _increments(vs[1:] - vs[0], kind) / ds[1:]
        run = np.maximum.accumulate(q)
    # number of points strictly inside each ball (x itself always counts)
    counts = np.searchsorted(ds, radii, side="left")
    counts = np.maximum(counts, 1)
    return ScaledProfile(x=int(x), kind=kind, radii=radii, constants=run[counts - 1])
