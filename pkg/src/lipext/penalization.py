"""Scale-indexed local constants and the convex penalization built from them.

For a point ``x`` of ``C`` the penalization is the continuous function with
value 0 at 0 and slope ``S_k(x) + 3 L r_{k-1}`` on ``(eps_{k-2}, eps_{k-1})``,
where ``S_k(x)`` is the pointed (or descending) constant of ``g`` on
``C ∩ B_{eps_k}(x)``. Both summands grow with ``k``, so the function is
convex and piecewise linear with knots at the scales.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .epsseq import EpsilonSequence
from .errors import NegativeArgument
from .metric import FiniteMetricSpace, SubsetFunction

TAIL_RTOL = 1e-18
TAIL_MAX_STEPS = 200

TABLE_KINDS = ("two_sided", "descending")


@dataclass(frozen=True)
class LocalConstantTable:
    x: int
    kind: str
    k_min: int
    k_max: int
    S: tuple[float, ...]
    L: float

    def at(self, k: int) -> float:
        """``S_k``, extended by 0 below ``k_min`` and by ``S_{k_max}`` above."""
        if k < self.k_min:
            return 0.0
        if k > self.k_max:
            return self.S[-1]
        return self.S[k - self.k_min]


def local_constants(space: FiniteMetricSpace, subset: SubsetFunction, x: int,
                    seq: EpsilonSequence, kind: str = "two_sided",
                    L: float | None = None) -> LocalConstantTable:
    """``S_k(x)`` for every scale at which the ball around ``x`` changes.

    One sort of ``C`` by distance to ``x``, then each ``S_k`` is a prefix
    maximum of difference quotients.
    """
    if kind not in TABLE_KINDS:
        raise ValueError(f"unknown table kind {kind!r}")
    px = subset.position(x)
    if L is None:
        from .lipconst import lip_global
        L = lip_global(space, subset.indices, subset.values)

    dx = space.dist[x, subset.indices]
    order = np.argsort(dx, kind="stable")
    ds = dx[order]
    delta = subset.values[order] - subset.values[px]
    q = np.zeros(ds.size)
    far = ds > 0
    inc = np.abs(delta[far]) if kind == "two_sided" else np.maximum(-delta[far], 0.0)
    q[far] = inc / ds[far]
    run = np.maximum.accumulate(q)

    if subset.size == 1:
        return LocalConstantTable(int(x), kind, 0, 0, (0.0,), float(L))
    # eps(k_min) <= nearest distance, eps(k_max) > farthest distance
    k_min = seq.bracket(ds[1], 0) - 1
    k_max = seq.bracket(ds[-1], 0)
    S = []
    for k in range(k_min, k_max + 1):
        count = int(np.searchsorted(ds, seq.eps(k), side="left"))
        S.append(float(run[max(count, 1) - 1]))
    return LocalConstantTable(int(x), kind, k_min, k_max, tuple(S), float(L))


def interval_slope(table: LocalConstantTable, seq: EpsilonSequence, k: int) -> float:
    """Slope of the penalization on ``(eps_{k-2}, eps_{k-1})``."""
    return table.at(k) + 3.0 * table.L * seq.ratio(k - 1)


def pen_eval(table: LocalConstantTable, seq: EpsilonSequence, t: float,
             extra_tail: int = 0) -> float:
    """Integral of the penalization slope over ``[0, t]``.

    Summed interval by interval downward from the interval holding ``t``.
    Below ``k_min`` the slope no longer depends on ``g`` and the terms decay
    super-geometrically; summation stops once a term drops under
    ``TAIL_RTOL`` times the running total (or after ``TAIL_MAX_STEPS`` such
    steps). ``extra_tail`` forces that many further terms after the stop.
    """
    t = float(t)
    if t < 0:
        raise NegativeArgument(f"penalization argument must be >= 0, got {t!r}")
    if t == 0:
        return 0.0
    k = seq.bracket(t, -1)
    total = interval_slope(table, seq, k) * (t - seq.eps(k - 2))
    tail_steps = 0
    extra = int(extra_tail)
    k -= 1
    while True:
        term = interval_slope(table, seq, k) * (seq.eps(k - 1) - seq.eps(k - 2))
        total += term
        if k < table.k_min:
            tail_steps += 1
            if term <= TAIL_RTOL * total or tail_steps >= TAIL_MAX_STEPS:
                if extra <= 0:
                    break
                extra -= 1
        k -= 1
    return total


class Penalty:
    """Vectorized penalization of one point.

    Values at the knots ``eps_m`` are tabulated once (lowest knot through
    :func:`pen_eval`, the rest by forward accumulation) and any ``t`` is
    then one linear interpolation. The knot range grows on demand.
    """

    def __init__(self, table: LocalConstantTable, seq: EpsilonSequence):
        self.table = table
        self.seq = seq
        self._lock = threading.Lock()
        self._knots = None  # (m_lo, eps values, pen values, slopes)

    @property
    def x(self) -> int:
        return self.table.x

    def slope(self, k: int) -> float:
        return interval_slope(self.table, self.seq, k)

    def _build(self, m_lo: int, m_hi: int):
        seq = self.seq
        ms = range(m_lo, m_hi + 1)
        E = np.array([seq.eps(m) for m in ms])
        # slope on (eps_m, eps_{m+1}) is the interval with k = m + 2
        G = np.array([self.slope(m + 2) for m in ms])
        P = np.empty(E.size)
        P[0] = pen_eval(self.table, seq, E[0]) if E[0] > 0 else 0.0
        for i in range(1, E.size):
            P[i] = P[i - 1] + G[i - 1] * (E[i] - E[i - 1])
        return m_lo, E, P, G

    def _ensure(self, tmin: float, tmax: float):
        knots = self._knots
        if knots is not None:
            m_lo, E, _, _ = knots
            if E[0] <= tmin and E[-1] > tmax:
                return knots
        with self._lock:
            seq = self.seq
            m_lo = seq.bracket(tmin, 0) - 1
            m_hi = seq.bracket(tmax, 0)
            if self._knots is not None:
                m_lo = min(m_lo, self._knots[0])
                m_hi = max(m_hi, self._knots[0] + self._knots[1].size - 1)
            self._knots = self._build(m_lo, m_hi)
            return self._knots

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise NegativeArgument("penalization argument must be >= 0")
        out = np.zeros(t.shape)
        pos = t > 0
        if not pos.any():
            return out if out.ndim else float(out)
        tp = t[pos]
        _, E, P, G = self._ensure(float(tp.min()), float(tp.max()))
        i = np.searchsorted(E, tp, side="right") - 1
        out[pos] = P[i] + G[i] * (tp - E[i])
        return out if out.ndim else float(out)
