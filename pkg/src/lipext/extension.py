"""Extension operators from a subset ``C`` to the whole space.

* ``mcshane``: ``min_x g(x) + L d(x, y)``, the classical inf-convolution.
* ``slope``: ``min_x g(x) + pen_x(d(x, y))`` with two-sided local tables.
* ``descending``: ``max_x g(x) - pen_x(d(x, y))`` with descending tables.
* ``ascending``: ``-descending(-g)``.

All infima are attained minima over the finite set ``C``; the recorded
minimizer is the smallest index of ``C`` reaching it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .epsseq import EpsilonSequence, new_sequence
from .errors import CoincidentPoints, EmptySubset, NonpositiveParameter, PointNotInSet
from .lipconst import lip_global
from .metric import FiniteMetricSpace, SubsetFunction
from .penalization import Penalty, local_constants

VARIANTS = ("mcshane", "slope", "descending", "ascending")


@dataclass(frozen=True)
class ExtensionParams:
    L: float
    eps: float
    eps_eff: float
    anchor: float | None
    rule: str | None
    clamped: bool = False

    def as_dict(self) -> dict:
        return {
            "L": self.L,
            "epsilon": self.eps,
            "epsilon_eff": self.eps_eff,
            "anchor": self.anchor,
            "rule": self.rule,
            "clamped": self.clamped,
        }


@dataclass(frozen=True, eq=False)
class ExtensionResult:
    variant: str
    f: np.ndarray
    params: ExtensionParams
    minimizer: np.ndarray
    seq: EpsilonSequence | None = field(default=None, repr=False)
    penalties: dict[int, Penalty] = field(default_factory=dict, repr=False)
    # the descending extension of -g behind an ascending result
    dual: ExtensionResult | None = field(default=None, repr=False)

    @property
    def constant(self) -> bool:
        return self.seq is None and self.variant != "mcshane"

    def phi_matrix(self, space: FiniteMetricSpace, subset: SubsetFunction) -> np.ndarray:
        """Rows ``phi_x(.)`` over all of ``X`` for ``x`` in ``C`` (slope/descending)."""
        if self.variant == "slope":
            sign = 1.0
        elif self.variant == "descending":
            sign = -1.0
        else:
            raise ValueError(f"no phi family for variant {self.variant!r}")
        if self.constant:
            return np.repeat(subset.values[:, None], space.n, axis=1)
        rows = [subset.values[i] + sign * self.penalties[int(x)](space.dist[x])
                for i, x in enumerate(subset.indices)]
        return np.array(rows)


def _readonly(a):
    a = np.asarray(a)
    a.setflags(write=False)
    return a


def _check_params(subset: SubsetFunction, eps: float):
    if subset.size == 0:
        raise EmptySubset("the subset C must be nonempty")
    if not (eps > 0 and np.isfinite(eps)):
        raise NonpositiveParameter(f"epsilon must be positive, got {eps!r}")


def _constant(variant, space, subset, eps, anchor, rule) -> ExtensionResult:
    c = float(subset.values[0])
    params = ExtensionParams(0.0, float(eps), 0.0, anchor, rule)
    return ExtensionResult(
        variant=variant,
        f=_readonly(np.full(space.n, c)),
        params=params,
        minimizer=_readonly(np.full(space.n, int(subset.indices[0]))),
    )


def _setup(space, subset, eps, anchor, rule):
    L = lip_global(space, subset.indices, subset.values)
    if L == 0:
        return L, None
    if anchor is None:
        anchor = space.diameter
    return L, new_sequence(L, eps, anchor, rule)


def penalties(space: FiniteMetricSpace, subset: SubsetFunction, seq: EpsilonSequence,
              kind: str, L: float) -> dict[int, Penalty]:
    return {
        int(x): Penalty(local_constants(space, subset, int(x), seq, kind, L=L), seq)
        for x in subset.indices
    }


def phi_eval(space: FiniteMetricSpace, subset: SubsetFunction, pens: dict[int, Penalty],
             x: int, y: int, sign: str = "plus") -> float:
    """``g(x) +/- pen_x(d(x, y))``."""
    if int(x) not in pens:
        raise PointNotInSet(f"point {x} is not in the subset", (int(x),))
    gx = subset.value(x)
    if x == y:
        return gx
    p = pens[int(x)](float(space.dist[x, y]))
    return gx + p if sign == "plus" else gx - p


def extend_mcshane(space: FiniteMetricSpace, subset: SubsetFunction) -> ExtensionResult:
    if subset.size == 0:
        raise EmptySubset("the subset C must be nonempty")
    L = lip_global(space, subset.indices, subset.values)
    vals = subset.values[:, None] + L * space.dist[subset.indices]
    arg = np.argmin(vals, axis=0)
    return ExtensionResult(
        variant="mcshane",
        f=_readonly(vals[arg, np.arange(space.n)]),
        params=ExtensionParams(L, 0.0, 0.0, None, None),
        minimizer=_readonly(subset.indices[arg]),
    )


def _extend_penalized(variant, space, subset, eps, anchor, rule):
    _check_params(subset, eps)
    L, seq = _setup(space, subset, eps, anchor, rule)
    if seq is None:
        return _constant(variant, space, subset, eps, anchor, rule)
    kind = "two_sided" if variant == "slope" else "descending"
    pens = penalties(space, subset, seq, kind, L)
    res = ExtensionResult(
        variant=variant,
        f=np.empty(0),
        params=ExtensionParams(L, float(eps), seq.eps_eff, seq.anchor, seq.rule_id),
        minimizer=np.empty(0, dtype=np.int64),
        seq=seq,
        penalties=pens,
    )
    phi = res.phi_matrix(space, subset)
    arg = np.argmin(phi, axis=0) if variant == "slope" else np.argmax(phi, axis=0)
    return replace(
        res,
        f=_readonly(phi[arg, np.arange(space.n)]),
        minimizer=_readonly(subset.indices[arg]),
    )


def extend_slope(space: FiniteMetricSpace, subset: SubsetFunction, eps: float,
                 anchor: float | None = None, rule="dyadic") -> ExtensionResult:
    """Slope-preserving extension; ``anchor`` defaults to the diameter."""
    return _extend_penalized("slope", space, subset, eps, anchor, rule)


def extend_descending(space: FiniteMetricSpace, subset: SubsetFunction, eps: float,
                      anchor: float | None = None, rule="dyadic") -> ExtensionResult:
    """Extension preserving the descending slope (sup of ``g(x) - pen_x``)."""
    return _extend_penalized("descending", space, subset, eps, anchor, rule)


def extend_ascending(space: FiniteMetricSpace, subset: SubsetFunction, eps: float,
                     anchor: float | None = None, rule="dyadic") -> ExtensionResult:
    dual = extend_descending(space, -subset, eps, anchor, rule)
    return ExtensionResult(
        variant="ascending",
        f=_readonly(-dual.f),
        params=dual.params,
        minimizer=dual.minimizer,
        seq=dual.seq,
        penalties=dual.penalties,
        dual=dual,
    )


def extend(variant: str, space: FiniteMetricSpace, subset: SubsetFunction,
           eps: float = 0.5, anchor: float | None = None, rule="dyadic") -> ExtensionResult:
    if variant == "mcshane":
        return extend_mcshane(space, subset)
    ops = {"slope": extend_slope, "descending": extend_descending,
           "ascending": extend_ascending}
    if variant not in ops:
        raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")
    return ops[variant](space, subset, eps, anchor, rule)


def psi_eval(space: FiniteMetricSpace, subset: SubsetFunction, seq: EpsilonSequence,
             xbar: int, z: int, y: int) -> float:
    """Radial piecewise-linear lower bound for ``phi_z`` anchored at ``xbar``.

    Flat at ``g(z)`` out to ``eps_{j-2}``, then linear in ``d(y, z)`` so as
    to reach ``g(xbar)`` at distance ``d(xbar, z)``, where
    ``eps_{j-1} <= d(xbar, z) < eps_j``.
    """
    if xbar == z:
        raise CoincidentPoints(f"psi needs two distinct points, got {xbar} twice", (xbar, z))
    gx, gz = subset.value(xbar), subset.value(z)
    dxz = float(space.dist[xbar, z])
    j = seq.bracket(dxz, 0)
    e = seq.eps(j - 2)
    dyz = float(space.dist[y, z])
    if dyz <= e:
        return gz
    return gz + (gx - gz) / ((1.0 - e / dxz) * dxz) * (dyz - e)


def clamp_bounded(result: ExtensionResult, subset: SubsetFunction) -> ExtensionResult:
    """Post-compose with the clamp onto ``[min g, max g]``."""
    lo, hi = float(subset.values.min()), float(subset.values.max())
    f = np.clip(result.f, lo, hi)
    return replace(result, f=_readonly(f), params=replace(result.params, clamped=True))
